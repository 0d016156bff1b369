#pragma once

#include <string>

#include "json.hpp"

#include "chsk/config.hpp"
#include "chsk/eval.hpp"

namespace chsk {

// JSON form of an evaluation report (schema "chsk-eval-report-v1").
// Degenerate subset statistics are emitted as null.
nlohmann::json eval_report_json(const CodecConfig& config,
                                const EvalReport& report);

// Line-oriented summary for terminals: one line per subset, then macro,
// timing, and warnings.
std::string eval_report_text(const EvalReport& report);

}  // namespace chsk
