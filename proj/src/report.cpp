#include "chsk/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace chsk {

namespace {

nlohmann::json corr_value(double v) {
  if (std::isnan(v)) {
    return nullptr;
  }
  return v;
}

std::string fmt6(double v) {
  if (std::isnan(v)) {
    return "n/a";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

nlohmann::json eval_report_json(const CodecConfig& config,
                                const EvalReport& report) {
  nlohmann::json subsets = nlohmann::json::array();
  for (const SubsetReport& sub : report.per_subset) {
    subsets.push_back({
        {"subset", sub.subset},
        {"pairs", sub.n_pairs},
        {"dense_spearman", corr_value(sub.dense_spearman)},
        {"sketch_spearman", corr_value(sub.sketch_spearman)},
        {"spearman_loss", corr_value(sub.spearman_loss)},
        {"sketch_dense_pearson", corr_value(sub.sketch_dense_pearson)},
        {"degenerate", sub.degenerate},
    });
  }
  return nlohmann::json{
      {"schema", "chsk-eval-report-v1"},
      {"config",
       {
           {"metric", metric_name(config.metric())},
           {"dim", config.dim()},
           {"sketch_dim", config.sketch_dim()},
           {"bits", config.bits()},
           {"sparsity", config.sparsity()},
           {"clip", config.clip()},
           {"seed", config.seed()},
           {"log_norm_min", config.log_norm_min()},
           {"log_norm_max", config.log_norm_max()},
           {"bytes_per_vector", config.code_size_bytes()},
       }},
      {"subsets", subsets},
      {"macro",
       {
           {"subsets", report.macro.n_subsets},
           {"dense_spearman", corr_value(report.macro.dense_spearman)},
           {"sketch_spearman", corr_value(report.macro.sketch_spearman)},
           {"spearman_loss", corr_value(report.macro.spearman_loss)},
           {"sketch_dense_pearson",
            corr_value(report.macro.sketch_dense_pearson)},
       }},
      {"warnings", report.warnings},
      {"timing",
       {
           {"quantize_seconds", report.timing.quantize_seconds},
           {"score_seconds", report.timing.score_seconds},
       }},
  };
}

std::string eval_report_text(const EvalReport& report) {
  std::ostringstream out;
  for (const SubsetReport& sub : report.per_subset) {
    out << "subset " << sub.subset << ": pairs=" << sub.n_pairs
        << " dense_spearman=" << fmt6(sub.dense_spearman)
        << " sketch_spearman=" << fmt6(sub.sketch_spearman)
        << " spearman_loss=" << fmt6(sub.spearman_loss)
        << " sketch_dense_pearson=" << fmt6(sub.sketch_dense_pearson) << "\n";
  }
  out << "macro: subsets=" << report.macro.n_subsets
      << " dense_spearman=" << fmt6(report.macro.dense_spearman)
      << " sketch_spearman=" << fmt6(report.macro.sketch_spearman)
      << " spearman_loss=" << fmt6(report.macro.spearman_loss)
      << " sketch_dense_pearson=" << fmt6(report.macro.sketch_dense_pearson)
      << "\n";
  out << "timing: quantize_seconds=" << report.timing.quantize_seconds
      << " score_seconds=" << report.timing.score_seconds << "\n";
  for (const std::string& warning : report.warnings) {
    out << "warning: " << warning << "\n";
  }
  return out.str();
}

}  // namespace chsk
