#include "chsk/config.hpp"

#include <cmath>

#include "chsk/error.hpp"

namespace chsk {

const char* metric_name(Metric metric) noexcept {
  return metric == Metric::Dot ? "dot" : "cosine";
}

CodecConfig CodecConfig::validated(const CodecParams& p) {
  if (p.dim == 0) {
    throw Error(ErrorKind::Config, "dim out of range");
  }
  if (p.sketch_dim == 0 || p.sketch_dim > (1U << 16)) {
    throw Error(ErrorKind::Config, "sketch dim out of range");
  }
  if (p.bits == 0 || p.bits > 16) {
    throw Error(ErrorKind::Config, "bits out of range");
  }
  if (p.sparsity == 0) {
    throw Error(ErrorKind::Config, "sparsity out of range");
  }
  if (!std::isfinite(p.clip)) {
    throw Error(ErrorKind::Config, "clip range must be finite");
  }
  if (p.clip <= 0.0) {
    throw Error(ErrorKind::Config, "clip range must be positive");
  }
  if (!std::isfinite(p.log_norm_min) || !std::isfinite(p.log_norm_max)) {
    throw Error(ErrorKind::Config, "norm bounds must be finite");
  }
  if (!(p.log_norm_min < p.log_norm_max)) {
    throw Error(ErrorKind::Config, "norm bounds must be ordered");
  }
  return CodecConfig(p);
}

std::size_t CodecConfig::code_size_bytes() const noexcept {
  const std::size_t packed =
      (static_cast<std::size_t>(p_.sketch_dim) * p_.bits + 7) / 8;
  return packed + (p_.metric == Metric::Dot ? 2 : 0);
}

}  // namespace chsk
