#pragma once

#include <cstddef>
#include <cstdint>

namespace chsk {

enum class Metric : std::uint8_t { Cosine = 0, Dot = 1 };

const char* metric_name(Metric metric) noexcept;

// Raw codec knobs as supplied by a user. The defaults are the 384-d
// sentence-embedding profile (48-byte cosine sketches).
struct CodecParams {
  std::uint32_t dim = 384;        // input dimension
  std::uint32_t sketch_dim = 96;  // sketch dimension, <= 2^16
  std::uint32_t bits = 4;         // bits per sketch coordinate, 1..16
  std::uint32_t sparsity = 4;     // hash updates per input coordinate
  double clip = 3.0;              // symmetric clip range, > 0
  Metric metric = Metric::Cosine;
  std::uint64_t seed = 12345;
  double log_norm_min = -32.0;  // log2-norm channel bounds, Dot mode only
  double log_norm_max = 32.0;

  bool operator==(const CodecParams&) const = default;
};

// Validated, immutable parameter set. Every codec operation takes one of
// these; the sketch file header persists exactly these fields.
class CodecConfig {
 public:
  // Throws Error(ErrorKind::Config) with a distinct message per violated
  // invariant.
  static CodecConfig validated(const CodecParams& params);

  std::uint32_t dim() const noexcept { return p_.dim; }
  std::uint32_t sketch_dim() const noexcept { return p_.sketch_dim; }
  std::uint32_t bits() const noexcept { return p_.bits; }
  std::uint32_t sparsity() const noexcept { return p_.sparsity; }
  double clip() const noexcept { return p_.clip; }
  Metric metric() const noexcept { return p_.metric; }
  std::uint64_t seed() const noexcept { return p_.seed; }
  double log_norm_min() const noexcept { return p_.log_norm_min; }
  double log_norm_max() const noexcept { return p_.log_norm_max; }
  const CodecParams& params() const noexcept { return p_; }

  // Quantizer levels L = 2^b - 1.
  std::uint32_t levels() const noexcept { return (1U << p_.bits) - 1; }

  // Quantizer step 2c/L.
  double step() const noexcept { return 2.0 * p_.clip / levels(); }

  // Stored bytes per vector: ceil(m*b/8), plus 2 in Dot mode for the
  // log-norm side channel.
  std::size_t code_size_bytes() const noexcept;

  bool operator==(const CodecConfig&) const = default;

 private:
  explicit CodecConfig(const CodecParams& p) : p_(p) {}

  CodecParams p_;
};

}  // namespace chsk
