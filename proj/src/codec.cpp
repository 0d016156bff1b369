#include "chsk/codec.hpp"

#include <cmath>
#include <string>

#include "chsk/bitpack.hpp"
#include "chsk/error.hpp"
#include "chsk/hash.hpp"

namespace chsk {

namespace {

void check_dim(const CodecConfig& config, std::size_t got) {
  if (got != config.dim()) {
    throw Error(ErrorKind::Data,
                "dimension mismatch: got " + std::to_string(got) +
                    ", config dim " + std::to_string(config.dim()));
  }
}

std::vector<double> widen(std::span<const float> x) {
  return std::vector<double>(x.begin(), x.end());
}

// Unit direction and norm of x. Rejects non-finite coordinates and zero or
// non-finite norms; a direction is undefined for those, and silently
// encoding them would corrupt downstream correlation studies.
std::pair<std::vector<double>, double> unit_direction(
    const CodecConfig& config, std::span<const double> x) {
  check_dim(config, x.size());
  double sum_sq = 0.0;
  for (const double v : x) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::Data, "unencodable vector: non-finite coordinate");
    }
    sum_sq += v * v;
  }
  const double norm = std::sqrt(sum_sq);
  if (norm == 0.0) {
    throw Error(ErrorKind::Data, "unencodable vector: zero norm");
  }
  if (!std::isfinite(norm)) {
    throw Error(ErrorKind::Data, "unencodable vector: non-finite norm");
  }
  std::vector<double> unit(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    unit[i] = x[i] / norm;
  }
  return {std::move(unit), norm};
}

std::vector<double> scale_by_sqrt_m(const CodecConfig& config,
                                    std::vector<double> y) {
  const double root_m = std::sqrt(static_cast<double>(config.sketch_dim()));
  for (double& v : y) {
    v *= root_m;
  }
  return y;
}

}  // namespace

std::vector<double> project_unit(const CodecConfig& config,
                                 std::span<const double> unit) {
  check_dim(config, unit.size());
  const std::uint32_t d = config.dim();
  const std::uint32_t m = config.sketch_dim();
  const std::uint32_t s = config.sparsity();
  const std::uint64_t seed = config.seed();
  const double inv_root_s = 1.0 / std::sqrt(static_cast<double>(s));

  // Fixed (i outer, j inner) accumulation order keeps the output
  // bit-reproducible.
  std::vector<double> y(m, 0.0);
  for (std::uint32_t i = 0; i < d; ++i) {
    const double w = unit[i] * inv_root_s;
    if (w == 0.0) {
      continue;
    }
    for (std::uint32_t j = 0; j < s; ++j) {
      const Draw dr = draw(seed, i, j, m);
      y[dr.bucket] += static_cast<double>(dr.sign) * w;
    }
  }
  return y;
}

std::vector<double> scaled_sketch(const CodecConfig& config,
                                  std::span<const double> x) {
  auto [unit, norm] = unit_direction(config, x);
  (void)norm;
  return scale_by_sqrt_m(config, project_unit(config, unit));
}

std::uint16_t quantize(const CodecConfig& config, double z) {
  if (!std::isfinite(z)) {
    throw Error(ErrorKind::Data, "quantize: non-finite input");
  }
  const double c = config.clip();
  const double levels = static_cast<double>(config.levels());
  const double clipped = std::min(std::max(z, -c), c);
  // Round half up; the operand is nonnegative. floor(t + 0.5) is
  // platform-independent where round-to-nearest-even is not.
  const double t = std::floor(levels * (clipped + c) / (2.0 * c) + 0.5);
  if (t <= 0.0) {
    return 0;
  }
  if (t >= levels) {
    return static_cast<std::uint16_t>(config.levels());
  }
  return static_cast<std::uint16_t>(t);
}

double dequantize(const CodecConfig& config, std::uint32_t code) {
  if (code > config.levels()) {
    throw Error(ErrorKind::Data, "dequantize: code out of range");
  }
  const double c = config.clip();
  return 2.0 * c * static_cast<double>(code) /
             static_cast<double>(config.levels()) -
         c;
}

EncodedVector encode(const CodecConfig& config, std::span<const double> x) {
  auto [unit, norm] = unit_direction(config, x);
  const std::vector<double> z =
      scale_by_sqrt_m(config, project_unit(config, unit));
  std::vector<std::uint16_t> codes(config.sketch_dim());
  for (std::size_t k = 0; k < codes.size(); ++k) {
    codes[k] = quantize(config, z[k]);
  }
  EncodedVector out;
  out.packed = pack_codes(codes, config.bits());
  if (config.metric() == Metric::Dot) {
    out.norm_code = encode_norm(config, norm);
  }
  return out;
}

EncodedVector encode(const CodecConfig& config, std::span<const float> x) {
  const std::vector<double> wide = widen(x);
  return encode(config, std::span<const double>(wide));
}

QuerySketch encode_query(const CodecConfig& config,
                         std::span<const double> r) {
  auto [unit, norm] = unit_direction(config, r);
  QuerySketch q;
  q.sketch = scale_by_sqrt_m(config, project_unit(config, unit));
  q.query_norm = norm;
  return q;
}

QuerySketch encode_query(const CodecConfig& config, std::span<const float> r) {
  const std::vector<double> wide = widen(r);
  return encode_query(config, std::span<const double>(wide));
}

double score(const CodecConfig& config, const QuerySketch& query,
             const EncodedVector& encoded) {
  const std::uint32_t m = config.sketch_dim();
  if (query.sketch.size() != m) {
    throw Error(ErrorKind::Data, "score: query sketch dimension mismatch");
  }
  if (encoded.packed.size() != packed_size_bytes(m, config.bits())) {
    throw Error(ErrorKind::Data, "score: encoded payload size mismatch");
  }
  double sum = 0.0;
  for (std::uint32_t k = 0; k < m; ++k) {
    const std::uint16_t code = packed_code_at(encoded.packed, k, config.bits());
    sum += query.sketch[k] * dequantize(config, code);
  }
  double est = sum / static_cast<double>(m);
  if (config.metric() == Metric::Dot) {
    if (!encoded.norm_code) {
      throw Error(ErrorKind::Data, "score: missing norm code");
    }
    est = est * query.query_norm * decode_norm(config, *encoded.norm_code);
  }
  return est;
}

std::uint16_t encode_norm(const CodecConfig& config, double norm) {
  if (!std::isfinite(norm) || norm <= 0.0) {
    throw Error(ErrorKind::Data, "norm must be positive and finite");
  }
  const double lo = config.log_norm_min();
  const double hi = config.log_norm_max();
  const double l = std::min(std::max(std::log2(norm), lo), hi);
  const double t = std::floor(65535.0 * (l - lo) / (hi - lo) + 0.5);
  if (t <= 0.0) {
    return 0;
  }
  if (t >= 65535.0) {
    return 65535;
  }
  return static_cast<std::uint16_t>(t);
}

double decode_norm(const CodecConfig& config, std::uint16_t code) {
  const double lo = config.log_norm_min();
  const double hi = config.log_norm_max();
  const double l = lo + static_cast<double>(code) * (hi - lo) / 65535.0;
  return std::exp2(l);
}

}  // namespace chsk
