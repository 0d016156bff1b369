#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "chsk/config.hpp"

namespace chsk {

// The codec pipeline for a database vector x is
//   normalize -> project -> rescale by sqrt(m) -> clip -> quantize -> pack,
// plus a 16-bit log-norm code in Dot mode. Queries stop after the rescale
// and stay in floating point; scoring is the asymmetric inner product of
// the float query sketch with the dequantized database sketch, divided by
// m to land back on cosine scale.
//
// All operations are pure functions of (config, arguments), accumulate in
// 64-bit floats regardless of input width, and use a fixed evaluation
// order, so identical inputs give byte-identical outputs.

// Bit-packed quantized sketch; the stored database unit. `packed` holds
// ceil(m*b/8) bytes with zero pad bits; norm_code is present iff the
// config metric is Dot.
struct EncodedVector {
  std::vector<std::uint8_t> packed;
  std::optional<std::uint16_t> norm_code;
};

// Float sketch plus original norm; the query-side unit.
struct QuerySketch {
  std::vector<double> sketch;  // m coordinates, sqrt(m)-rescaled
  double query_norm = 0.0;
};

// y = R u for the sparse signed projection R: each input coordinate is
// scattered into `sparsity` buckets with signs, scaled by 1/sqrt(s).
// Caller guarantees unit norm (the map is linear, so any input is
// accepted). Throws on dimension mismatch.
std::vector<double> project_unit(const CodecConfig& config,
                                 std::span<const double> unit);

// sqrt(m) * R * (x / ||x||): the pre-quantization sketch shared by the
// database and query paths. This is the diagnostic view of encode used to
// compute clipping residuals. Throws on dimension mismatch, non-finite
// coordinates, and zero norm.
std::vector<double> scaled_sketch(const CodecConfig& config,
                                  std::span<const double> x);

// Clip to [-c, c] and uniform-quantize to [0, L] with round-half-up
// (floor(t + 0.5)); monotone nondecreasing. Throws on non-finite input.
std::uint16_t quantize(const CodecConfig& config, double z);

// 2*c*q/L - c. Throws when q exceeds L.
double dequantize(const CodecConfig& config, std::uint32_t code);

EncodedVector encode(const CodecConfig& config, std::span<const double> x);
EncodedVector encode(const CodecConfig& config, std::span<const float> x);

QuerySketch encode_query(const CodecConfig& config, std::span<const double> r);
QuerySketch encode_query(const CodecConfig& config, std::span<const float> r);

// Asymmetric estimate: (1/m) sum_k a_k * dequantize(q_k). Cosine mode
// returns the estimate directly; Dot mode multiplies by the query norm and
// the decoded database norm. The caller guarantees both sides were
// produced under this config; only cheap structural checks are done here.
double score(const CodecConfig& config, const QuerySketch& query,
             const EncodedVector& encoded);

// 16-bit log2-norm side channel: clip(log2(norm), l_min, l_max) mapped
// uniformly onto [0, 65535] with round-half-up. Throws unless norm is
// positive and finite.
std::uint16_t encode_norm(const CodecConfig& config, double norm);

// Inverse map: 2^(l_min + n*(l_max-l_min)/65535). Total over all 16-bit
// codes.
double decode_norm(const CodecConfig& config, std::uint16_t code);

}  // namespace chsk
