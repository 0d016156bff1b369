#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "chsk/eval.hpp"
#include "chsk/flat_index.hpp"

namespace chsk {

// Binary file formats. All multi-byte fields are little-endian regardless
// of host; doubles are IEEE 754 bit patterns.
//
// Sketch file ("CHSK", 60-byte header):
//   offset  0  magic   "CHSK"
//           4  u16     version = 1
//           6  u8      metric (0 = cosine, 1 = dot)
//           7  u8      bits
//           8  u32     dim
//          12  u32     sketch_dim
//          16  u32     sparsity
//          20  u64     seed
//          28  f64     clip
//          36  f64     log_norm_min
//          44  f64     log_norm_max
//          52  u64     count
// followed by `count` records: u64 id, then code_size_bytes(config)
// payload (packed codes, then u16 norm code in Dot mode).
//
// Embedding file ("CHEV", 18-byte header):
//   offset  0  magic   "CHEV"
//           4  u16     version = 1
//           6  u32     dim
//          10  u64     count
// followed by `count` records: u64 id, then dim f32 values.
//
// Pairs file: UTF-8 text, one pair per line as
//   subset<TAB>left_id<TAB>right_id<TAB>label
// with '#' starting a comment line; blank lines are ignored.

inline constexpr std::size_t kSketchHeaderSize = 60;
inline constexpr std::size_t kEmbeddingHeaderSize = 18;
inline constexpr std::uint16_t kSketchFileVersion = 1;
inline constexpr std::uint16_t kEmbeddingFileVersion = 1;

std::vector<std::uint8_t> encode_sketch_header(const CodecConfig& config,
                                               std::uint64_t count);

struct SketchHeader {
  CodecConfig config;
  std::uint64_t count;
};

// Parses and validates the fixed header. Distinct errors for bad magic,
// unsupported version, truncation, and invalid field values.
SketchHeader parse_sketch_header(std::span<const std::uint8_t> bytes);

void save_index(const FlatIndex& index, const std::filesystem::path& path);
FlatIndex load_index(const std::filesystem::path& path);

struct EmbeddingRecord {
  std::uint64_t id = 0;
  std::vector<float> values;
};

struct EmbeddingFileData {
  std::uint32_t dim = 0;
  std::vector<EmbeddingRecord> records;
};

void write_embedding_file(const std::filesystem::path& path, std::uint32_t dim,
                          std::span<const EmbeddingRecord> records);
EmbeddingFileData read_embedding_file(const std::filesystem::path& path);

// Builds the id -> vector map used by the evaluation harness; throws on
// duplicate ids.
EmbeddingMap to_embedding_map(const EmbeddingFileData& data);

std::vector<LabeledPair> read_pairs_file(const std::filesystem::path& path);
void write_pairs_file(const std::filesystem::path& path,
                      std::span<const LabeledPair> pairs);

}  // namespace chsk
