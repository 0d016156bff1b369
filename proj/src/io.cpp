#include "chsk/io.hpp"

#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "chsk/bitpack.hpp"
#include "chsk/error.hpp"

namespace chsk {

namespace {

constexpr char kSketchMagic[4] = {'C', 'H', 'S', 'K'};
constexpr char kEmbeddingMagic[4] = {'C', 'H', 'E', 'V'};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
  }
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
  }
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

void put_f32(std::vector<std::uint8_t>& out, float v) {
  put_u32(out, std::bit_cast<std::uint32_t>(v));
}

// Bounds-checked little-endian reader over a byte buffer.
class Cursor {
 public:
  Cursor(std::span<const std::uint8_t> data, std::string what)
      : data_(data), what_(std::move(what)) {}

  std::size_t remaining() const { return data_.size() - pos_; }

  std::span<const std::uint8_t> take(std::size_t n) {
    if (remaining() < n) {
      throw Error(ErrorKind::Format, "truncated " + what_ + " (at byte " +
                                         std::to_string(pos_) + ")");
    }
    const auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::uint16_t u16() {
    const auto b = take(2);
    return static_cast<std::uint16_t>(b[0] | (std::uint16_t(b[1]) << 8));
  }

  std::uint32_t u32() {
    const auto b = take(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
      v = (v << 8) | b[i];
    }
    return v;
  }

  std::uint64_t u64() {
    const auto b = take(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
      v = (v << 8) | b[i];
    }
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }
  float f32() { return std::bit_cast<float>(u32()); }

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::string what_;
};

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open file: " + path.string());
  }
  std::vector<std::uint8_t> bytes;
  in.seekg(0, std::ios::end);
  const auto size = in.tellg();
  in.seekg(0, std::ios::beg);
  bytes.resize(static_cast<std::size_t>(size));
  if (size > 0) {
    in.read(reinterpret_cast<char*>(bytes.data()), size);
  }
  if (!in) {
    throw Error(ErrorKind::Io, "cannot read file: " + path.string());
  }
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path,
                      std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot open file for writing: " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write file: " + path.string());
  }
}

}  // namespace

std::vector<std::uint8_t> encode_sketch_header(const CodecConfig& config,
                                               std::uint64_t count) {
  std::vector<std::uint8_t> out;
  out.reserve(kSketchHeaderSize);
  out.insert(out.end(), std::begin(kSketchMagic), std::end(kSketchMagic));
  put_u16(out, kSketchFileVersion);
  out.push_back(static_cast<std::uint8_t>(config.metric()));
  out.push_back(static_cast<std::uint8_t>(config.bits()));
  put_u32(out, config.dim());
  put_u32(out, config.sketch_dim());
  put_u32(out, config.sparsity());
  put_u64(out, config.seed());
  put_f64(out, config.clip());
  put_f64(out, config.log_norm_min());
  put_f64(out, config.log_norm_max());
  put_u64(out, count);
  return out;
}

SketchHeader parse_sketch_header(std::span<const std::uint8_t> bytes) {
  Cursor cur(bytes, "sketch file header");
  const auto magic = cur.take(4);
  if (std::memcmp(magic.data(), kSketchMagic, 4) != 0) {
    throw Error(ErrorKind::Format, "not a sketch file");
  }
  const std::uint16_t version = cur.u16();
  if (version != kSketchFileVersion) {
    throw Error(ErrorKind::Format,
                "unsupported sketch file version " + std::to_string(version));
  }
  const std::uint8_t metric_byte = cur.take(1)[0];
  if (metric_byte > 1) {
    throw Error(ErrorKind::Format, "invalid metric in sketch file");
  }
  CodecParams p;
  p.metric = metric_byte == 0 ? Metric::Cosine : Metric::Dot;
  p.bits = cur.take(1)[0];
  p.dim = cur.u32();
  p.sketch_dim = cur.u32();
  p.sparsity = cur.u32();
  p.seed = cur.u64();
  p.clip = cur.f64();
  p.log_norm_min = cur.f64();
  p.log_norm_max = cur.f64();
  const std::uint64_t count = cur.u64();
  return SketchHeader{CodecConfig::validated(p), count};
}

void save_index(const FlatIndex& index, const std::filesystem::path& path) {
  const CodecConfig& config = index.config();
  std::vector<std::uint8_t> bytes =
      encode_sketch_header(config, index.size());
  bytes.reserve(bytes.size() + index.size() * (8 + config.code_size_bytes()));
  for (const FlatIndex::Entry& entry : index.entries()) {
    put_u64(bytes, entry.id);
    bytes.insert(bytes.end(), entry.code.packed.begin(),
                 entry.code.packed.end());
    if (config.metric() == Metric::Dot) {
      put_u16(bytes, *entry.code.norm_code);
    }
  }
  write_file_bytes(path, bytes);
}

FlatIndex load_index(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file_bytes(path);
  const SketchHeader header = parse_sketch_header(bytes);
  const CodecConfig& config = header.config;

  Cursor cur(std::span<const std::uint8_t>(bytes).subspan(kSketchHeaderSize),
             "sketch file body");
  const std::size_t packed_size =
      packed_size_bytes(config.sketch_dim(), config.bits());
  FlatIndex index(config);
  for (std::uint64_t i = 0; i < header.count; ++i) {
    const std::uint64_t id = cur.u64();
    const auto packed = cur.take(packed_size);
    EncodedVector code;
    code.packed.assign(packed.begin(), packed.end());
    if (config.metric() == Metric::Dot) {
      code.norm_code = cur.u16();
    }
    index.add_encoded(id, std::move(code));
  }
  if (cur.remaining() != 0) {
    throw Error(ErrorKind::Format, "trailing bytes after sketch file body");
  }
  return index;
}

void write_embedding_file(const std::filesystem::path& path, std::uint32_t dim,
                          std::span<const EmbeddingRecord> records) {
  if (dim == 0) {
    throw Error(ErrorKind::Config, "dim out of range");
  }
  std::vector<std::uint8_t> bytes;
  bytes.reserve(kEmbeddingHeaderSize +
                records.size() * (8 + 4 * std::size_t{dim}));
  bytes.insert(bytes.end(), std::begin(kEmbeddingMagic),
               std::end(kEmbeddingMagic));
  put_u16(bytes, kEmbeddingFileVersion);
  put_u32(bytes, dim);
  put_u64(bytes, records.size());
  for (const EmbeddingRecord& rec : records) {
    if (rec.values.size() != dim) {
      throw Error(ErrorKind::Data,
                  "embedding id " + std::to_string(rec.id) +
                      " has dimension " + std::to_string(rec.values.size()) +
                      ", expected " + std::to_string(dim));
    }
    put_u64(bytes, rec.id);
    for (const float v : rec.values) {
      put_f32(bytes, v);
    }
  }
  write_file_bytes(path, bytes);
}

EmbeddingFileData read_embedding_file(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file_bytes(path);
  Cursor cur(bytes, "embedding file");
  const auto magic = cur.take(4);
  if (std::memcmp(magic.data(), kEmbeddingMagic, 4) != 0) {
    throw Error(ErrorKind::Format, "not an embedding file");
  }
  const std::uint16_t version = cur.u16();
  if (version != kEmbeddingFileVersion) {
    throw Error(ErrorKind::Format, "unsupported embedding file version " +
                                       std::to_string(version));
  }
  EmbeddingFileData data;
  data.dim = cur.u32();
  if (data.dim == 0) {
    throw Error(ErrorKind::Format, "embedding file has zero dimension");
  }
  const std::uint64_t count = cur.u64();
  // Divide rather than multiply so a corrupt count cannot overflow.
  const std::uint64_t record_size = 8 + 4 * std::uint64_t{data.dim};
  if (cur.remaining() % record_size != 0 ||
      cur.remaining() / record_size != count) {
    throw Error(ErrorKind::Format, "embedding file length mismatch");
  }
  data.records.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    EmbeddingRecord& rec = data.records[i];
    rec.id = cur.u64();
    rec.values.resize(data.dim);
    for (std::uint32_t j = 0; j < data.dim; ++j) {
      rec.values[j] = cur.f32();
    }
  }
  return data;
}

EmbeddingMap to_embedding_map(const EmbeddingFileData& data) {
  EmbeddingMap map;
  map.reserve(data.records.size());
  for (const EmbeddingRecord& rec : data.records) {
    if (!map.emplace(rec.id, rec.values).second) {
      throw Error(ErrorKind::Data,
                  "duplicate embedding id " + std::to_string(rec.id));
    }
  }
  return map;
}

std::vector<LabeledPair> read_pairs_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open file: " + path.string());
  }
  std::vector<LabeledPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || line[0] == '#') {
      continue;
    }
    const std::string where = "pairs file line " + std::to_string(line_no);

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (fields.size() != 4) {
      throw Error(ErrorKind::Format,
                  where + ": expected 4 tab-separated fields, got " +
                      std::to_string(fields.size()));
    }

    LabeledPair pair;
    pair.subset = fields[0];
    if (pair.subset.empty()) {
      throw Error(ErrorKind::Format, where + ": empty subset");
    }
    auto parse_id = [&where](const std::string& s, const char* which) {
      std::uint64_t v = 0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw Error(ErrorKind::Format,
                    where + ": invalid " + which + " id '" + s + "'");
      }
      return v;
    };
    pair.left_id = parse_id(fields[1], "left");
    pair.right_id = parse_id(fields[2], "right");
    try {
      std::size_t used = 0;
      pair.label = std::stod(fields[3], &used);
      if (used != fields[3].size()) {
        throw std::invalid_argument("trailing characters");
      }
    } catch (const std::exception&) {
      throw Error(ErrorKind::Format,
                  where + ": invalid label '" + fields[3] + "'");
    }
    if (!std::isfinite(pair.label)) {
      throw Error(ErrorKind::Format, where + ": label must be finite");
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

void write_pairs_file(const std::filesystem::path& path,
                      std::span<const LabeledPair> pairs) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::Io, "cannot open file for writing: " + path.string());
  }
  out.precision(17);
  for (const LabeledPair& pair : pairs) {
    out << pair.subset << '\t' << pair.left_id << '\t' << pair.right_id << '\t'
        << pair.label << '\n';
  }
  if (!out) {
    throw Error(ErrorKind::Io, "cannot write file: " + path.string());
  }
}

}  // namespace chsk
