#pragma once

#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "chsk/codec.hpp"
#include "chsk/config.hpp"

namespace chsk {

struct ScoredHit {
  std::uint64_t id;
  double score;
};

// Optional observer for scan-cost assertions in tests.
struct ScanStats {
  std::uint64_t score_calls = 0;
};

// Reference exact scan over encoded vectors. Stores codes only (never the
// original vectors); adding is append-only and never changes existing
// codes. Single-writer, multi-reader: concurrent topk calls are safe, add
// must be exclusive.
class FlatIndex {
 public:
  struct Entry {
    std::uint64_t id;
    EncodedVector code;
  };

  explicit FlatIndex(CodecConfig config);

  const CodecConfig& config() const noexcept { return config_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool contains(std::uint64_t id) const { return ids_.count(id) != 0; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  // Encodes and appends. Throws on duplicate id or unencodable vector; the
  // index is unchanged on failure.
  void add(std::uint64_t id, std::span<const double> x);
  void add(std::uint64_t id, std::span<const float> x);

  // Appends an already-encoded vector after structural validation (payload
  // size, pad bits, norm-code presence). Used by the sketch file loader.
  void add_encoded(std::uint64_t id, EncodedVector code);

  // Scores every entry and returns min(k, size()) hits sorted by score
  // descending, ties broken by ascending id. Results are identical to a
  // naive loop over standalone score() calls. Requires k >= 1.
  std::vector<ScoredHit> topk(const QuerySketch& query, std::size_t k,
                              ScanStats* stats = nullptr) const;
  std::vector<ScoredHit> topk(std::span<const double> query, std::size_t k,
                              ScanStats* stats = nullptr) const;
  std::vector<ScoredHit> topk(std::span<const float> query, std::size_t k,
                              ScanStats* stats = nullptr) const;

 private:
  CodecConfig config_;
  std::vector<Entry> entries_;
  std::unordered_set<std::uint64_t> ids_;
};

}  // namespace chsk
