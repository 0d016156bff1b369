#include "chsk/flat_index.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "chsk/bitpack.hpp"
#include "chsk/error.hpp"

namespace chsk {

namespace {

void check_new_id(const std::unordered_set<std::uint64_t>& ids,
                  std::uint64_t id) {
  if (ids.count(id) != 0) {
    throw Error(ErrorKind::Data, "duplicate id " + std::to_string(id));
  }
}

}  // namespace

FlatIndex::FlatIndex(CodecConfig config) : config_(std::move(config)) {}

void FlatIndex::add(std::uint64_t id, std::span<const double> x) {
  check_new_id(ids_, id);
  EncodedVector code = encode(config_, x);
  entries_.push_back(Entry{id, std::move(code)});
  ids_.insert(id);
}

void FlatIndex::add(std::uint64_t id, std::span<const float> x) {
  check_new_id(ids_, id);
  EncodedVector code = encode(config_, x);
  entries_.push_back(Entry{id, std::move(code)});
  ids_.insert(id);
}

void FlatIndex::add_encoded(std::uint64_t id, EncodedVector code) {
  check_new_id(ids_, id);
  // Length and pad-bit validation; unpack_codes throws on either.
  unpack_codes(code.packed, config_.sketch_dim(), config_.bits(),
               /*strict_pad=*/true);
  if (config_.metric() == Metric::Dot && !code.norm_code) {
    throw Error(ErrorKind::Format, "missing norm code for dot-mode entry");
  }
  if (config_.metric() == Metric::Cosine && code.norm_code) {
    throw Error(ErrorKind::Format, "unexpected norm code in cosine mode");
  }
  entries_.push_back(Entry{id, std::move(code)});
  ids_.insert(id);
}

std::vector<ScoredHit> FlatIndex::topk(const QuerySketch& query,
                                       std::size_t k, ScanStats* stats) const {
  if (k == 0) {
    throw Error(ErrorKind::Usage, "top-k must be at least 1");
  }
  std::vector<ScoredHit> hits;
  hits.reserve(entries_.size());
  for (const Entry& entry : entries_) {
    hits.push_back(ScoredHit{entry.id, score(config_, query, entry.code)});
    if (stats != nullptr) {
      ++stats->score_calls;
    }
  }
  std::sort(hits.begin(), hits.end(),
            [](const ScoredHit& a, const ScoredHit& b) {
              if (a.score != b.score) {
                return a.score > b.score;
              }
              return a.id < b.id;
            });
  if (hits.size() > k) {
    hits.resize(k);
  }
  return hits;
}

std::vector<ScoredHit> FlatIndex::topk(std::span<const double> query,
                                       std::size_t k, ScanStats* stats) const {
  return topk(encode_query(config_, query), k, stats);
}

std::vector<ScoredHit> FlatIndex::topk(std::span<const float> query,
                                       std::size_t k, ScanStats* stats) const {
  return topk(encode_query(config_, query), k, stats);
}

}  // namespace chsk
