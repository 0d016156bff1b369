#include "chsk/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "chsk/codec.hpp"
#include "chsk/error.hpp"

namespace chsk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double clamp_corr(double r) { return std::min(std::max(r, -1.0), 1.0); }

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

double dense_cosine(std::span<const float> a, std::span<const float> b) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i];
    const double y = b[i];
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::Data, "correlation inputs differ in length");
  }
  const std::size_t n = x.size();
  if (n < 2) {
    throw Error(ErrorKind::Data, "correlation needs at least 2 points");
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorKind::Data, "undefined correlation: zero variance");
  }
  return clamp_corr(sxy / std::sqrt(sxx * syy));
}

std::vector<double> fractional_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&x](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) {
      ++j;
    }
    // 1-based average rank over the tie run [i, j].
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) {
      ranks[order[t]] = avg;
    }
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::Data, "correlation inputs differ in length");
  }
  const std::vector<double> rx = fractional_ranks(x);
  const std::vector<double> ry = fractional_ranks(y);
  return pearson(rx, ry);
}

PairScores score_pairs(const CodecConfig& config,
                       const EmbeddingMap& embeddings,
                       std::span<const LabeledPair> pairs) {
  auto lookup = [&](std::uint64_t id) -> const std::vector<float>& {
    const auto it = embeddings.find(id);
    if (it == embeddings.end()) {
      throw Error(ErrorKind::Data, "missing embedding id " + std::to_string(id));
    }
    if (it->second.size() != config.dim()) {
      throw Error(ErrorKind::Data,
                  "embedding id " + std::to_string(id) + " has dimension " +
                      std::to_string(it->second.size()) + ", expected " +
                      std::to_string(config.dim()));
    }
    return it->second;
  };

  PairScores out;
  out.dense.reserve(pairs.size());
  out.sketch.reserve(pairs.size());

  // Quantize stage: one stored code per unique database (right) id and one
  // float sketch per unique query (left) id.
  std::unordered_map<std::uint64_t, EncodedVector> codes;
  std::unordered_map<std::uint64_t, QuerySketch> queries;
  const auto quantize_start = std::chrono::steady_clock::now();
  for (const LabeledPair& pair : pairs) {
    try {
      if (codes.find(pair.right_id) == codes.end()) {
        codes.emplace(pair.right_id,
                      encode(config, std::span<const float>(lookup(pair.right_id))));
      }
      if (queries.find(pair.left_id) == queries.end()) {
        queries.emplace(pair.left_id,
                        encode_query(config, std::span<const float>(lookup(pair.left_id))));
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Data &&
          std::string(e.what()).find("unencodable") != std::string::npos) {
        throw Error(e.kind(), std::string(e.what()) + " (pair " + pair.subset +
                                  " " + std::to_string(pair.left_id) + "/" +
                                  std::to_string(pair.right_id) + ")");
      }
      throw;
    }
  }
  out.timing.quantize_seconds = elapsed_seconds(quantize_start);

  for (const LabeledPair& pair : pairs) {
    out.dense.push_back(
        dense_cosine(lookup(pair.left_id), lookup(pair.right_id)));
  }

  const auto score_start = std::chrono::steady_clock::now();
  for (const LabeledPair& pair : pairs) {
    out.sketch.push_back(
        score(config, queries.at(pair.left_id), codes.at(pair.right_id)));
  }
  out.timing.score_seconds = elapsed_seconds(score_start);
  return out;
}

EvalReport build_report(std::span<const LabeledPair> pairs,
                        std::span<const double> dense,
                        std::span<const double> sketch, EvalTiming timing) {
  if (dense.size() != pairs.size() || sketch.size() != pairs.size()) {
    throw Error(ErrorKind::Data, "score vectors do not match pair count");
  }

  // Group pair indices by subset in first-appearance order.
  std::vector<std::string> subset_order;
  std::unordered_map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto [it, inserted] = groups.try_emplace(pairs[i].subset);
    if (inserted) {
      subset_order.push_back(pairs[i].subset);
    }
    it->second.push_back(i);
  }

  EvalReport report;
  report.timing = timing;
  double sum_dense = 0.0;
  double sum_sketch = 0.0;
  double sum_loss = 0.0;
  double sum_sd = 0.0;
  std::size_t n_valid = 0;

  for (const std::string& name : subset_order) {
    const std::vector<std::size_t>& idx = groups[name];
    SubsetReport sub;
    sub.subset = name;
    sub.n_pairs = idx.size();

    std::vector<double> d(idx.size());
    std::vector<double> s(idx.size());
    std::vector<double> labels(idx.size());
    for (std::size_t t = 0; t < idx.size(); ++t) {
      d[t] = dense[idx[t]];
      s[t] = sketch[idx[t]];
      labels[t] = pairs[idx[t]].label;
    }

    try {
      sub.dense_spearman = spearman(d, labels);
      sub.sketch_spearman = spearman(s, labels);
      sub.spearman_loss = sub.sketch_spearman - sub.dense_spearman;
      sub.sketch_dense_pearson = pearson(s, d);
    } catch (const Error& e) {
      sub.degenerate = true;
      sub.dense_spearman = kNaN;
      sub.sketch_spearman = kNaN;
      sub.spearman_loss = kNaN;
      sub.sketch_dense_pearson = kNaN;
      report.warnings.push_back("subset " + name +
                                " excluded from macro: " + e.what());
    }

    if (!sub.degenerate) {
      sum_dense += sub.dense_spearman;
      sum_sketch += sub.sketch_spearman;
      sum_loss += sub.spearman_loss;
      sum_sd += sub.sketch_dense_pearson;
      ++n_valid;
    }
    report.per_subset.push_back(std::move(sub));
  }

  report.macro.n_subsets = n_valid;
  if (n_valid > 0) {
    const auto denom = static_cast<double>(n_valid);
    report.macro.dense_spearman = sum_dense / denom;
    report.macro.sketch_spearman = sum_sketch / denom;
    report.macro.spearman_loss = sum_loss / denom;
    report.macro.sketch_dense_pearson = sum_sd / denom;
  } else {
    report.macro.dense_spearman = kNaN;
    report.macro.sketch_spearman = kNaN;
    report.macro.spearman_loss = kNaN;
    report.macro.sketch_dense_pearson = kNaN;
    report.warnings.push_back("no subset with defined statistics");
  }
  return report;
}

EvalReport evaluate(const CodecConfig& config, const EmbeddingMap& embeddings,
                    std::span<const LabeledPair> pairs) {
  const PairScores scores = score_pairs(config, embeddings, pairs);
  return build_report(pairs, scores.dense, scores.sketch, scores.timing);
}

}  // namespace chsk
