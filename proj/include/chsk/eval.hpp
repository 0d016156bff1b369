#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "chsk/config.hpp"

namespace chsk {

// Offline metrics harness: compares exact dense cosine scores against
// sketch scores over labeled pairs, per subset and macro-averaged.
// Convention: the left element of a pair is the query (float sketch), the
// right element is the database side (quantized). The codec is asymmetric,
// so this convention is part of the contract.

struct LabeledPair {
  std::string subset;
  std::uint64_t left_id = 0;
  std::uint64_t right_id = 0;
  double label = 0.0;
};

struct SubsetReport {
  std::string subset;
  std::size_t n_pairs = 0;
  double dense_spearman = 0.0;   // dense cosine vs labels
  double sketch_spearman = 0.0;  // sketch scores vs labels
  double spearman_loss = 0.0;    // sketch_spearman - dense_spearman
  double sketch_dense_pearson = 0.0;
  bool degenerate = false;  // correlation undefined; stats are NaN
};

struct MacroReport {
  std::size_t n_subsets = 0;  // subsets contributing to the macro average
  double dense_spearman = 0.0;
  double sketch_spearman = 0.0;
  double spearman_loss = 0.0;
  double sketch_dense_pearson = 0.0;
};

struct EvalTiming {
  double quantize_seconds = 0.0;  // encode + query-sketch stage
  double score_seconds = 0.0;     // score() stage
};

struct EvalReport {
  std::vector<SubsetReport> per_subset;  // first-appearance order
  MacroReport macro;                     // unweighted mean over subsets
  std::vector<std::string> warnings;     // degenerate subsets, etc.
  EvalTiming timing;
};

using EmbeddingMap = std::unordered_map<std::uint64_t, std::vector<float>>;

// Sample Pearson correlation, 64-bit accumulation. Throws for n < 2 or
// zero variance in either argument.
double pearson(std::span<const double> x, std::span<const double> y);

// Pearson of fractional (average-rank) rank vectors.
double spearman(std::span<const double> x, std::span<const double> y);

// 1-based ranks; ties receive the average of their positions.
std::vector<double> fractional_ranks(std::span<const double> x);

// Per-pair scores in pair order: exact dense cosine and asymmetric sketch
// score, plus stage timings.
struct PairScores {
  std::vector<double> dense;
  std::vector<double> sketch;
  EvalTiming timing;
};

PairScores score_pairs(const CodecConfig& config,
                       const EmbeddingMap& embeddings,
                       std::span<const LabeledPair> pairs);

// Statistics over precomputed score vectors. Subsets with undefined
// correlations are reported as degenerate and excluded from the macro
// averages with a warning, never imputed.
EvalReport build_report(std::span<const LabeledPair> pairs,
                        std::span<const double> dense,
                        std::span<const double> sketch,
                        EvalTiming timing = {});

EvalReport evaluate(const CodecConfig& config, const EmbeddingMap& embeddings,
                    std::span<const LabeledPair> pairs);

}  // namespace chsk
