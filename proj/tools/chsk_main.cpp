// chsk command-line tool: encode embedding files into sketch files, run
// top-k queries against them, evaluate sketch fidelity over labeled pairs,
// and print storage profiles.

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "chsk/codec.hpp"
#include "chsk/config.hpp"
#include "chsk/error.hpp"
#include "chsk/eval.hpp"
#include "chsk/flat_index.hpp"
#include "chsk/io.hpp"
#include "chsk/report.hpp"

namespace {

using namespace chsk;

struct ConfigCli {
  CodecParams params;
  std::string metric = "cosine";
  CLI::Option* dim_opt = nullptr;
};

void add_config_flags(CLI::App* cmd, ConfigCli& cfg) {
  cfg.dim_opt = cmd->add_option("--dim", cfg.params.dim, "input dimension");
  cmd->add_option("--sketch-dim", cfg.params.sketch_dim, "sketch dimension");
  cmd->add_option("--bits", cfg.params.bits, "bits per sketch coordinate");
  cmd->add_option("--sparsity", cfg.params.sparsity,
                  "hash updates per input coordinate");
  cmd->add_option("--clip", cfg.params.clip, "symmetric clip range");
  cmd->add_option("--metric", cfg.metric, "similarity metric (cosine|dot)")
      ->check(CLI::IsMember({"cosine", "dot"}));
  cmd->add_option("--seed", cfg.params.seed, "codec seed");
  cmd->add_option("--lmin", cfg.params.log_norm_min,
                  "log2-norm lower clip bound (dot mode)");
  cmd->add_option("--lmax", cfg.params.log_norm_max,
                  "log2-norm upper clip bound (dot mode)");
}

CodecParams resolve_params(const ConfigCli& cfg) {
  CodecParams p = cfg.params;
  p.metric = cfg.metric == "dot" ? Metric::Dot : Metric::Cosine;
  return p;
}

// Applies the file's dimension, rejecting a conflicting --dim flag.
CodecParams resolve_params(const ConfigCli& cfg, std::uint32_t file_dim) {
  CodecParams p = resolve_params(cfg);
  if (cfg.dim_opt->count() > 0 && p.dim != file_dim) {
    throw Error(ErrorKind::Config,
                "--dim " + std::to_string(p.dim) +
                    " does not match embedding file dimension " +
                    std::to_string(file_dim));
  }
  p.dim = file_dim;
  return p;
}

double dense_ratio(const CodecConfig& config) {
  return static_cast<double>(config.code_size_bytes()) /
         (4.0 * static_cast<double>(config.dim()));
}

void print_storage(const CodecConfig& config) {
  std::printf("bytes_per_vector: %zu\n", config.code_size_bytes());
  std::printf("ratio_vs_dense_f32: %g\n", dense_ratio(config));
}

int cmd_encode(const std::string& input, const std::string& output,
               const ConfigCli& cfg) {
  const EmbeddingFileData data = read_embedding_file(input);
  const CodecConfig config =
      CodecConfig::validated(resolve_params(cfg, data.dim));
  FlatIndex index(config);
  for (const EmbeddingRecord& rec : data.records) {
    try {
      index.add(rec.id, std::span<const float>(rec.values));
    } catch (const Error& e) {
      throw Error(e.kind(),
                  "vector id " + std::to_string(rec.id) + ": " + e.what());
    }
  }
  save_index(index, output);
  std::printf("count: %zu\n", index.size());
  print_storage(config);
  return 0;
}

void print_hits(const std::vector<ScoredHit>& hits) {
  for (std::size_t rank = 0; rank < hits.size(); ++rank) {
    std::printf("%zu %llu %.6f\n", rank + 1,
                static_cast<unsigned long long>(hits[rank].id),
                hits[rank].score);
  }
}

std::vector<double> parse_inline_values(const std::string& csv) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= csv.size()) {
    std::size_t comma = csv.find(',', start);
    if (comma == std::string::npos) {
      comma = csv.size();
    }
    const std::string field = csv.substr(start, comma - start);
    try {
      std::size_t used = 0;
      const double v = std::stod(field, &used);
      while (used < field.size() &&
             std::isspace(static_cast<unsigned char>(field[used]))) {
        ++used;
      }
      if (used != field.size()) {
        throw std::invalid_argument("trailing characters");
      }
      values.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Usage, "invalid query value '" + field + "'");
    }
    start = comma + 1;
  }
  return values;
}

int cmd_topk(const std::string& index_path, const std::string& query_path,
             const std::string& inline_values, std::size_t k) {
  if (k == 0) {
    throw Error(ErrorKind::Usage, "--top-k must be at least 1");
  }
  const FlatIndex index = load_index(index_path);
  const std::uint32_t dim = index.config().dim();

  if (!inline_values.empty()) {
    const std::vector<double> query = parse_inline_values(inline_values);
    if (query.size() != dim) {
      throw Error(ErrorKind::Data,
                  "query dimension " + std::to_string(query.size()) +
                      " does not match index dimension " +
                      std::to_string(dim));
    }
    print_hits(index.topk(std::span<const double>(query), k));
    return 0;
  }

  const EmbeddingFileData data = read_embedding_file(query_path);
  if (data.dim != dim) {
    throw Error(ErrorKind::Data,
                "query dimension " + std::to_string(data.dim) +
                    " does not match index dimension " + std::to_string(dim));
  }
  for (const EmbeddingRecord& rec : data.records) {
    std::printf("query %llu\n", static_cast<unsigned long long>(rec.id));
    print_hits(index.topk(std::span<const float>(rec.values), k));
  }
  return 0;
}

int cmd_eval(const std::string& embeddings_path, const std::string& pairs_path,
             const std::string& report_path, const ConfigCli& cfg) {
  const EmbeddingFileData data = read_embedding_file(embeddings_path);
  const EmbeddingMap map = to_embedding_map(data);
  const std::vector<LabeledPair> pairs = read_pairs_file(pairs_path);
  const CodecConfig config =
      CodecConfig::validated(resolve_params(cfg, data.dim));

  const EvalReport report = evaluate(config, map, pairs);
  std::fputs(eval_report_text(report).c_str(), stdout);

  if (!report_path.empty()) {
    std::ofstream out(report_path, std::ios::trunc);
    if (!out) {
      throw Error(ErrorKind::Io,
                  "cannot open file for writing: " + report_path);
    }
    out << eval_report_json(config, report).dump(2) << "\n";
    if (!out) {
      throw Error(ErrorKind::Io, "cannot write file: " + report_path);
    }
  }
  return 0;
}

int cmd_info(const ConfigCli& cfg) {
  const CodecConfig config = CodecConfig::validated(resolve_params(cfg));
  std::printf("metric: %s\n", metric_name(config.metric()));
  std::printf("dim: %u\n", config.dim());
  std::printf("sketch_dim: %u\n", config.sketch_dim());
  std::printf("bits: %u\n", config.bits());
  std::printf("sparsity: %u\n", config.sparsity());
  std::printf("clip: %g\n", config.clip());
  std::printf("seed: %llu\n", static_cast<unsigned long long>(config.seed()));
  if (config.metric() == Metric::Dot) {
    std::printf("log_norm_min: %g\n", config.log_norm_min());
    std::printf("log_norm_max: %g\n", config.log_norm_max());
  }
  print_storage(config);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compact hashed sketch codec for dense embeddings"};
  app.require_subcommand(1);

  ConfigCli encode_cfg;
  std::string encode_input;
  std::string encode_output;
  CLI::App* encode = app.add_subcommand(
      "encode", "encode an embedding file into a sketch file");
  encode->add_option("-i,--input", encode_input, "embedding file (CHEV)")
      ->required();
  encode->add_option("-o,--output", encode_output, "sketch file to write")
      ->required();
  add_config_flags(encode, encode_cfg);

  std::string topk_index;
  std::string topk_query;
  std::string topk_values;
  std::size_t topk_k = 10;
  CLI::App* topk =
      app.add_subcommand("topk", "rank sketch-file entries against a query");
  topk->add_option("--index", topk_index, "sketch file (CHSK)")->required();
  CLI::Option* q_opt =
      topk->add_option("--query", topk_query, "query embedding file (CHEV)");
  CLI::Option* v_opt = topk->add_option(
      "--values", topk_values, "inline query vector, comma-separated");
  q_opt->excludes(v_opt);
  topk->add_option("-k,--top-k", topk_k, "number of hits to print");

  ConfigCli eval_cfg;
  std::string eval_embeddings;
  std::string eval_pairs;
  std::string eval_report;
  CLI::App* eval = app.add_subcommand(
      "eval", "compare dense cosine and sketch scores over labeled pairs");
  eval->add_option("--embeddings", eval_embeddings, "embedding file (CHEV)")
      ->required();
  eval->add_option("--pairs", eval_pairs, "labeled pairs file (TSV)")
      ->required();
  eval->add_option("--report", eval_report, "write a JSON report here");
  add_config_flags(eval, eval_cfg);

  ConfigCli info_cfg;
  CLI::App* info =
      app.add_subcommand("info", "print the storage profile for a config");
  add_config_flags(info, info_cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (app.got_subcommand(encode)) {
      return cmd_encode(encode_input, encode_output, encode_cfg);
    }
    if (app.got_subcommand(topk)) {
      if (topk_query.empty() && topk_values.empty()) {
        throw Error(ErrorKind::Usage, "topk needs --query or --values");
      }
      return cmd_topk(topk_index, topk_query, topk_values, topk_k);
    }
    if (app.got_subcommand(eval)) {
      return cmd_eval(eval_embeddings, eval_pairs, eval_report, eval_cfg);
    }
    if (app.got_subcommand(info)) {
      return cmd_info(info_cfg);
    }
  } catch (const chsk::Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", error_kind_name(e.kind()),
                 e.what());
    return e.kind() == ErrorKind::Usage ? 2 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
