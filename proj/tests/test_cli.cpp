// End-to-end tests driving the chsk binary as a child process. The binary
// path comes from argv[1] (wired up by CMake) or the CHSK_BIN environment
// variable.

#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "chsk/io.hpp"

#include "support/test_support.hpp"

using namespace chsk;
using namespace chsk::testing;

namespace {

std::string g_bin;

struct CmdResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CmdResult run_chsk(const TempDir& dir, const std::string& args) {
  const auto out_path = dir.file("cmd_stdout.txt");
  const auto err_path = dir.file("cmd_stderr.txt");
  const std::string cmd = "\"" + g_bin + "\" " + args + " > \"" +
                          out_path.string() + "\" 2> \"" + err_path.string() +
                          "\"";
  const int status = std::system(cmd.c_str());
  CmdResult result;
#if defined(_WIN32)
  result.exit_code = status;
#else
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
#endif
  result.out = read_text(out_path);
  result.err = read_text(err_path);
  return result;
}

std::vector<EmbeddingRecord> random_records(TestRng& rng, std::size_t n,
                                            std::uint32_t dim,
                                            std::uint64_t first_id = 1) {
  std::vector<EmbeddingRecord> records(n);
  for (std::size_t i = 0; i < n; ++i) {
    records[i].id = first_id + i;
    records[i].values = to_floats(rng.gaussian_vector(dim));
  }
  return records;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("encode reports count, bytes per vector, and ratio") {
  TempDir dir("cli_encode");
  TestRng rng(701);
  write_embedding_file(dir.file("emb"), 384, random_records(rng, 20, 384));
  const CmdResult r = run_chsk(
      dir, "encode -i \"" + dir.file("emb").string() + "\" -o \"" +
               dir.file("idx").string() + "\"");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "count: 20"));
  CHECK(contains(r.out, "bytes_per_vector: 48"));
  CHECK(contains(r.out, "ratio_vs_dense_f32: 0.03125"));

  const FlatIndex index = load_index(dir.file("idx"));
  CHECK(index.size() == 20);
  CHECK(index.config().dim() == 384);
}

TEST_CASE("two encode processes produce byte-identical sketch files") {
  TempDir dir("cli_determinism");
  TestRng rng(711);
  write_embedding_file(dir.file("emb"), 64,
                       random_records(rng, 30, 64));
  const std::string flags =
      " --sketch-dim 32 --bits 5 --sparsity 3 --seed 99 --metric dot";
  const CmdResult a = run_chsk(
      dir, "encode -i \"" + dir.file("emb").string() + "\" -o \"" +
               dir.file("idx_a").string() + "\"" + flags);
  const CmdResult b = run_chsk(
      dir, "encode -i \"" + dir.file("emb").string() + "\" -o \"" +
               dir.file("idx_b").string() + "\"" + flags);
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  const std::string bytes_a = read_text(dir.file("idx_a"));
  const std::string bytes_b = read_text(dir.file("idx_b"));
  CHECK(bytes_a == bytes_b);
  CHECK_FALSE(bytes_a.empty());
}

TEST_CASE("empty embedding files encode to empty sketch files") {
  TempDir dir("cli_empty");
  write_embedding_file(dir.file("emb"), 16, {});
  const CmdResult r = run_chsk(
      dir, "encode -i \"" + dir.file("emb").string() + "\" -o \"" +
               dir.file("idx").string() + "\" --sketch-dim 8");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "count: 0"));
  CHECK(load_index(dir.file("idx")).size() == 0);
}

TEST_CASE("vectors with non-finite values abort encode with the id named") {
  TempDir dir("cli_nan");
  TestRng rng(721);
  auto records = random_records(rng, 6, 16);
  records[3].values[5] = std::numeric_limits<float>::quiet_NaN();
  write_embedding_file(dir.file("emb"), 16, records);
  const CmdResult r = run_chsk(
      dir, "encode -i \"" + dir.file("emb").string() + "\" -o \"" +
               dir.file("idx").string() + "\" --sketch-dim 8");
  CHECK(r.exit_code != 0);
  CHECK(contains(r.err, "error (data)"));
  CHECK(contains(r.err, "vector id 4"));
  CHECK(contains(r.err, "unencodable"));
}

TEST_CASE("mismatched --dim flag is a config error") {
  TempDir dir("cli_dim");
  TestRng rng(731);
  write_embedding_file(dir.file("emb"), 16, random_records(rng, 2, 16));
  const CmdResult r = run_chsk(
      dir, "encode -i \"" + dir.file("emb").string() + "\" -o \"" +
               dir.file("idx").string() + "\" --dim 32");
  CHECK(r.exit_code != 0);
  CHECK(contains(r.err, "error (config)"));
  CHECK(contains(r.err, "does not match embedding file dimension"));
}

TEST_CASE("topk ranks a stored vector first for its own query") {
  TempDir dir("cli_topk");
  TestRng rng(741);
  auto records = random_records(rng, 12, 384);
  write_embedding_file(dir.file("emb"), 384, records);
  REQUIRE(run_chsk(dir, "encode -i \"" + dir.file("emb").string() +
                            "\" -o \"" + dir.file("idx").string() + "\"")
              .exit_code == 0);

  const std::vector<EmbeddingRecord> one_query{records[7]};
  write_embedding_file(dir.file("query"), 384, one_query);
  const CmdResult r = run_chsk(
      dir, "topk --index \"" + dir.file("idx").string() + "\" --query \"" +
               dir.file("query").string() + "\" --top-k 3");
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "query 8");
  std::size_t rank = 0;
  std::uint64_t id = 0;
  double score_value = 0.0;
  lines >> rank >> id >> score_value;
  CHECK(rank == 1);
  CHECK(id == 8);
  CHECK(score_value > 0.8);
  CHECK(score_value < 1.2);
}

TEST_CASE("topk accepts inline query values") {
  TempDir dir("cli_inline");
  TestRng rng(751);
  write_embedding_file(dir.file("emb"), 4, random_records(rng, 5, 4));
  REQUIRE(run_chsk(dir, "encode -i \"" + dir.file("emb").string() +
                            "\" -o \"" + dir.file("idx").string() +
                            "\" --sketch-dim 8 --sparsity 2")
              .exit_code == 0);
  const CmdResult r =
      run_chsk(dir, "topk --index \"" + dir.file("idx").string() +
                        "\" --values \"1,0,-0.5,0.25\" --top-k 2");
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string first;
  std::getline(lines, first);
  CHECK(first.rfind("1 ", 0) == 0);  // rank 1, no query header for inline

  const CmdResult short_query =
      run_chsk(dir, "topk --index \"" + dir.file("idx").string() +
                        "\" --values \"1,0\"");
  CHECK(short_query.exit_code != 0);
  CHECK(contains(short_query.err, "does not match index dimension"));
}

TEST_CASE("topk rejects k of zero and corrupt files") {
  TempDir dir("cli_topk_err");
  TestRng rng(761);
  write_embedding_file(dir.file("emb"), 8, random_records(rng, 3, 8));
  REQUIRE(run_chsk(dir, "encode -i \"" + dir.file("emb").string() +
                            "\" -o \"" + dir.file("idx").string() +
                            "\" --sketch-dim 4")
              .exit_code == 0);

  const CmdResult zero_k =
      run_chsk(dir, "topk --index \"" + dir.file("idx").string() +
                        "\" --values \"1,0,0,0,0,0,0,0\" --top-k 0");
  CHECK(zero_k.exit_code == 2);
  CHECK(contains(zero_k.err, "error (usage)"));

  // Tamper with the magic.
  auto bytes = read_text(dir.file("idx"));
  bytes[1] = 'Z';
  std::ofstream(dir.file("bad_idx"), std::ios::binary) << bytes;
  const CmdResult bad = run_chsk(
      dir, "topk --index \"" + dir.file("bad_idx").string() +
               "\" --values \"1,0,0,0,0,0,0,0\"");
  CHECK(bad.exit_code != 0);
  CHECK(contains(bad.err, "not a sketch file"));

  const CmdResult mismatch = run_chsk(
      dir, "topk --index \"" + dir.file("idx").string() +
               "\" --values \"1,0\"");
  CHECK(mismatch.exit_code != 0);
  CHECK(contains(mismatch.err, "error (data)"));
}

TEST_CASE("info prints the storage profile") {
  TempDir dir("cli_info");
  const CmdResult r = run_chsk(dir, "info");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.out, "metric: cosine"));
  CHECK(contains(r.out, "bytes_per_vector: 48"));
  CHECK(contains(r.out, "ratio_vs_dense_f32: 0.03125"));

  const CmdResult dot = run_chsk(dir, "info --metric dot");
  CHECK(contains(dot.out, "bytes_per_vector: 50"));

  const CmdResult bad = run_chsk(dir, "info --bits 17");
  CHECK(bad.exit_code == 1);
  CHECK(contains(bad.err, "error (config): bits out of range"));
}

TEST_CASE("eval writes a schema-stable report") {
  TempDir dir("cli_eval");
  TestRng rng(771);
  const std::uint32_t dim = 32;
  auto records = random_records(rng, 20, dim);
  write_embedding_file(dir.file("emb"), dim, records);

  std::vector<LabeledPair> pairs;
  for (std::size_t i = 0; i + 1 < records.size(); i += 2) {
    LabeledPair pair;
    pair.subset = i % 4 == 0 ? "alpha" : "beta";
    pair.left_id = records[i].id;
    pair.right_id = records[i + 1].id;
    const std::vector<double> left(records[i].values.begin(),
                                   records[i].values.end());
    const std::vector<double> right(records[i + 1].values.begin(),
                                    records[i + 1].values.end());
    pair.label = exact_cosine(left, right);
    pairs.push_back(pair);
  }
  write_pairs_file(dir.file("pairs.tsv"), pairs);

  const CmdResult r = run_chsk(
      dir, "eval --embeddings \"" + dir.file("emb").string() +
               "\" --pairs \"" + dir.file("pairs.tsv").string() +
               "\" --report \"" + dir.file("report.json").string() +
               "\" --sketch-dim 16 --sparsity 2");
  REQUIRE(r.exit_code == 0);
  CHECK(contains(r.out, "subset alpha:"));
  CHECK(contains(r.out, "subset beta:"));
  CHECK(contains(r.out, "macro:"));
  // Labels equal dense cosine, so dense spearman is exactly 1.
  CHECK(contains(r.out, "dense_spearman=1.000000"));

  const nlohmann::json report =
      nlohmann::json::parse(read_text(dir.file("report.json")));
  CHECK(report["schema"] == "chsk-eval-report-v1");
  CHECK(report["config"]["sketch_dim"] == 16);
  CHECK(report["subsets"].size() == 2);
  CHECK(report["macro"]["dense_spearman"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("usage errors are reported") {
  TempDir dir("cli_usage");
  const CmdResult none = run_chsk(dir, "");
  CHECK(none.exit_code != 0);
  const CmdResult unknown = run_chsk(dir, "info --not-a-flag");
  CHECK(unknown.exit_code != 0);
  const CmdResult missing = run_chsk(dir, "topk");
  CHECK(missing.exit_code != 0);
}

int main(int argc, char** argv) {
  std::vector<char*> doctest_args;
  doctest_args.push_back(argv[0]);
  int start = 1;
  if (argc > 1 && argv[1][0] != '-') {
    g_bin = argv[1];
    start = 2;
  } else if (const char* env = std::getenv("CHSK_BIN")) {
    g_bin = env;
  }
  for (int i = start; i < argc; ++i) {
    doctest_args.push_back(argv[i]);
  }
  if (g_bin.empty()) {
    std::fprintf(stderr,
                 "test_cli: pass the chsk binary path as the first argument "
                 "or set CHSK_BIN\n");
    return 1;
  }
  doctest::Context context(static_cast<int>(doctest_args.size()),
                           doctest_args.data());
  return context.run();
}
