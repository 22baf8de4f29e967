// End-to-end checks of the command-line binary (path injected as HINWALK_BIN).
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hinwalk/eval.hpp"
#include "hinwalk/walker.hpp"

using namespace hinwalk;
namespace fs = std::filesystem;

namespace {

struct CliFixture {
  fs::path dir;

  CliFixture() {
    dir = fs::temp_directory_path() / ("hinwalk_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::ofstream nodes(file("toy.nodes"));
    nodes << "a1\tA\na2\tA\np1\tP\np2\tP\nv1\tV\n";
    std::ofstream edges(file("toy.edges"));
    edges << "a1\tp1\na2\tp1\na2\tp2\np1\tv1\np2\tv1\n";
    std::ofstream schema(file("schema.spec"));
    schema << "type A 0.4\ntype P 0.4\ntype V 0.2\nedge A P\nedge P V\n";
  }
  ~CliFixture() { fs::remove_all(dir); }

  std::string file(const std::string& name) const { return (dir / name).string(); }

  int run(const std::string& args, std::string* output = nullptr) const {
    const std::string log = file("out.log");
    const std::string cmd =
        std::string(HINWALK_BIN) + " " + args + " >" + log + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (output) {
      std::ifstream in(log);
      std::stringstream ss;
      ss << in.rdbuf();
      *output = ss.str();
    }
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string slurp(const std::string& name) const {
    std::ifstream in(file(name));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
};

}  // namespace

TEST_CASE("missing graph files exit with code 2 naming the path") {
  CliFixture cli;
  std::string out;
  const int code = cli.run("walk --nodes " + cli.file("absent.nodes") +
                               " --edges " + cli.file("toy.edges") +
                               " --metapath A-P-V-P-A -o " + cli.file("c.txt"),
                           &out);
  CHECK(code == 2);
  CHECK(out.find("absent.nodes") != std::string::npos);
}

TEST_CASE("usage errors exit with code 2") {
  CliFixture cli;
  CHECK(cli.run("walk") == 2);
  CHECK(cli.run("no-such-command") == 2);
  CHECK(cli.run("--help") == 0);
}

TEST_CASE("walk writes a corpus and stats sidecar") {
  CliFixture cli;
  std::string out;
  const int code = cli.run(
      "walk --nodes " + cli.file("toy.nodes") + " --edges " +
          cli.file("toy.edges") +
          " --mode markovian --metapath A-P-V-P-A -t 2 -l 8 --seed 7 -o " +
          cli.file("corpus.txt") + " --stats " + cli.file("corpus.stats"),
      &out);
  CHECK(code == 0);
  CHECK(out.find("seed=7") != std::string::npos);
  const auto corpus = cli.slurp("corpus.txt");
  CHECK(corpus.find("a1 p1 v1") == 0);
  CHECK(cli.slurp("corpus.stats").find("walks=4") != std::string::npos);
}

TEST_CASE("markovian and spacey corpora share type statistics at alpha zero") {
  CliFixture cli;
  REQUIRE(cli.run("walk --nodes " + cli.file("toy.nodes") + " --edges " +
                  cli.file("toy.edges") +
                  " --mode markovian --alpha 0 --metapath A-P-V-P-A -t 50 -l "
                  "200 --seed 3 -o " +
                  cli.file("m.txt")) == 0);
  REQUIRE(cli.run("walk --nodes " + cli.file("toy.nodes") + " --edges " +
                  cli.file("toy.edges") +
                  " --mode metapath --alpha 0 --metapath A-P-V-P-A -t 50 -l "
                  "200 --seed 4 -o " +
                  cli.file("s.txt")) == 0);
  auto g = load_graph(cli.file("toy.nodes"), cli.file("toy.edges"));
  auto cm = read_corpus(g, cli.file("m.txt"));
  auto cs = read_corpus(g, cli.file("s.txt"));
  const std::size_t tc = g.type_count();
  std::vector<std::uint64_t> tm(tc * tc, 0), ts(tc * tc, 0);
  auto count = [&](const Corpus& c, std::vector<std::uint64_t>& t) {
    for (const auto& p : c.paths)
      for (std::size_t i = 1; i < p.size(); ++i)
        t[g.node_type(p[i - 1]) * tc + g.node_type(p[i])]++;
  };
  count(cm, tm);
  count(cs, ts);
  CHECK(chi_square_homogeneity(tm, ts).p > 0.01);
}

TEST_CASE("embed produces embeddings and phase timings") {
  CliFixture cli;
  std::string out;
  const int code = cli.run(
      "embed --nodes " + cli.file("toy.nodes") + " --edges " +
          cli.file("toy.edges") +
          " --metapath A-P-V-P-A -t 3 -l 20 -d 8 -w 2 --seed 5 -o " +
          cli.file("emb.txt") + " --binary-out " + cli.file("emb.bin"),
      &out);
  CHECK(code == 0);
  CHECK(out.find("phase=walk") != std::string::npos);
  CHECK(out.find("phase=train") != std::string::npos);
  auto emb = read_embeddings_text(cli.file("emb.txt"));
  CHECK(emb.dim == 8);
  CHECK(emb.names.size() == 5);  // toy graph is fully reachable
  CHECK(fs::exists(cli.file("emb.bin")));
  CHECK(fs::exists(cli.file("emb.bin.index")));
}

TEST_CASE("train consumes a corpus written by walk") {
  CliFixture cli;
  REQUIRE(cli.run("walk --nodes " + cli.file("toy.nodes") + " --edges " +
                  cli.file("toy.edges") +
                  " --metapath A-P-V-P-A -t 2 -l 12 --seed 2 -o " +
                  cli.file("c2.txt")) == 0);
  std::string out;
  const int code = cli.run("train --nodes " + cli.file("toy.nodes") +
                               " --edges " + cli.file("toy.edges") +
                               " --corpus " + cli.file("c2.txt") +
                               " -d 4 -w 2 --seed 2 -o " + cli.file("e2.txt"),
                           &out);
  CHECK(code == 0);
  CHECK(read_embeddings_text(cli.file("e2.txt")).dim == 4);
}

TEST_CASE("synth emits deterministic graph files and labels") {
  CliFixture cli;
  std::string out;
  const int code = cli.run("synth --schema " + cli.file("schema.spec") +
                               " --sizes 300 --avg-degree 6 --communities 3"
                               " --seed 11 --out-prefix " +
                               cli.file("syn"),
                           &out);
  CHECK(code == 0);
  auto g = load_graph(cli.file("syn_300.nodes"), cli.file("syn_300.edges"));
  CHECK(g.node_count() == 300);
  const double avg = 2.0 * g.edge_count() / g.node_count();
  CHECK(avg > 5.4);
  CHECK(avg < 6.6);
  CHECK(fs::exists(cli.file("syn_300.labels")));

  REQUIRE(cli.run("synth --schema " + cli.file("schema.spec") +
                  " --sizes 300 --avg-degree 6 --communities 3 --seed 11 "
                  "--out-prefix " +
                  cli.file("syn_b")) == 0);
  CHECK(cli.slurp("syn_300.edges") == cli.slurp("syn_b_300.edges"));
}

TEST_CASE("eval-classify reports f1 statistics") {
  CliFixture cli;
  REQUIRE(cli.run("synth --schema " + cli.file("schema.spec") +
                  " --sizes 400 --avg-degree 8 --communities 2 --seed 9 "
                  "--out-prefix " +
                  cli.file("cg")) == 0);
  REQUIRE(cli.run("embed --nodes " + cli.file("cg_400.nodes") + " --edges " +
                  cli.file("cg_400.edges") +
                  " --metapath A-P-V-P-A -t 4 -l 40 -d 16 -w 4 --seed 5 -o " +
                  cli.file("cg.emb")) == 0);
  std::string out;
  const int code = cli.run(
      "eval-classify --nodes " + cli.file("cg_400.nodes") + " --edges " +
          cli.file("cg_400.edges") + " --emb " + cli.file("cg.emb") +
          " --labels " + cli.file("cg_400.labels") +
          " --types A --repeats 3 --seed 5 --report " + cli.file("cg.report"),
      &out);
  CHECK(code == 0);
  CHECK(out.find("micro_f1_mean=") != std::string::npos);
  CHECK(fs::exists(cli.file("cg.report")));
}

TEST_CASE("verify-stationary passes at sane tolerance and fails at zero") {
  CliFixture cli;
  std::string out;
  const std::string base = "verify-stationary --nodes " + cli.file("toy.nodes") +
                           " --edges " + cli.file("toy.edges") +
                           " --metapath A-P-V-P-A --steps 300000 --seed 2";
  CHECK(cli.run(base + " --tol 0.1", &out) == 0);
  CHECK(out.find("verdict=pass") != std::string::npos);
  CHECK(out.find("fixed_point_residual=") != std::string::npos);

  CHECK(cli.run(base + " --tol 0", &out) == 1);
  CHECK(out.find("verdict=fail") != std::string::npos);
}

TEST_CASE("verify-stationary rejects oversized graphs") {
  CliFixture cli;
  // 300 nodes exceeds the dense-oracle cap.
  REQUIRE(cli.run("synth --schema " + cli.file("schema.spec") +
                  " --sizes 300 --avg-degree 6 --seed 4 --out-prefix " +
                  cli.file("big")) == 0);
  std::string out;
  const int code = cli.run("verify-stationary --nodes " + cli.file("big_300.nodes") +
                               " --edges " + cli.file("big_300.edges") +
                               " --metapath A-P-V-P-A",
                           &out);
  CHECK(code == 2);
  CHECK(out.find("too large") != std::string::npos);
}

TEST_CASE("eval-lp reports per-operator auc") {
  CliFixture cli;
  REQUIRE(cli.run("synth --schema " + cli.file("schema.spec") +
                  " --sizes 300 --avg-degree 8 --seed 21 --out-prefix " +
                  cli.file("lp")) == 0);
  std::string out;
  const int code = cli.run(
      "eval-lp --nodes " + cli.file("lp_300.nodes") + " --edges " +
          cli.file("lp_300.edges") +
          " --edge-type A:P --metapath A-P-A -t 3 -l 20 -d 8 -w 3 "
          "--repeats 1 --seed 3 --sample 64 --report " +
          cli.file("lp.report"),
      &out);
  CHECK(code == 0);
  CHECK(out.find("auc_hadamard=") != std::string::npos);
  CHECK(out.find("auc_mean=") != std::string::npos);
}

TEST_CASE("sweep emits one row per value") {
  CliFixture cli;
  REQUIRE(cli.run("synth --schema " + cli.file("schema.spec") +
                  " --sizes 200 --avg-degree 8 --communities 2 --seed 13 "
                  "--out-prefix " +
                  cli.file("sw")) == 0);
  std::string out;
  const int code = cli.run(
      "sweep --nodes " + cli.file("sw_200.nodes") + " --edges " +
          cli.file("sw_200.edges") + " --labels " + cli.file("sw_200.labels") +
          " --metapath A-P-A --axis alpha --values 0 0.8 -t 2 -l 12 -d 8 -w 3 "
          "--repeats 2 --seed 6 --report " +
          cli.file("sweep.tsv"),
      &out);
  CHECK(code == 0);
  // Header plus two value rows.
  std::istringstream lines(cli.slurp("sweep.tsv"));
  std::string line;
  int rows = 0;
  while (std::getline(lines, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 3);
}
