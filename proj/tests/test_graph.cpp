#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "hinwalk/graph.hpp"
#include "testutil.hpp"

using namespace hinwalk;
namespace tu = hinwalk::testutil;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("hinwalk_graph_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("loader builds the toy graph") {
  TempDir dir;
  write_file(dir.file("nodes"),
             "# scholar toy\n"
             "a1\tA\na2\tA\np1\tP\np2\tP\nv1\tV\n");
  write_file(dir.file("edges"),
             "a1\tp1\na2\tp1\na2\tp2\np1\tv1\np2\tv1\n");
  auto g = load_graph(dir.file("nodes"), dir.file("edges"));
  CHECK(g.node_count() == 5);
  CHECK(g.edge_count() == 5);
  const auto p1 = tu::must_node(g, "p1");
  CHECK(g.typed_degree(p1, tu::must_type(g, "A")) == 2);
  CHECK(g.typed_degree(p1, tu::must_type(g, "V")) == 1);
}

TEST_CASE("loader accepts empty edge files and relation columns") {
  TempDir dir;
  write_file(dir.file("nodes"), "x\tA\ny\tA\nz\tB\n");
  write_file(dir.file("edges"), "# none yet\n");
  auto g = load_graph(dir.file("nodes"), dir.file("edges"));
  CHECK(g.node_count() == 3);
  for (node_id v = 0; v < g.node_count(); ++v)
    for (type_id t = 0; t < g.type_count(); ++t)
      CHECK(g.typed_degree(v, t) == 0);

  write_file(dir.file("edges2"), "x\tz\twrote\n");
  auto g2 = load_graph(dir.file("nodes"), dir.file("edges2"));
  CHECK(g2.edge_count() == 1);
}

TEST_CASE("loader rejects bad input with line numbers") {
  TempDir dir;
  write_file(dir.file("nodes"), "a1\tA\n");
  write_file(dir.file("edges"), "a1\tx9\n");
  CHECK_THROWS_WITH_AS(load_graph(dir.file("nodes"), dir.file("edges")),
                       doctest::Contains("unknown node"), Error);
  CHECK_THROWS_WITH_AS(load_graph(dir.file("nodes"), dir.file("edges")),
                       doctest::Contains(":1:"), Error);

  write_file(dir.file("nodes2"), "a1\tA\na1\tP\n");
  CHECK_THROWS_WITH_AS(load_graph(dir.file("nodes2"), dir.file("edges")),
                       doctest::Contains("two different types"), Error);

  write_file(dir.file("nodes3"), "a1\n");
  CHECK_THROWS_WITH_AS(load_graph(dir.file("nodes3"), dir.file("edges")),
                       doctest::Contains("malformed"), Error);
}

TEST_CASE("duplicate edges are deduplicated; self-loops rejected") {
  TempDir dir;
  write_file(dir.file("nodes"), "a\tA\nb\tB\n");
  write_file(dir.file("edges"), "a\tb\nb\ta\na\tb\n");
  auto g = load_graph(dir.file("nodes"), dir.file("edges"));
  CHECK(g.edge_count() == 1);

  write_file(dir.file("edges2"), "a\ta\n");
  CHECK_THROWS_WITH_AS(load_graph(dir.file("nodes"), dir.file("edges2")),
                       doctest::Contains("self-loop"), Error);
}

TEST_CASE("derive_schema reads type pairs off the edges") {
  auto g = tu::toy_scholar_graph();
  auto schema = g.derive_schema();
  CHECK(schema.type_count() == 3);
  CHECK(schema.edges().size() == 2);
  CHECK(schema.has_edge(tu::must_type(g, "A"), tu::must_type(g, "P")));
  CHECK(schema.has_edge(tu::must_type(g, "P"), tu::must_type(g, "V")));
  CHECK_FALSE(schema.has_edge(tu::must_type(g, "A"), tu::must_type(g, "V")));

  TypedGraph::Builder lone;
  lone.add_node("only", "X");
  auto g2 = std::move(lone).build();
  CHECK(g2.derive_schema().edges().empty());
}

TEST_CASE("dblp-shaped schema has three pairs") {
  TypedGraph::Builder b;
  b.add_node("a", "A");
  b.add_node("p", "P");
  b.add_node("c", "C");
  b.add_node("t", "T");
  b.add_edge("a", "p");
  b.add_edge("p", "c");
  b.add_edge("p", "t");
  auto schema = std::move(b).build().derive_schema();
  CHECK(schema.edges().size() == 3);
}

TEST_CASE("transition probabilities follow typed degrees") {
  auto g = tu::toy_scholar_graph();
  const auto a2 = tu::must_node(g, "a2");
  const auto p1 = tu::must_node(g, "p1");
  const auto v1 = tu::must_node(g, "v1");
  const auto P = tu::must_type(g, "P");
  const auto V = tu::must_type(g, "V");
  const auto A = tu::must_type(g, "A");
  CHECK(g.transition_prob(a2, P, p1) == doctest::Approx(0.5));
  CHECK(g.transition_prob(p1, V, v1) == doctest::Approx(1.0));
  CHECK_THROWS_WITH_AS(g.transition_prob(v1, A, a2),
                       doctest::Contains("no neighbor of required type"), Error);
}

TEST_CASE("rows are stochastic over every typed neighborhood") {
  auto g = tu::random_scholar_graph(60, 7);
  for (node_id u = 0; u < g.node_count(); ++u) {
    for (type_id t : g.adjacent_types(u)) {
      double sum = 0;
      for (node_id v : g.neighbors(u, t)) sum += g.transition_prob(u, t, v);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("adjacency storage is symmetric") {
  auto g = tu::random_scholar_graph(80, 11);
  for (node_id u = 0; u < g.node_count(); ++u) {
    for (type_id t : g.adjacent_types(u)) {
      for (node_id v : g.neighbors(u, t)) {
        auto back = g.neighbors(v, g.node_type(u));
        CHECK(std::binary_search(back.begin(), back.end(), u));
      }
    }
  }
}

TEST_CASE("sample_typed_neighbor matches transition_prob empirically") {
  auto g = tu::toy_scholar_graph();
  const auto a2 = tu::must_node(g, "a2");
  const auto p1 = tu::must_node(g, "p1");
  const auto v1 = tu::must_node(g, "v1");
  const auto P = tu::must_type(g, "P");
  const auto V = tu::must_type(g, "V");

  Rng rng(42);
  int hits = 0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i)
    if (g.sample_typed_neighbor(a2, P, rng) == p1) ++hits;
  const double freq = static_cast<double>(hits) / draws;
  CHECK(freq > 0.49);
  CHECK(freq < 0.51);

  for (int i = 0; i < 100; ++i) CHECK(g.sample_typed_neighbor(p1, V, rng) == v1);
}

TEST_CASE("sampling is deterministic per seed") {
  auto g = tu::toy_scholar_graph();
  const auto a2 = tu::must_node(g, "a2");
  const auto P = tu::must_type(g, "P");
  Rng r1(99), r2(99);
  for (int i = 0; i < 1000; ++i)
    CHECK(g.sample_typed_neighbor(a2, P, r1) == g.sample_typed_neighbor(a2, P, r2));
}

TEST_CASE("synthetic generator hits the degree target") {
  SynthConfig cfg;
  cfg.n_nodes = 1000;
  cfg.avg_degree = 10;
  cfg.seed = 5;
  cfg.type_proportions = {0.4, 0.4, 0.2};
  auto g = generate_synthetic(tu::scholar_schema(), cfg).graph;
  CHECK(g.node_count() == 1000);
  const auto degree_sum = 2 * g.edge_count();
  CHECK(degree_sum >= 9000);
  CHECK(degree_sum <= 11000);

  auto schema = g.derive_schema();
  CHECK(schema.edges().size() <= tu::scholar_schema().edges().size());
  for (auto [a, b] : schema.edges())
    CHECK(tu::scholar_schema().has_edge(a, b));
}

TEST_CASE("synthetic generator degenerate and deterministic cases") {
  SynthConfig cfg;
  cfg.n_nodes = 3;
  cfg.avg_degree = 1;
  cfg.seed = 2;
  cfg.type_proportions = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  auto g = generate_synthetic(tu::scholar_schema(), cfg).graph;
  // One node per type: at most one edge per schema pair.
  CHECK(g.edge_count() <= tu::scholar_schema().edges().size());

  cfg.n_nodes = 200;
  cfg.avg_degree = 6;
  auto g1 = generate_synthetic(tu::scholar_schema(), cfg).graph;
  auto g2 = generate_synthetic(tu::scholar_schema(), cfg).graph;
  CHECK(g1.edge_list() == g2.edge_list());

  MetaSchema empty_schema;
  empty_schema.add_type("A");
  SynthConfig bad;
  bad.type_proportions = {1.0};
  CHECK_THROWS_WITH_AS(generate_synthetic(empty_schema, bad),
                       doctest::Contains("no type edges"), Error);
}

TEST_CASE("planted communities bias edges inside blocks") {
  SynthConfig cfg;
  cfg.n_nodes = 600;
  cfg.avg_degree = 10;
  cfg.seed = 3;
  cfg.type_proportions = {0.4, 0.4, 0.2};
  cfg.communities = 4;
  cfg.intra_community_bias = 0.8;
  auto synth = generate_synthetic(tu::scholar_schema(), cfg);
  REQUIRE(synth.community.size() == synth.graph.node_count());
  std::size_t intra = 0;
  auto edges = synth.graph.edge_list();
  for (auto [u, v] : edges)
    if (synth.community[u] == synth.community[v]) ++intra;
  CHECK(static_cast<double>(intra) / edges.size() > 0.6);
}

TEST_CASE("save then load round-trips the graph") {
  TempDir dir;
  auto g = tu::random_scholar_graph(50, 13);
  save_graph(g, dir.file("n"), dir.file("e"));
  auto g2 = load_graph(dir.file("n"), dir.file("e"));
  REQUIRE(g2.node_count() == g.node_count());
  CHECK(g2.edge_list() == g.edge_list());
  for (node_id v = 0; v < g.node_count(); ++v) {
    CHECK(g2.node_name(v) == g.node_name(v));
    CHECK(g2.type_name(g2.node_type(v)) == g.type_name(g.node_type(v)));
  }
}

TEST_CASE("schema spec files parse") {
  TempDir dir;
  write_file(dir.file("schema"),
             "# dblp-ish\n"
             "type A 0.45\ntype P 0.45\ntype C 0.10\n"
             "edge A P\nedge P C\n");
  auto spec = parse_schema_spec(dir.file("schema"));
  CHECK(spec.schema.type_count() == 3);
  CHECK(spec.schema.edges().size() == 2);
  CHECK(spec.proportions.size() == 3);
  CHECK(spec.proportions[0] == doctest::Approx(0.45));
}
