#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <map>
#include <numeric>

#include "hinwalk/eval.hpp"
#include "hinwalk/walker.hpp"
#include "testutil.hpp"

using namespace hinwalk;
namespace tu = hinwalk::testutil;

namespace {

struct ToyFixture {
  TypedGraph g = tu::toy_scholar_graph();
  MetaSchema schema = g.derive_schema();
  MetaPath apvpa = parse_metapath("A-P-V-P-A", schema);
  SpaceyGraph sg{apvpa};
};

std::string type_string(const TypedGraph& g, std::span<const node_id> path) {
  std::string s;
  for (node_id v : path) s += g.type_name(g.node_type(v));
  return s;
}

bool matches_cyclic_pattern(const std::string& types, const std::string& cycle) {
  for (std::size_t i = 0; i < types.size(); ++i)
    if (types[i] != cycle[i % cycle.size()]) return false;
  return true;
}

// Per-(current type, next type) transition counts over a corpus.
std::vector<std::uint64_t> type_transition_counts(const TypedGraph& g,
                                                  const Corpus& corpus) {
  const std::size_t tc = g.type_count();
  std::vector<std::uint64_t> counts(tc * tc, 0);
  for (const auto& path : corpus.paths)
    for (std::size_t i = 1; i < path.size(); ++i)
      counts[g.node_type(path[i - 1]) * tc + g.node_type(path[i])]++;
  return counts;
}

}  // namespace

TEST_CASE("occupation vector implements the smoothed weights exactly") {
  auto g = tu::toy_scholar_graph();
  OccupationVector occ(g);
  const double n_nodes = g.node_count();
  // Fresh: n = 0, every node carries 1/N.
  for (node_id v = 0; v < g.node_count(); ++v)
    CHECK(occ.weight(v) == doctest::Approx(1.0 / n_nodes));

  occ.record_visit(tu::must_node(g, "a1"));
  occ.record_visit(tu::must_node(g, "p1"));
  occ.record_visit(tu::must_node(g, "a1"));
  CHECK(occ.steps() == 3);
  CHECK(occ.weight(tu::must_node(g, "a1")) == doctest::Approx(3.0 / 8.0));
  CHECK(occ.weight(tu::must_node(g, "p1")) == doctest::Approx(2.0 / 8.0));
  CHECK(occ.weight(tu::must_node(g, "v1")) == doctest::Approx(1.0 / 8.0));
  CHECK(occ.total_weight() == doctest::Approx(1.0).epsilon(1e-13));

  const auto A = tu::must_type(g, "A");
  CHECK(occ.type_mass(A) == doctest::Approx((2.0 + 2.0) / 8.0));
  double mass = 0;
  for (type_id t = 0; t < g.type_count(); ++t) mass += occ.type_mass(t);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-13));

  occ.reset();
  CHECK(occ.steps() == 0);
  CHECK(occ.weight(tu::must_node(g, "a1")) == doctest::Approx(1.0 / n_nodes));
}

TEST_CASE("restricted occupation draws follow the smoothed distribution") {
  auto g = tu::toy_scholar_graph();
  OccupationVector occ(g);
  occ.record_visit(tu::must_node(g, "a1"));
  occ.record_visit(tu::must_node(g, "a1"));
  occ.record_visit(tu::must_node(g, "v1"));

  const type_id types[] = {tu::must_type(g, "A"), tu::must_type(g, "V")};
  // Restricted masses: a1: 3, a2: 1, v1: 2 -> total 6.
  CHECK(occ.restricted_mass(types) == 6);
  Rng rng(7);
  std::map<node_id, int> hits;
  const int draws = 120000;
  for (int i = 0; i < draws; ++i) hits[occ.sample_restricted(types, rng)]++;
  CHECK(hits[tu::must_node(g, "a1")] / double(draws) ==
        doctest::Approx(3.0 / 6.0).epsilon(0.02));
  CHECK(hits[tu::must_node(g, "a2")] / double(draws) ==
        doctest::Approx(1.0 / 6.0).epsilon(0.05));
  CHECK(hits[tu::must_node(g, "v1")] / double(draws) ==
        doctest::Approx(2.0 / 6.0).epsilon(0.03));
  CHECK(hits.count(tu::must_node(g, "p1")) == 0);
}

TEST_CASE("markovian steps follow the window transitions") {
  ToyFixture f;
  auto spec = WalkerSpec::markovian(f.apvpa, f.sg);
  Walker walker(f.g, spec);

  // From a1 the first context is the wrap window (P,A) -> P, then p1 -> v1
  // deterministically ((A,P) -> V and p1 has a single venue).
  walker.begin_walk(tu::must_node(f.g, "a1"), 1);
  auto first = walker.step();
  REQUIRE(first);
  CHECK(f.g.node_name(*first) == "p1");
  auto second = walker.step();
  REQUIRE(second);
  CHECK(f.g.node_name(*second) == "v1");

  // From v1 with previous p1: (P,V) -> P, both papers equally likely.
  std::map<std::string, int> hits;
  for (int i = 0; i < 40000; ++i) {
    Walker w2(f.g, spec);
    w2.begin_walk(tu::must_node(f.g, "a1"), 1000 + i);
    w2.step();
    w2.step();
    auto third = w2.step();
    REQUIRE(third);
    hits[f.g.node_name(*third)]++;
  }
  CHECK(hits["p1"] / 40000.0 == doctest::Approx(0.5).epsilon(0.03));
  CHECK(hits["p2"] / 40000.0 == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("markovian corpus repeats the meta-path type cycle") {
  ToyFixture f;
  auto spec = WalkerSpec::markovian(f.apvpa, f.sg);
  WalkConfig cfg;
  cfg.walk_times = 5;
  cfg.walk_length = 40;
  cfg.seed = 3;
  cfg.invariant_checks = true;
  auto corpus = generate_corpus(f.g, spec, cfg);
  REQUIRE(!corpus.paths.empty());
  for (const auto& path : corpus.paths) {
    CHECK(matches_cyclic_pattern(type_string(f.g, path), "APVP"));
    CHECK(is_path_instance(path, f.g, f.apvpa));
  }
}

TEST_CASE("single toy walk reproduces the apvpa pattern") {
  ToyFixture f;
  auto spec = WalkerSpec::markovian(f.apvpa, f.sg);
  WalkConfig cfg;
  cfg.walk_times = 1;
  cfg.walk_length = 8;
  cfg.seed = 1;
  auto corpus = generate_corpus(f.g, spec, cfg);
  REQUIRE(corpus.paths.size() == 2);  // both author nodes start one walk
  for (const auto& path : corpus.paths) {
    CHECK(path.size() == 9);
    CHECK(matches_cyclic_pattern(type_string(f.g, path), "APVP"));
  }
  CHECK(f.g.node_name(corpus.paths[0][0]) == "a1");
}

TEST_CASE("spacey keep probability matches the personalized law") {
  ToyFixture f;
  OccupationVector occ(f.g);  // fresh: n = 0, uniform 0.2
  const auto P = tu::must_type(f.g, "P");
  auto preds = f.sg.predecessors(P);
  auto dist = y_distribution(f.g, occ, tu::must_node(f.g, "a1"), preds, 0.8);
  // Restricted predecessor pool {a1, a2, v1}, each renormalized to 1/3.
  CHECK(dist[tu::must_node(f.g, "a1")] ==
        doctest::Approx(0.2 + 0.8 / 3.0).epsilon(1e-12));
  CHECK(dist[tu::must_node(f.g, "a2")] == doctest::Approx(0.8 / 3.0));
  CHECK(dist[tu::must_node(f.g, "v1")] == doctest::Approx(0.8 / 3.0));
  CHECK(dist[tu::must_node(f.g, "p1")] == doctest::Approx(0.0));
  const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("spacey corpus walks stay on the spacey graph") {
  ToyFixture f;
  auto spec = WalkerSpec::spacey_metapath(f.apvpa, f.sg, 0.8);
  WalkConfig cfg;
  cfg.walk_times = 10;
  cfg.walk_length = 60;
  cfg.seed = 17;
  cfg.invariant_checks = true;
  auto corpus = generate_corpus(f.g, spec, cfg);
  REQUIRE(!corpus.paths.empty());
  for (const auto& path : corpus.paths)
    CHECK(is_spacey_graph_walk(path, f.g, f.sg));

  // With alpha = 0.8 the shortened P -> A transition appears.
  bool shortcut_seen = false;
  for (const auto& path : corpus.paths)
    for (std::size_t i = 1; i < path.size(); ++i)
      if (f.g.type_name(f.g.node_type(path[i - 1])) == "P" &&
          f.g.type_name(f.g.node_type(path[i])) == "A" &&
          i >= 2 && f.g.type_name(f.g.node_type(path[i - 2])) == "A")
        shortcut_seen = true;
  CHECK(shortcut_seen);
}

TEST_CASE("alpha zero reduces to the markovian walker") {
  auto g = tu::random_scholar_graph(40, 21);
  auto schema = g.derive_schema();
  auto mp = parse_metapath("A-P-V-P-A", schema);
  SpaceyGraph sg(mp);

  WalkConfig cfg;
  cfg.walk_times = 4;
  cfg.walk_length = 100;
  for (std::uint64_t seed : {11u, 12u, 13u, 14u, 15u}) {
    cfg.seed = seed;
    auto markov = generate_corpus(g, WalkerSpec::markovian(mp, sg), cfg);
    cfg.seed = seed + 1000;
    auto spacey =
        generate_corpus(g, WalkerSpec::spacey_metapath(mp, sg, 0.0), cfg);
    auto a = type_transition_counts(g, markov);
    auto b = type_transition_counts(g, spacey);
    auto result = chi_square_homogeneity(a, b);
    CAPTURE(seed);
    CHECK(result.p > 0.01);
  }
}

TEST_CASE("metagraph branch probabilities follow the partial occupation") {
  ToyFixture f;
  auto mg = parse_metagraph({"A-P-A", "A-P-V-P-A"}, f.schema);
  OccupationVector occ(f.g);  // fresh: type masses A 0.4, P 0.4, V 0.2
  const auto a1 = tu::must_node(f.g, "a1");
  const auto p1 = tu::must_node(f.g, "p1");
  auto dist = metagraph_step_distribution(f.g, mg, occ, a1, p1, 0.8);
  // S = {A, V}: z_A = 2/3, so P(type A) = 0.2 * 0.5 + 0.8 * 2/3.
  double mass_a = 0, mass_v = 0, total = 0;
  for (node_id v = 0; v < f.g.node_count(); ++v) {
    total += dist[v];
    if (f.g.type_name(f.g.node_type(v)) == "A") mass_a += dist[v];
    if (f.g.type_name(f.g.node_type(v)) == "V") mass_v += dist[v];
  }
  CHECK(mass_a == doctest::Approx(0.2 * 0.5 + 0.8 * 2.0 / 3.0).epsilon(1e-12));
  CHECK(mass_v == doctest::Approx(0.2 * 0.5 + 0.8 * 1.0 / 3.0).epsilon(1e-12));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single-member metagraph behaves like the metapath walker") {
  ToyFixture f;
  auto mg = parse_metagraph({"A-P-V-P-A"}, f.schema);
  // Same seeds => identical trajectories, since |S| = 1 skips branch draws.
  Walker w1(f.g, WalkerSpec::spacey_metapath(f.apvpa, f.sg, 0.8));
  Walker w2(f.g, WalkerSpec::spacey_metagraph(mg, 0.8));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    w1.begin_walk(tu::must_node(f.g, "a1"), seed);
    w2.begin_walk(tu::must_node(f.g, "a1"), seed);
    for (int s = 0; s < 30; ++s) {
      auto n1 = w1.step();
      auto n2 = w2.step();
      REQUIRE(n1.has_value() == n2.has_value());
      if (!n1) break;
      CHECK(*n1 == *n2);
    }
  }
}

TEST_CASE("metagraph alpha zero picks branch types uniformly") {
  ToyFixture f;
  auto mg = parse_metagraph({"A-P-A", "A-P-V-P-A"}, f.schema);
  OccupationVector occ(f.g);
  occ.record_visit(tu::must_node(f.g, "a1"));  // lopsided occupation
  occ.record_visit(tu::must_node(f.g, "a1"));
  occ.record_visit(tu::must_node(f.g, "a2"));
  auto dist = metagraph_step_distribution(f.g, mg, occ, tu::must_node(f.g, "a1"),
                                          tu::must_node(f.g, "p1"), 0.0);
  double mass_a = 0, mass_v = 0;
  for (node_id v = 0; v < f.g.node_count(); ++v) {
    if (f.g.type_name(f.g.node_type(v)) == "A") mass_a += dist[v];
    if (f.g.type_name(f.g.node_type(v)) == "V") mass_v += dist[v];
  }
  CHECK(mass_a == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mass_v == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("metaschema step distributions match the worked examples") {
  ToyFixture f;
  const auto p1 = tu::must_node(f.g, "p1");

  SUBCASE("alpha zero splits adjacent types evenly") {
    OccupationVector occ(f.g);
    auto dist = metaschema_step_distribution(f.g, f.schema, occ, p1, 0.0);
    double mass_a = 0, mass_v = 0;
    for (node_id v = 0; v < f.g.node_count(); ++v) {
      if (f.g.type_name(f.g.node_type(v)) == "A") mass_a += dist[v];
      if (f.g.type_name(f.g.node_type(v)) == "V") mass_v += dist[v];
    }
    CHECK(mass_a == doctest::Approx(0.5));
    CHECK(mass_v == doctest::Approx(0.5));
  }

  SUBCASE("alpha one renormalizes the candidate type masses") {
    OccupationVector occ(f.g);
    // Visits: 3x A-type, 2x P-type -> masses A 0.5, P 0.4, V 0.1.
    occ.record_visit(tu::must_node(f.g, "a1"));
    occ.record_visit(tu::must_node(f.g, "a1"));
    occ.record_visit(tu::must_node(f.g, "a2"));
    occ.record_visit(tu::must_node(f.g, "p1"));
    occ.record_visit(tu::must_node(f.g, "p2"));
    CHECK(occ.type_mass(tu::must_type(f.g, "A")) == doctest::Approx(0.5));
    CHECK(occ.type_mass(tu::must_type(f.g, "V")) == doctest::Approx(0.1));
    auto dist = metaschema_step_distribution(f.g, f.schema, occ, p1, 1.0);
    double mass_a = 0;
    for (node_id v = 0; v < f.g.node_count(); ++v)
      if (f.g.type_name(f.g.node_type(v)) == "A") mass_a += dist[v];
    CHECK(mass_a == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  }

  SUBCASE("a single adjacent type is forced for any alpha") {
    const auto a1 = tu::must_node(f.g, "a1");
    for (double alpha : {0.0, 0.5, 1.0}) {
      OccupationVector occ(f.g);
      auto dist = metaschema_step_distribution(f.g, f.schema, occ, a1, alpha);
      double mass_p = 0, rest = 0;
      for (node_id v = 0; v < f.g.node_count(); ++v) {
        if (f.g.type_name(f.g.node_type(v)) == "P") mass_p += dist[v];
        else rest += dist[v];
      }
      CHECK(mass_p == doctest::Approx(1.0));
      CHECK(rest == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("metaschema walks respect schema adjacency") {
  auto g = tu::random_scholar_graph(40, 33);
  auto schema = g.derive_schema();
  auto spec = WalkerSpec::spacey_metaschema(schema, 0.8);
  WalkConfig cfg;
  cfg.walk_times = 3;
  cfg.walk_length = 30;
  cfg.seed = 5;
  cfg.invariant_checks = true;
  auto corpus = generate_corpus(g, spec, cfg);
  REQUIRE(!corpus.paths.empty());
  // Meta-schema walks start at every node type.
  CHECK(corpus.paths.size() >= g.node_count());
  for (const auto& path : corpus.paths) CHECK(respects_schema(path, g, schema));
}

TEST_CASE("corpus generation is deterministic and thread-invariant") {
  auto g = tu::random_scholar_graph(50, 44);
  auto schema = g.derive_schema();
  auto mp = parse_metapath("A-P-V-P-A", schema);
  SpaceyGraph sg(mp);
  auto spec = WalkerSpec::spacey_metapath(mp, sg, 0.8);
  WalkConfig cfg;
  cfg.walk_times = 4;
  cfg.walk_length = 50;
  cfg.seed = 9;
  auto c1 = generate_corpus(g, spec, cfg);
  auto c2 = generate_corpus(g, spec, cfg);
  CHECK(c1.paths == c2.paths);
  cfg.threads = 3;
  auto c3 = generate_corpus(g, spec, cfg);
  CHECK(c1.paths == c3.paths);
  CHECK(c1.stats.walks == c3.stats.walks);
  CHECK(c1.stats.steps == c3.stats.steps);
}

TEST_CASE("walk and step budgets match the config") {
  auto g = tu::random_scholar_graph(30, 55);
  auto schema = g.derive_schema();
  auto mp = parse_metapath("A-P-A", schema);
  SpaceyGraph sg(mp);
  auto spec = WalkerSpec::spacey_metapath(mp, sg, 0.5);
  WalkConfig cfg;
  cfg.walk_times = 7;
  cfg.walk_length = 12;
  cfg.seed = 2;
  auto corpus = generate_corpus(g, spec, cfg);
  const std::size_t n_starts =
      g.nodes_of_type(tu::must_type(g, "A")).size();
  CHECK(corpus.paths.size() <= cfg.walk_times * n_starts);
  for (const auto& path : corpus.paths) CHECK(path.size() <= cfg.walk_length + 1);
  CHECK(corpus.stats.steps <=
        static_cast<std::uint64_t>(cfg.walk_times) * cfg.walk_length * n_starts);
}

TEST_CASE("dead ends truncate and short prefixes are discarded") {
  // p3 has no venue, so (A,P) -> V dies there; a3-p3 is p3's only edge.
  TypedGraph::Builder b;
  b.add_node("a1", "A");
  b.add_node("p1", "P");
  b.add_node("v1", "V");
  b.add_node("a3", "A");
  b.add_node("p3", "P");
  b.add_edge("a1", "p1");
  b.add_edge("p1", "v1");
  b.add_edge("a3", "p3");
  auto g = std::move(b).build();
  auto schema = g.derive_schema();
  auto mp = parse_metapath("A-P-V-P-A", schema);
  SpaceyGraph sg(mp);
  WalkConfig cfg;
  cfg.walk_times = 1;
  cfg.walk_length = 8;
  cfg.seed = 1;
  auto corpus = generate_corpus(g, WalkerSpec::markovian(mp, sg), cfg);
  CHECK(corpus.stats.truncated >= 1);
  // a3's walk reaches p3 then halts at 2 nodes < order+1 = 3 -> discarded.
  CHECK(corpus.stats.discarded >= 1);
  for (const auto& path : corpus.paths) CHECK(path.size() >= mp.order + 1);
}

TEST_CASE("empty graph yields an empty corpus") {
  TypedGraph::Builder b;
  b.add_node("a1", "A");
  b.add_node("p1", "P");
  b.add_node("v1", "V");
  b.add_edge("a1", "p1");
  b.add_edge("p1", "v1");
  auto g = std::move(b).build();
  auto schema = g.derive_schema();
  auto mp = parse_metapath("A-P-V-P-A", schema);
  SpaceyGraph sg(mp);
  WalkConfig cfg;
  cfg.walk_times = 2;
  cfg.walk_length = 8;
  cfg.start_types = std::vector<type_id>{};  // no start nodes at all
  auto corpus = generate_corpus(g, WalkerSpec::markovian(mp, sg), cfg);
  CHECK(corpus.paths.empty());
  CHECK(corpus.stats.walks == 0);
}

TEST_CASE("occupation invariants hold across a full corpus run") {
  auto g = tu::random_scholar_graph(25, 66);
  auto schema = g.derive_schema();
  auto mp = parse_metapath("A-P-V-P-A", schema);
  SpaceyGraph sg(mp);
  auto spec = WalkerSpec::spacey_metapath(mp, sg, 0.8);
  WalkConfig cfg;
  cfg.walk_times = 5;
  cfg.walk_length = 80;
  cfg.seed = 31;
  cfg.invariant_checks = true;  // throws on any violation
  auto corpus = generate_corpus(g, spec, cfg);
  CHECK(corpus.stats.steps > 0);
}

TEST_CASE("global occupation scope persists across walks") {
  ToyFixture f;
  auto spec = WalkerSpec::spacey_metapath(f.apvpa, f.sg, 0.8);
  Walker walker(f.g, spec);
  walker.set_global_occupation(true);
  walker.begin_walk(tu::must_node(f.g, "a1"), 1);
  for (int i = 0; i < 10; ++i) walker.step();
  const auto steps_before = walker.occupation().steps();
  walker.begin_walk(tu::must_node(f.g, "a2"), 2);
  CHECK(walker.occupation().steps() == steps_before + 1);
}

TEST_CASE("corpus files round-trip") {
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path() /
             ("hinwalk_walker_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  ToyFixture f;
  auto spec = WalkerSpec::markovian(f.apvpa, f.sg);
  WalkConfig cfg;
  cfg.walk_times = 2;
  cfg.walk_length = 10;
  cfg.seed = 8;
  auto corpus = generate_corpus(f.g, spec, cfg);
  const auto path = (dir / "corpus.txt").string();
  write_corpus(corpus, f.g, path);
  auto loaded = read_corpus(f.g, path);
  CHECK(loaded.paths == corpus.paths);
  write_corpus_stats(corpus.stats, (dir / "corpus.stats").string());
  CHECK(fs::exists(dir / "corpus.stats"));
  fs::remove_all(dir);
}
