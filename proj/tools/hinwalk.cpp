// Command-line surface for the walk -> train -> evaluate pipeline.
// Exit codes: 0 success, 1 tolerance/assertion failure, 2 usage or I/O error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hinwalk/eval.hpp"
#include "hinwalk/oracle.hpp"
#include "hinwalk/skipgram.hpp"
#include "hinwalk/walker.hpp"

namespace hw = hinwalk;

namespace {

double now_secs() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

struct GraphArgs {
  std::string nodes_path;
  std::string edges_path;

  void attach(CLI::App* cmd) {
    cmd->add_option("--nodes", nodes_path, "nodes file")->required();
    cmd->add_option("--edges", edges_path, "edges file")->required();
  }
  hw::TypedGraph load() const { return hw::load_graph(nodes_path, edges_path); }
};

struct GuidanceArgs {
  std::string mode_name = "metapath";
  std::vector<std::string> metapaths;
  std::string metagraph_file;
  double alpha = 0.8;

  void attach(CLI::App* cmd) {
    cmd->add_option("--mode", mode_name,
                    "markovian|metapath|metagraph|metaschema");
    cmd->add_option("--metapath", metapaths,
                    "meta-path such as A-P-V-P-A (repeat for meta-graphs)");
    cmd->add_option("--metagraph-file", metagraph_file,
                    "file with one meta-path per line");
    cmd->add_option("--alpha", alpha, "personalized probability");
  }
};

// Owns the parsed guidance structures the WalkerSpec points into.
struct Guidance {
  hw::MetaSchema schema;
  std::vector<hw::MetaPath> paths;
  std::vector<hw::SpaceyGraph> spaceys;
  hw::MetaGraph metagraph;
  hw::WalkerSpec spec;
};

Guidance build_guidance(const hw::TypedGraph& g, const GuidanceArgs& args) {
  Guidance out;
  out.schema = g.derive_schema();
  const hw::WalkMode mode = hw::parse_walk_mode(args.mode_name);

  std::vector<std::string> specs = args.metapaths;
  if (!args.metagraph_file.empty()) {
    auto lines = hw::read_metapath_lines(args.metagraph_file);
    specs.insert(specs.end(), lines.begin(), lines.end());
  }

  switch (mode) {
    case hw::WalkMode::markovian:
    case hw::WalkMode::metapath: {
      if (specs.size() != 1)
        hw::fail("mode ", args.mode_name, " needs exactly one --metapath");
      out.paths.push_back(hw::parse_metapath(specs[0], out.schema));
      out.spaceys.emplace_back(out.paths[0]);
      out.spec = mode == hw::WalkMode::markovian
                     ? hw::WalkerSpec::markovian(out.paths[0], out.spaceys[0])
                     : hw::WalkerSpec::spacey_metapath(out.paths[0],
                                                       out.spaceys[0], args.alpha);
      break;
    }
    case hw::WalkMode::metagraph: {
      if (specs.empty()) hw::fail("mode metagraph needs member meta-paths");
      out.metagraph = hw::parse_metagraph(specs, out.schema);
      out.spec = hw::WalkerSpec::spacey_metagraph(out.metagraph, args.alpha);
      break;
    }
    case hw::WalkMode::metaschema: {
      out.spec = hw::WalkerSpec::spacey_metaschema(out.schema, args.alpha);
      break;
    }
  }
  return out;
}

struct WalkArgs {
  hw::WalkConfig cfg;

  void attach(CLI::App* cmd) {
    cmd->add_option("-t,--walk-times", cfg.walk_times, "walks per start node");
    cmd->add_option("-l,--walk-length", cfg.walk_length, "steps per walk");
    cmd->add_option("--seed", cfg.seed, "random seed");
    cmd->add_option("--threads", cfg.threads, "walk worker threads");
    cmd->add_option("--min-keep", cfg.min_keep_nodes,
                    "discard truncated walks shorter than this many nodes");
    cmd->add_flag("--global-occupation", cfg.global_occupation,
                  "share one occupation vector across all walks");
  }
};

struct TrainArgs {
  hw::TrainConfig cfg;
  bool parallel = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("-d,--dim", cfg.dim, "embedding dimension");
    cmd->add_option("-w,--window", cfg.window, "context window radius");
    cmd->add_option("-m,--negatives", cfg.negatives, "negative samples per pair");
    cmd->add_option("--lr", cfg.lr0, "initial learning rate");
    cmd->add_option("--epochs", cfg.epochs, "training epochs");
    cmd->add_option("--train-threads", cfg.threads, "asynchronous SGD threads");
    cmd->add_flag("--parallel-train", parallel,
                  "asynchronous SGD (run-to-run nondeterministic)");
    cmd->add_flag("--global-negatives", "draw negatives from the global table");
  }
  hw::TrainConfig resolve(CLI::App* cmd, std::uint64_t seed) const {
    hw::TrainConfig out = cfg;
    out.seed = seed;
    out.deterministic = !parallel;
    out.per_type_negatives = cmd->count("--global-negatives") == 0;
    return out;
  }
};

std::vector<hw::node_id> vocab_nodes(const hw::Corpus& corpus,
                                     const hw::TypedGraph& g) {
  return hw::Vocabulary(corpus, g).nodes();
}

int cmd_walk(const GraphArgs& ga, const GuidanceArgs& gu, const WalkArgs& wa,
             const std::string& out_path, const std::string& stats_path) {
  auto g = ga.load();
  auto guidance = build_guidance(g, gu);
  std::printf("seed=%llu\n", static_cast<unsigned long long>(wa.cfg.seed));
  std::ofstream out(out_path);
  if (!out) hw::fail("cannot write corpus file '", out_path, "'");
  auto stats =
      hw::walk_corpus(g, guidance.spec, wa.cfg, [&](std::span<const hw::node_id> path) {
        for (std::size_t i = 0; i < path.size(); ++i) {
          if (i) out << ' ';
          out << g.node_name(path[i]);
        }
        out << '\n';
      });
  if (!stats_path.empty()) hw::write_corpus_stats(stats, stats_path);
  std::printf("walks=%llu truncated=%llu discarded=%llu steps=%llu\n",
              static_cast<unsigned long long>(stats.walks),
              static_cast<unsigned long long>(stats.truncated),
              static_cast<unsigned long long>(stats.discarded),
              static_cast<unsigned long long>(stats.steps));
  return 0;
}

int cmd_train(const GraphArgs& ga, CLI::App* cmd, const TrainArgs& ta,
              std::uint64_t seed, const std::string& corpus_path,
              const std::string& out_path, const std::string& bin_path) {
  auto g = ga.load();
  auto corpus = hw::read_corpus(g, corpus_path);
  std::printf("seed=%llu\n", static_cast<unsigned long long>(seed));
  hw::TrainStats stats;
  auto emb = hw::train(corpus, g, ta.resolve(cmd, seed), &stats);
  auto nodes = vocab_nodes(corpus, g);
  hw::write_embeddings_text(emb, g, nodes, out_path);
  if (!bin_path.empty())
    hw::write_embeddings_binary(emb, g, nodes, bin_path, bin_path + ".index");
  std::printf("pairs=%llu nodes=%zu\n",
              static_cast<unsigned long long>(stats.pairs), nodes.size());
  return 0;
}

int cmd_embed(const GraphArgs& ga, const GuidanceArgs& gu, const WalkArgs& wa,
              CLI::App* train_cmd, const TrainArgs& ta,
              const std::string& out_path, const std::string& bin_path,
              const std::string& corpus_path, const std::string& stats_path) {
  auto g = ga.load();
  auto guidance = build_guidance(g, gu);
  std::printf("seed=%llu\n", static_cast<unsigned long long>(wa.cfg.seed));

  const double t0 = now_secs();
  auto corpus = hw::generate_corpus(g, guidance.spec, wa.cfg);
  const double t1 = now_secs();
  std::printf("phase=walk secs=%.3f nodes=%u walks=%llu steps=%llu\n", t1 - t0,
              g.node_count(), static_cast<unsigned long long>(corpus.stats.walks),
              static_cast<unsigned long long>(corpus.stats.steps));
  if (!corpus_path.empty()) hw::write_corpus(corpus, g, corpus_path);
  if (!stats_path.empty()) hw::write_corpus_stats(corpus.stats, stats_path);

  hw::TrainStats stats;
  auto emb = hw::train(corpus, g, ta.resolve(train_cmd, wa.cfg.seed), &stats);
  const double t2 = now_secs();
  std::printf("phase=train secs=%.3f pairs=%llu\n", t2 - t1,
              static_cast<unsigned long long>(stats.pairs));

  auto nodes = vocab_nodes(corpus, g);
  hw::write_embeddings_text(emb, g, nodes, out_path);
  if (!bin_path.empty())
    hw::write_embeddings_binary(emb, g, nodes, bin_path, bin_path + ".index");
  std::printf("embeddings=%zu dim=%u out=%s\n", nodes.size(), emb.dim(),
              out_path.c_str());
  return 0;
}

int cmd_eval_classify(const std::string& emb_path, const GraphArgs& ga,
                      const std::string& labels_path,
                      const std::vector<std::string>& type_filter,
                      unsigned repeats, double train_fraction,
                      std::uint64_t seed, const std::string& report_path) {
  auto g = ga.load();
  auto labels = hw::load_labels(g, labels_path);
  auto loaded = hw::read_embeddings_text(emb_path);
  std::printf("seed=%llu\n", static_cast<unsigned long long>(seed));

  std::vector<bool> keep_type(g.type_count(), type_filter.empty());
  for (const auto& name : type_filter) {
    auto t = g.find_type(name);
    if (!t) hw::fail("unknown type '", name, "' in --types");
    keep_type[*t] = true;
  }

  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t r = 0; r < loaded.names.size(); ++r)
    row_of.emplace(loaded.names[r], r);
  std::vector<std::vector<double>> features;
  std::vector<std::vector<int>> node_labels;
  for (std::size_t i = 0; i < labels.nodes.size(); ++i) {
    if (!keep_type[g.node_type(labels.nodes[i])]) continue;
    auto it = row_of.find(g.node_name(labels.nodes[i]));
    if (it == row_of.end())
      hw::fail("labeled node '", g.node_name(labels.nodes[i]),
               "' has no embedding");
    features.push_back(loaded.vectors[it->second]);
    node_labels.push_back(labels.labels[i]);
  }
  if (features.empty()) hw::fail("no labeled nodes left after the type filter");
  auto report = hw::classification_protocol(features, node_labels,
                                            labels.label_names.size(), repeats,
                                            train_fraction, seed);
  std::printf("micro_f1_mean=%.6f micro_f1_var=%.3e\n", report.micro_mean,
              report.micro_var);
  std::printf("macro_f1_mean=%.6f macro_f1_var=%.3e\n", report.macro_mean,
              report.macro_var);
  if (!report_path.empty()) {
    std::ofstream out(report_path);
    if (!out) hw::fail("cannot write report '", report_path, "'");
    out << "run\tmicro_f1\tmacro_f1\n";
    for (std::size_t r = 0; r < report.micro_runs.size(); ++r)
      out << r << '\t' << report.micro_runs[r] << '\t' << report.macro_runs[r]
          << '\n';
    out << "# micro_mean=" << report.micro_mean << " micro_var=" << report.micro_var
        << " macro_mean=" << report.macro_mean << " macro_var=" << report.macro_var
        << '\n';
  }
  return 0;
}

int cmd_eval_lp(const GraphArgs& ga, const GuidanceArgs& gu, const WalkArgs& wa,
                CLI::App* train_cmd, const TrainArgs& ta,
                const std::string& edge_type_arg, double hide_fraction,
                std::size_t sample, unsigned repeats,
                const std::string& report_path) {
  auto g = ga.load();
  const auto colon = edge_type_arg.find(':');
  if (colon == std::string::npos)
    hw::fail("--edge-type wants `<TypeA>:<TypeB>`, got '", edge_type_arg, "'");
  auto ta_id = g.find_type(edge_type_arg.substr(0, colon));
  auto tb_id = g.find_type(edge_type_arg.substr(colon + 1));
  if (!ta_id || !tb_id) hw::fail("unknown type in --edge-type '", edge_type_arg, "'");
  std::printf("seed=%llu\n", static_cast<unsigned long long>(wa.cfg.seed));

  std::vector<std::vector<double>> aucs(4);
  bool fallback = false;
  for (unsigned rep = 0; rep < repeats; ++rep) {
    auto split = hw::lp_split(g, {*ta_id, *tb_id}, hide_fraction, sample,
                              hw::Rng::stream(wa.cfg.seed, 0x19, rep));
    fallback |= split.fallback_all_hidden;
    if (split.isolation_warning)
      std::fprintf(stderr, "warning: hidden set could not protect all nodes\n");
    auto guidance = build_guidance(split.train_graph, gu);
    auto corpus = hw::generate_corpus(split.train_graph, guidance.spec, wa.cfg);
    auto emb = hw::train(corpus, split.train_graph,
                         ta.resolve(train_cmd, wa.cfg.seed), nullptr);
    auto scores = hw::link_prediction_scores(split, emb);
    for (std::size_t op = 0; op < 4; ++op)
      aucs[op].push_back(scores.auc_per_op[op]);
  }
  if (fallback)
    std::printf("note=fewer hidden edges than requested; used all\n");

  std::ofstream report;
  if (!report_path.empty()) {
    report.open(report_path);
    if (!report) hw::fail("cannot write report '", report_path, "'");
    report << "operator\tauc_mean\tauc_var\n";
  }
  double mean_of_means = 0;
  for (std::size_t op = 0; op < 4; ++op) {
    const double m = hw::mean(aucs[op]);
    mean_of_means += m / 4.0;
    std::printf("auc_%s=%.6f\n",
                std::string(hw::edge_op_name(hw::k_all_edge_ops[op])).c_str(), m);
    if (report.is_open())
      report << hw::edge_op_name(hw::k_all_edge_ops[op]) << '\t' << m << '\t'
             << hw::variance(aucs[op]) << '\n';
  }
  std::printf("auc_mean=%.6f\n", mean_of_means);
  return 0;
}

int cmd_verify_stationary(const GraphArgs& ga, const std::string& metapath,
                          std::uint64_t steps, double alpha, double tol,
                          std::uint64_t seed) {
  auto g = ga.load();
  if (g.node_count() > hw::Hypermatrix::max_nodes)
    hw::fail("graph too large for the stationary oracle (", g.node_count(),
             " > ", hw::Hypermatrix::max_nodes, " nodes)");
  auto schema = g.derive_schema();
  auto mp = hw::parse_metapath(metapath, schema);
  auto sg = hw::build_spacey_graph(mp);
  std::printf("seed=%llu\n", static_cast<unsigned long long>(seed));

  auto h = hw::build_hypermatrix(g, mp);
  auto fp = hw::fixed_point_stationary(h);
  const double residual = hw::fixed_point_residual(h, fp.pi);
  std::printf("fixed_point_iterations=%u\n", fp.iterations);
  std::printf("fixed_point_residual=%.3e\n", residual);

  auto pair_chain = hw::pair_chain_stationary(h);

  auto run_single = [&](const hw::WalkerSpec& spec, std::uint64_t stream) {
    hw::Walker walker(g, spec);
    const hw::node_id start = g.nodes_of_type(mp.source_type()).front();
    walker.begin_walk(start, stream);
    std::vector<hw::node_id> traj{start};
    traj.reserve(steps + 1);
    for (std::uint64_t s = 0; s < steps; ++s) {
      auto next = walker.step();
      if (!next) hw::fail("walk hit a dead end; graph is not walk-complete");
      traj.push_back(*next);
    }
    return hw::empirical_distribution(std::span<const hw::node_id>(traj),
                                      g.node_count());
  };
  auto spacey_emp = run_single(hw::WalkerSpec::spacey_metapath(mp, sg, alpha),
                               hw::Rng::stream(seed, 0x5bace));
  auto markov_emp = run_single(hw::WalkerSpec::markovian(mp, sg),
                               hw::Rng::stream(seed, 0x3a8c));

  auto print_dist = [&](const char* name, std::span<const double> dist) {
    std::printf("%s=", name);
    for (std::size_t i = 0; i < dist.size(); ++i)
      std::printf(i ? ",%.6f" : "%.6f", dist[i]);
    std::printf("\n");
  };
  print_dist("fixed_point", fp.pi);
  print_dist("pair_chain_marginal", pair_chain.node_marginal);
  print_dist("spacey_empirical", spacey_emp);
  print_dist("markovian_empirical", markov_emp);

  struct Pair {
    const char* name;
    double value;
  };
  const Pair distances[] = {
      {"l1_spacey_vs_fixed_point", hw::l1_distance(spacey_emp, fp.pi)},
      {"l1_markovian_vs_pair_chain",
       hw::l1_distance(markov_emp, pair_chain.node_marginal)},
      {"l1_fixed_point_vs_pair_chain",
       hw::l1_distance(fp.pi, pair_chain.node_marginal)},
      {"l1_spacey_vs_markovian", hw::l1_distance(spacey_emp, markov_emp)},
  };
  bool ok = true;
  for (const auto& d : distances) {
    std::printf("%s=%.6f\n", d.name, d.value);
    ok &= d.value <= tol;
  }
  std::printf("tol=%.6f verdict=%s\n", tol, ok ? "pass" : "fail");
  return ok ? 0 : 1;
}

int cmd_synth(const std::string& schema_path, std::vector<std::uint64_t> sizes,
              double avg_degree, std::uint32_t communities, std::uint64_t seed,
              const std::string& out_prefix) {
  auto spec = hw::parse_schema_spec(schema_path);
  std::printf("seed=%llu\n", static_cast<unsigned long long>(seed));
  for (hw::type_id t = 0; t < spec.schema.type_count(); ++t) {
    if (spec.schema.adjacent_types(t).empty())
      std::fprintf(stderr, "warning: type '%s' is isolated in the schema\n",
                   spec.schema.type_name(t).c_str());
  }
  if (sizes.empty()) sizes = {1000, 10000, 100000, 1000000};
  for (std::uint64_t n : sizes) {
    hw::SynthConfig cfg;
    cfg.n_nodes = n;
    cfg.avg_degree = avg_degree;
    cfg.seed = seed;
    cfg.type_proportions = spec.proportions;
    cfg.communities = communities;
    auto synth = hw::generate_synthetic(spec.schema, cfg);
    const std::string base = hw::cat(out_prefix, "_", n);
    hw::save_graph(synth.graph, base + ".nodes", base + ".edges");
    if (communities > 0) {
      std::ofstream labels(base + ".labels");
      if (!labels) hw::fail("cannot write labels file '", base, ".labels'");
      for (hw::node_id v = 0; v < synth.graph.node_count(); ++v)
        labels << synth.graph.node_name(v) << '\t' << "c"
               << synth.community[v] << '\n';
    }
    std::printf("size=%llu nodes=%u edges=%zu out=%s.{nodes,edges}\n",
                static_cast<unsigned long long>(n), synth.graph.node_count(),
                synth.graph.edge_count(), base.c_str());
  }
  return 0;
}

int cmd_sweep(const GraphArgs& ga, const GuidanceArgs& gu, const WalkArgs& wa,
              CLI::App* train_cmd, const TrainArgs& ta,
              const std::string& labels_path, const std::string& axis_name,
              const std::vector<double>& values, unsigned repeats,
              const std::string& report_path) {
  auto g = ga.load();
  auto guidance = build_guidance(g, gu);
  auto labels = hw::load_labels(g, labels_path);
  std::printf("seed=%llu\n", static_cast<unsigned long long>(wa.cfg.seed));

  hw::PipelineConfig pipeline;
  pipeline.walk = wa.cfg;
  pipeline.train = ta.resolve(train_cmd, wa.cfg.seed);
  pipeline.repeats = repeats;
  pipeline.seed = wa.cfg.seed;
  auto rows = hw::parameter_sweep(g, guidance.spec, hw::parse_sweep_axis(axis_name),
                                  values, pipeline, labels,
                                  labels.label_names.size());

  std::ofstream report;
  if (!report_path.empty()) {
    report.open(report_path);
    if (!report) hw::fail("cannot write report '", report_path, "'");
  }
  auto emit = [&](const std::string& line) {
    std::printf("%s\n", line.c_str());
    if (report.is_open()) report << line << '\n';
  };
  emit(hw::cat(axis_name, "\tmicro_mean\tmicro_var\tmacro_mean\tmacro_var"));
  for (const auto& row : rows)
    emit(hw::cat(row.value, '\t', row.report.micro_mean, '\t',
                 row.report.micro_var, '\t', row.report.macro_mean, '\t',
                 row.report.macro_var));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heterogeneous information network embedding toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file ([subcommand] sections)");

  GraphArgs graph_args;
  GuidanceArgs guidance_args;
  WalkArgs walk_args;
  TrainArgs train_args;

  // walk
  auto* walk = app.add_subcommand("walk", "generate a walk corpus");
  graph_args.attach(walk);
  guidance_args.attach(walk);
  walk_args.attach(walk);
  std::string corpus_out = "corpus.txt", stats_out;
  walk->add_option("-o,--out", corpus_out, "corpus output file");
  walk->add_option("--stats", stats_out, "stats sidecar file");

  // train
  auto* train = app.add_subcommand("train", "train embeddings from a corpus");
  graph_args.attach(train);
  train_args.attach(train);
  std::string corpus_in = "corpus.txt", emb_out = "embeddings.txt", bin_out;
  std::uint64_t train_seed = 1;
  train->add_option("--corpus", corpus_in, "corpus input file");
  train->add_option("-o,--out", emb_out, "embeddings text output");
  train->add_option("--binary-out", bin_out, "raw f32 output (+ .index sidecar)");
  train->add_option("--seed", train_seed, "random seed");

  // embed = walk + train
  auto* embed = app.add_subcommand("embed", "walk and train in one run");
  graph_args.attach(embed);
  guidance_args.attach(embed);
  walk_args.attach(embed);
  train_args.attach(embed);
  std::string embed_out = "embeddings.txt", embed_bin, embed_corpus, embed_stats;
  embed->add_option("-o,--out", embed_out, "embeddings text output");
  embed->add_option("--binary-out", embed_bin, "raw f32 output (+ .index sidecar)");
  embed->add_option("--corpus-out", embed_corpus, "also keep the corpus");
  embed->add_option("--stats", embed_stats, "stats sidecar file");

  // eval-classify
  auto* classify = app.add_subcommand("eval-classify",
                                      "node classification protocol");
  graph_args.attach(classify);
  std::string classify_emb, labels_path, classify_report;
  std::vector<std::string> classify_types;
  unsigned repeats = 10;
  double train_fraction = 0.5;
  std::uint64_t classify_seed = 1;
  classify->add_option("--emb", classify_emb, "embeddings text file")->required();
  classify->add_option("--labels", labels_path, "labels file")->required();
  classify->add_option("--types", classify_types,
                       "restrict to labeled nodes of these types");
  classify->add_option("--repeats", repeats, "random splits");
  classify->add_option("--train-fraction", train_fraction, "labeled split");
  classify->add_option("--seed", classify_seed, "random seed");
  classify->add_option("--report", classify_report, "per-run report file");

  // eval-lp
  auto* lp = app.add_subcommand("eval-lp", "link prediction protocol");
  graph_args.attach(lp);
  guidance_args.attach(lp);
  walk_args.attach(lp);
  train_args.attach(lp);
  std::string edge_type, lp_report;
  double hide_fraction = 0.2;
  std::size_t lp_sample = 2048;
  unsigned lp_repeats = 10;
  lp->add_option("--edge-type", edge_type, "edge type pair `<A>:<B>`")->required();
  lp->add_option("--hide-fraction", hide_fraction, "fraction of edges to hide");
  lp->add_option("--sample", lp_sample, "positive/negative sample size");
  lp->add_option("--repeats", lp_repeats, "protocol repeats");
  lp->add_option("--report", lp_report, "report file");

  // verify-stationary
  auto* verify = app.add_subcommand("verify-stationary",
                                    "check the walkers against the exact oracle");
  graph_args.attach(verify);
  std::string verify_path = "A-P-V-P-A";
  std::uint64_t verify_steps = 1000000, verify_seed = 1;
  double verify_alpha = 0.8, verify_tol = 0.05;
  verify->add_option("--metapath", verify_path, "meta-path");
  verify->add_option("--steps", verify_steps, "trajectory length");
  verify->add_option("--alpha", verify_alpha, "personalized probability");
  verify->add_option("--tol", verify_tol, "L1 tolerance");
  verify->add_option("--seed", verify_seed, "random seed");

  // synth
  auto* synth = app.add_subcommand("synth", "generate synthetic graphs");
  std::string schema_path, synth_prefix = "synth";
  std::vector<std::uint64_t> sizes;
  double avg_degree = 10.0;
  std::uint32_t communities = 0;
  std::uint64_t synth_seed = 1;
  synth->add_option("--schema", schema_path, "schema spec file")->required();
  synth->add_option("--sizes", sizes, "node counts (default 1k 10k 100k 1000k)");
  synth->add_option("--avg-degree", avg_degree, "target average degree");
  synth->add_option("--communities", communities, "planted communities (0 = off)");
  synth->add_option("--seed", synth_seed, "random seed");
  synth->add_option("--out-prefix", synth_prefix, "output file prefix");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "parameter sweep over the pipeline");
  graph_args.attach(sweep);
  guidance_args.attach(sweep);
  walk_args.attach(sweep);
  train_args.attach(sweep);
  std::string sweep_axis = "alpha", sweep_labels, sweep_report;
  std::vector<double> sweep_values;
  unsigned sweep_repeats = 10;
  sweep->add_option("--axis", sweep_axis, "walk_times|walk_length|alpha");
  sweep->add_option("--values", sweep_values, "axis values")->required();
  sweep->add_option("--labels", sweep_labels, "labels file")->required();
  sweep->add_option("--repeats", sweep_repeats, "classification repeats");
  sweep->add_option("--report", sweep_report, "report file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (walk->parsed())
      return cmd_walk(graph_args, guidance_args, walk_args, corpus_out, stats_out);
    if (train->parsed())
      return cmd_train(graph_args, train, train_args, train_seed, corpus_in,
                       emb_out, bin_out);
    if (embed->parsed())
      return cmd_embed(graph_args, guidance_args, walk_args, embed, train_args,
                       embed_out, embed_bin, embed_corpus, embed_stats);
    if (classify->parsed())
      return cmd_eval_classify(classify_emb, graph_args, labels_path,
                               classify_types, repeats, train_fraction,
                               classify_seed, classify_report);
    if (lp->parsed())
      return cmd_eval_lp(graph_args, guidance_args, walk_args, lp, train_args,
                         edge_type, hide_fraction, lp_sample, lp_repeats,
                         lp_report);
    if (verify->parsed())
      return cmd_verify_stationary(graph_args, verify_path, verify_steps,
                                   verify_alpha, verify_tol, verify_seed);
    if (synth->parsed())
      return cmd_synth(schema_path, sizes, avg_degree, communities, synth_seed,
                       synth_prefix);
    if (sweep->parsed())
      return cmd_sweep(graph_args, guidance_args, walk_args, sweep, train_args,
                       sweep_labels, sweep_axis, sweep_values, sweep_repeats,
                       sweep_report);
  } catch (const hinwalk::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
