#include "hinwalk/walker.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

namespace hinwalk {

OccupationVector::OccupationVector(const TypedGraph& g)
    : g_(&g),
      type_size_(g.type_count(), 0),
      type_visits_(g.type_count(), 0),
      history_by_type_(g.type_count()) {
  for (type_id t = 0; t < g.type_count(); ++t)
    type_size_[t] = static_cast<std::uint32_t>(g.nodes_of_type(t).size());
}

void OccupationVector::record_visit(node_id v) {
  counts_[v]++;
  const type_id t = g_->node_type(v);
  type_visits_[t]++;
  history_by_type_[t].push_back(v);
  steps_++;
}

void OccupationVector::reset() {
  counts_.clear();
  for (auto& h : history_by_type_) h.clear();
  std::fill(type_visits_.begin(), type_visits_.end(), 0);
  steps_ = 0;
}

std::uint64_t OccupationVector::restricted_mass(
    std::span<const type_id> types) const {
  std::uint64_t total = 0;
  for (type_id t : types) total += type_size_[t] + type_visits_[t];
  return total;
}

node_id OccupationVector::sample_restricted(std::span<const type_id> types,
                                            Rng& rng) const {
  const std::uint64_t total = restricted_mass(types);
  if (total == 0)
    fail("occupation draw has no mass: no nodes of any valid predecessor type");
  std::uint64_t u = rng.next_below(total);
  for (type_id t : types) {
    const auto& of_type = g_->nodes_of_type(t);
    // +1 smoothing part: every node of the type, uniformly.
    if (u < of_type.size()) return of_type[u];
    u -= of_type.size();
    // Visit-count part: a uniform draw over the typed visit history.
    if (u < type_visits_[t]) return history_by_type_[t][u];
    u -= type_visits_[t];
  }
  fail("occupation draw out of range");
}

double OccupationVector::total_weight() const {
  double sum = 0;
  for (node_id v = 0; v < g_->node_count(); ++v) sum += weight(v);
  return sum;
}

WalkMode parse_walk_mode(std::string_view name) {
  if (name == "markovian") return WalkMode::markovian;
  if (name == "metapath") return WalkMode::metapath;
  if (name == "metagraph") return WalkMode::metagraph;
  if (name == "metaschema") return WalkMode::metaschema;
  fail("unknown walk mode '", name,
       "' (want markovian|metapath|metagraph|metaschema)");
}

std::string_view walk_mode_name(WalkMode mode) {
  switch (mode) {
    case WalkMode::markovian: return "markovian";
    case WalkMode::metapath: return "metapath";
    case WalkMode::metagraph: return "metagraph";
    case WalkMode::metaschema: return "metaschema";
  }
  return "?";
}

WalkerSpec WalkerSpec::markovian(const MetaPath& mp, const SpaceyGraph& sg) {
  WalkerSpec s;
  s.mode = WalkMode::markovian;
  s.path = &mp;
  s.spacey = &sg;
  s.alpha = 0.0;
  return s;
}

WalkerSpec WalkerSpec::spacey_metapath(const MetaPath& mp, const SpaceyGraph& sg,
                                       double alpha) {
  WalkerSpec s;
  s.mode = WalkMode::metapath;
  s.path = &mp;
  s.spacey = &sg;
  s.alpha = alpha;
  return s;
}

WalkerSpec WalkerSpec::spacey_metagraph(const MetaGraph& mg, double alpha) {
  WalkerSpec s;
  s.mode = WalkMode::metagraph;
  s.metagraph = &mg;
  s.alpha = alpha;
  return s;
}

WalkerSpec WalkerSpec::spacey_metaschema(const MetaSchema& schema, double alpha) {
  WalkerSpec s;
  s.mode = WalkMode::metaschema;
  s.schema = &schema;
  s.alpha = alpha;
  return s;
}

void WalkerSpec::validate(const TypedGraph& g) const {
  if (alpha < 0.0 || alpha > 1.0) fail("alpha must lie in [0, 1]");
  switch (mode) {
    case WalkMode::markovian:
    case WalkMode::metapath:
      if (!path || !spacey) fail("meta-path guidance missing");
      for (type_id t : path->types)
        if (t >= g.type_count())
          fail("meta-path references a type absent from the graph");
      break;
    case WalkMode::metagraph:
      if (!metagraph) fail("meta-graph guidance missing");
      break;
    case WalkMode::metaschema:
      if (!schema) fail("meta-schema guidance missing");
      for (type_id t = 0; t < g.type_count(); ++t)
        if (t >= schema->type_count() ||
            schema->type_name(t) != g.type_name(t))
          fail("meta-schema types do not match the graph's types");
      break;
  }
}

std::vector<type_id> WalkerSpec::start_types(const TypedGraph& g) const {
  switch (mode) {
    case WalkMode::markovian:
    case WalkMode::metapath:
      return {path->source_type()};
    case WalkMode::metagraph:
      return {metagraph->source_type};
    case WalkMode::metaschema: {
      std::vector<type_id> all(g.type_count());
      for (type_id t = 0; t < g.type_count(); ++t) all[t] = t;
      return all;
    }
  }
  return {};
}

Walker::Walker(const TypedGraph& g, const WalkerSpec& spec)
    : g_(g), spec_(spec), occupation_(g), rng_(0) {
  spec_.validate(g);
}

void Walker::begin_walk(node_id start, std::uint64_t stream_seed) {
  if (!global_occupation_) occupation_.reset();
  rng_ = Rng(stream_seed);
  current_ = start;
  previous_.reset();
  occupation_.record_visit(start);
}

type_id Walker::draw_y_type(std::span<const type_id> preds) {
  const double alpha = spec_.alpha;
  // Keeping the true predecessor with probability (1-alpha) and otherwise
  // redrawing from the restricted occupation gives the previous node total
  // probability (1-alpha) + alpha * w_prev, the personalized spacey law.
  if (rng_.next_double() < 1.0 - alpha) {
    if (previous_) return g_.node_type(*previous_);
    // First step: no history yet, act as one wrap of the guiding cycle.
    if (spec_.mode == WalkMode::metapath || spec_.mode == WalkMode::markovian)
      return spec_.path->wrap_type();
    const auto& starts = spec_.metagraph->start_contexts;
    if (starts.size() == 1) return starts[0];
    return starts[rng_.next_below(starts.size())];
  }
  if (check_invariants_ && occupation_.restricted_mass(preds) == 0)
    fail("spacey draw has zero restricted mass");
  return g_.node_type(occupation_.sample_restricted(preds, rng_));
}

std::optional<node_id> Walker::advance(type_id next_type) {
  auto span = g_.neighbors(current_, next_type);
  if (span.empty()) return std::nullopt;  // dead end; caller truncates
  const node_id next = span[rng_.next_below(span.size())];
  previous_ = current_;
  current_ = next;
  occupation_.record_visit(next);
  if (check_invariants_) check_step_invariants();
  return next;
}

namespace {

// Candidate successor types with positive typed degree at `cur`.
template <typename Out>
void filter_candidates(const TypedGraph& g, node_id cur,
                       std::span<const type_id> types, Out& out) {
  for (type_id t : types)
    if (g.typed_degree(cur, t) > 0) out.push_back(t);
}

}  // namespace

std::optional<node_id> Walker::step() {
  const type_id cur_type = g_.node_type(current_);
  switch (spec_.mode) {
    case WalkMode::markovian: {
      const type_id prev_type =
          previous_ ? g_.node_type(*previous_) : spec_.path->wrap_type();
      auto next_type = spec_.spacey->successor(prev_type, cur_type);
      if (!next_type)
        fail("markovian state (", g_.type_name(prev_type), ",",
             g_.type_name(cur_type), ") is not a meta-path window");
      return advance(*next_type);
    }
    case WalkMode::metapath: {
      auto preds = spec_.spacey->predecessors(cur_type);
      if (preds.empty())
        fail("type '", g_.type_name(cur_type),
             "' has no predecessors in the spacey graph");
      const type_id y_type = draw_y_type(preds);
      auto next_type = spec_.spacey->successor(y_type, cur_type);
      if (!next_type) fail("spacey draw produced an invalid context");
      return advance(*next_type);
    }
    case WalkMode::metagraph: {
      auto preds = spec_.metagraph->predecessors(cur_type);
      if (preds.empty())
        fail("type '", g_.type_name(cur_type),
             "' has no predecessors in the meta-graph");
      const type_id y_type = draw_y_type(preds);
      scratch_types_.clear();
      filter_candidates(g_, current_, spec_.metagraph->successors(y_type, cur_type),
                        scratch_types_);
      if (scratch_types_.empty()) return std::nullopt;
      return advance(choose_branch_type(scratch_types_));
    }
    case WalkMode::metaschema: {
      scratch_types_.clear();
      for (const auto& seg : g_.segments(current_))
        if (spec_.schema->has_edge(cur_type, seg.type))
          scratch_types_.push_back(seg.type);
      if (scratch_types_.empty()) return std::nullopt;  // isolated node
      return advance(choose_branch_type(scratch_types_));
    }
  }
  return std::nullopt;
}

type_id Walker::choose_branch_type(std::span<const type_id> cands) {
  if (cands.size() == 1) return cands[0];
  if (rng_.next_double() < 1.0 - spec_.alpha)
    return cands[rng_.next_below(cands.size())];
  // Occupation type-mass over the candidate set, renormalized.
  std::uint64_t total = 0;
  for (type_id t : cands) total += occupation_.type_mass_int(t);
  std::uint64_t u = rng_.next_below(total);
  for (type_id t : cands) {
    const std::uint64_t m = occupation_.type_mass_int(t);
    if (u < m) return t;
    u -= m;
  }
  return cands.back();
}

void Walker::check_step_invariants() {
  checked_steps_++;
  const double sum = occupation_.total_weight();
  if (std::abs(sum - 1.0) > 1e-12)
    fail("occupation vector sums to ", sum, " (expected 1)");
}

namespace {

std::uint32_t default_min_keep(const WalkerSpec& spec) {
  switch (spec.mode) {
    case WalkMode::markovian:
    case WalkMode::metapath:
      return spec.path->order + 1;
    case WalkMode::metagraph: {
      unsigned max_order = 1;
      for (const auto& m : spec.metagraph->members)
        max_order = std::max(max_order, m.order);
      return max_order + 1;
    }
    case WalkMode::metaschema:
      return 2;
  }
  return 2;
}

struct WalkTask {
  node_id start;
  std::uint32_t rep;
};

void run_one_walk(Walker& walker, const WalkTask& task, const WalkConfig& cfg,
                  std::uint32_t min_keep, std::vector<node_id>& path,
                  CorpusStats& stats, bool& keep) {
  walker.begin_walk(task.start, Rng::stream(cfg.seed, task.start, task.rep));
  path.clear();
  path.push_back(task.start);
  for (std::uint32_t s = 0; s < cfg.walk_length; ++s) {
    auto next = walker.step();
    if (!next) break;
    path.push_back(*next);
  }
  stats.steps += path.size() - 1;
  if (path.size() < cfg.walk_length + 1) stats.truncated++;
  keep = path.size() >= min_keep;
  if (keep)
    stats.walks++;
  else
    stats.discarded++;
}

}  // namespace

CorpusStats walk_corpus(const TypedGraph& g, const WalkerSpec& spec,
                        const WalkConfig& cfg, const PathSink& sink) {
  spec.validate(g);
  if (cfg.walk_times < 1) fail("walk_times must be >= 1");
  const std::uint32_t min_keep =
      cfg.min_keep_nodes ? cfg.min_keep_nodes : default_min_keep(spec);
  if (cfg.walk_length + 1 < min_keep)
    fail("walk_length ", cfg.walk_length, " is shorter than the chain window");

  std::vector<type_id> start_types =
      cfg.start_types ? *cfg.start_types : spec.start_types(g);
  std::vector<bool> is_start_type(g.type_count(), false);
  for (type_id t : start_types)
    if (t < g.type_count()) is_start_type[t] = true;

  std::vector<WalkTask> tasks;
  for (node_id v = 0; v < g.node_count(); ++v) {
    if (!is_start_type[g.node_type(v)]) continue;
    for (std::uint32_t rep = 0; rep < cfg.walk_times; ++rep)
      tasks.push_back({v, rep});
  }

  CorpusStats stats;
  const std::uint32_t threads =
      cfg.global_occupation ? 1 : std::max<std::uint32_t>(cfg.threads, 1);

  if (threads == 1) {
    Walker walker(g, spec);
    walker.set_invariant_checks(cfg.invariant_checks);
    walker.set_global_occupation(cfg.global_occupation);
    std::vector<node_id> path;
    for (const auto& task : tasks) {
      bool keep = false;
      run_one_walk(walker, task, cfg, min_keep, path, stats, keep);
      if (keep && sink) sink(path);
    }
    return stats;
  }

  // Workers claim fixed-size chunks; finished chunks are flushed to the sink
  // in task order so output is identical for any thread count.
  const std::size_t chunk_size = 512;
  const std::size_t n_chunks = (tasks.size() + chunk_size - 1) / chunk_size;
  std::atomic<std::size_t> next_chunk{0};
  std::mutex mu;
  std::map<std::size_t, std::vector<std::vector<node_id>>> pending;
  std::size_t flush_next = 0;
  std::string worker_error;

  auto worker = [&] {
    try {
      Walker walker(g, spec);
      walker.set_invariant_checks(cfg.invariant_checks);
      std::vector<node_id> path;
      for (;;) {
        const std::size_t c = next_chunk.fetch_add(1);
        if (c >= n_chunks) return;
        const std::size_t lo = c * chunk_size;
        const std::size_t hi = std::min(tasks.size(), lo + chunk_size);
        std::vector<std::vector<node_id>> out;
        CorpusStats local;
        for (std::size_t i = lo; i < hi; ++i) {
          bool keep = false;
          run_one_walk(walker, tasks[i], cfg, min_keep, path, local, keep);
          if (keep) out.push_back(path);
        }
        std::lock_guard<std::mutex> lock(mu);
        stats.walks += local.walks;
        stats.truncated += local.truncated;
        stats.discarded += local.discarded;
        stats.steps += local.steps;
        pending.emplace(c, std::move(out));
        while (!pending.empty() && pending.begin()->first == flush_next) {
          if (sink)
            for (const auto& p : pending.begin()->second) sink(p);
          pending.erase(pending.begin());
          ++flush_next;
        }
      }
    } catch (const std::exception& e) {
      std::lock_guard<std::mutex> lock(mu);
      if (worker_error.empty()) worker_error = e.what();
    }
  };

  std::vector<std::thread> pool;
  for (std::uint32_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (!worker_error.empty()) throw Error(worker_error);
  return stats;
}

Corpus generate_corpus(const TypedGraph& g, const WalkerSpec& spec,
                       const WalkConfig& cfg) {
  Corpus corpus;
  corpus.stats = walk_corpus(g, spec, cfg, [&](std::span<const node_id> path) {
    corpus.paths.emplace_back(path.begin(), path.end());
  });
  return corpus;
}

void write_corpus(const Corpus& corpus, const TypedGraph& g,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write corpus file '", path, "'");
  for (const auto& walk : corpus.paths) {
    for (std::size_t i = 0; i < walk.size(); ++i) {
      if (i) out << ' ';
      out << g.node_name(walk[i]);
    }
    out << '\n';
  }
}

Corpus read_corpus(const TypedGraph& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open corpus file '", path, "'");
  Corpus corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<node_id> walk;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && line[pos] == ' ') ++pos;
      std::size_t start = pos;
      while (pos < line.size() && line[pos] != ' ') ++pos;
      if (pos == start) break;
      auto v = g.find_node(line.substr(start, pos - start));
      if (!v)
        fail(path, ":", line_no, ": corpus token '",
             line.substr(start, pos - start), "' is not a graph node");
      walk.push_back(*v);
    }
    if (!walk.empty()) {
      corpus.stats.walks++;
      corpus.stats.steps += walk.size() - 1;
      corpus.paths.push_back(std::move(walk));
    }
  }
  return corpus;
}

void write_corpus_stats(const CorpusStats& stats, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write stats file '", path, "'");
  out << "walks=" << stats.walks << '\n'
      << "truncated=" << stats.truncated << '\n'
      << "discarded=" << stats.discarded << '\n'
      << "steps=" << stats.steps << '\n';
}

bool is_path_instance(std::span<const node_id> path, const TypedGraph& g,
                      const MetaPath& mp) {
  if (path.empty()) return false;
  const std::size_t cycle = mp.length();
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (g.node_type(path[i]) != mp.types[i % cycle]) return false;
    if (i > 0) {
      auto nbrs = g.neighbors(path[i - 1], g.node_type(path[i]));
      if (!std::binary_search(nbrs.begin(), nbrs.end(), path[i])) return false;
    }
  }
  return true;
}

bool is_spacey_graph_walk(std::span<const node_id> path, const TypedGraph& g,
                          const SpaceyGraph& sg) {
  if (path.empty()) return false;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const type_id from = g.node_type(path[i - 1]);
    const type_id to = g.node_type(path[i]);
    bool reachable = false;
    for (type_id pred : sg.predecessors(from)) {
      if (auto next = sg.successor(pred, from); next && *next == to) {
        reachable = true;
        break;
      }
    }
    if (!reachable) return false;
    auto nbrs = g.neighbors(path[i - 1], to);
    if (!std::binary_search(nbrs.begin(), nbrs.end(), path[i])) return false;
  }
  return true;
}

bool respects_schema(std::span<const node_id> path, const TypedGraph& g,
                     const MetaSchema& schema) {
  if (path.empty()) return false;
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (!schema.has_edge(g.node_type(path[i - 1]), g.node_type(path[i])))
      return false;
    auto nbrs = g.neighbors(path[i - 1], g.node_type(path[i]));
    if (!std::binary_search(nbrs.begin(), nbrs.end(), path[i])) return false;
  }
  return true;
}

std::vector<double> y_distribution(const TypedGraph& g,
                                   const OccupationVector& occ,
                                   std::optional<node_id> previous,
                                   std::span<const type_id> pred_types,
                                   double alpha) {
  std::vector<double> dist(g.node_count(), 0.0);
  const double total = static_cast<double>(occ.restricted_mass(pred_types));
  if (total <= 0) fail("no restricted occupation mass");
  for (type_id t : pred_types) {
    for (node_id v : g.nodes_of_type(t))
      dist[v] += alpha * (1.0 + occ.visit_count(v)) / total;
  }
  if (previous) {
    dist[*previous] += 1.0 - alpha;
  } else if (alpha < 1.0) {
    fail("y distribution without a previous node requires alpha = 1");
  }
  return dist;
}

namespace {

void add_branch_distribution(std::vector<double>& dist, const TypedGraph& g,
                             const OccupationVector& occ, node_id cur,
                             std::span<const type_id> cands, double alpha) {
  std::uint64_t total = 0;
  for (type_id t : cands) total += occ.restricted_mass({&t, 1});
  for (type_id t : cands) {
    const double z =
        static_cast<double>(occ.restricted_mass({&t, 1})) / static_cast<double>(total);
    const double type_prob =
        (1.0 - alpha) / static_cast<double>(cands.size()) + alpha * z;
    auto nbrs = g.neighbors(cur, t);
    for (node_id k : nbrs)
      dist[k] += type_prob / static_cast<double>(nbrs.size());
  }
}

}  // namespace

std::vector<double> metagraph_step_distribution(const TypedGraph& g,
                                                const MetaGraph& mg,
                                                const OccupationVector& occ,
                                                node_id y, node_id cur,
                                                double alpha) {
  std::vector<double> dist(g.node_count(), 0.0);
  std::vector<type_id> cands;
  filter_candidates(g, cur, mg.successors(g.node_type(y), g.node_type(cur)),
                    cands);
  if (cands.empty()) return dist;
  add_branch_distribution(dist, g, occ, cur, cands, alpha);
  return dist;
}

std::vector<double> metaschema_step_distribution(const TypedGraph& g,
                                                 const MetaSchema& schema,
                                                 const OccupationVector& occ,
                                                 node_id cur, double alpha) {
  std::vector<double> dist(g.node_count(), 0.0);
  std::vector<type_id> cands;
  for (type_id t : g.adjacent_types(cur))
    if (schema.has_edge(g.node_type(cur), t)) cands.push_back(t);
  if (cands.empty()) return dist;
  add_branch_distribution(dist, g, occ, cur, cands, alpha);
  return dist;
}

}  // namespace hinwalk
