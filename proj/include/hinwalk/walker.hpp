#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hinwalk/graph.hpp"
#include "hinwalk/meta.hpp"

namespace hinwalk {

// Per-trajectory visit histogram with +1 smoothing:
//   w_i(n) = (1 + counts[i]) / (n + N).
// Visit counts live in a hash map sized by the walk, not the graph, so a
// walker's working set stays cache-resident on large graphs; the per-type
// visit history makes restricted draws exact and O(1).
class OccupationVector {
 public:
  explicit OccupationVector(const TypedGraph& g);

  void record_visit(node_id v);
  void reset();

  double weight(node_id v) const {
    return (1.0 + visit_count(v)) /
           static_cast<double>(steps_ + g_->node_count());
  }
  double type_mass(type_id t) const {
    return static_cast<double>(type_size_[t] + type_visits_[t]) /
           static_cast<double>(steps_ + g_->node_count());
  }
  std::uint64_t steps() const { return steps_; }
  std::uint32_t visit_count(node_id v) const {
    auto it = counts_.find(v);
    return it == counts_.end() ? 0 : it->second;
  }

  // Draws a node with probability proportional to its smoothed weight,
  // restricted to the given types. Total restricted mass must be positive.
  node_id sample_restricted(std::span<const type_id> types, Rng& rng) const;

  // Sum of restricted integer mass (n_t + visits_t); 0 means no valid draw.
  std::uint64_t restricted_mass(std::span<const type_id> types) const;
  std::uint64_t type_mass_int(type_id t) const {
    return type_size_[t] + type_visits_[t];
  }

  // O(N); used by invariant checks only.
  double total_weight() const;

 private:
  const TypedGraph* g_;
  std::unordered_map<node_id, std::uint32_t> counts_;
  std::vector<std::uint32_t> type_size_;
  std::vector<std::uint64_t> type_visits_;
  std::vector<std::vector<node_id>> history_by_type_;
  std::uint64_t steps_ = 0;
};

enum class WalkMode { markovian, metapath, metagraph, metaschema };

WalkMode parse_walk_mode(std::string_view name);
std::string_view walk_mode_name(WalkMode mode);

// Non-owning bundle of guidance for one walker family.
struct WalkerSpec {
  WalkMode mode = WalkMode::metapath;
  const MetaPath* path = nullptr;       // markovian / metapath
  const SpaceyGraph* spacey = nullptr;  // markovian / metapath
  const MetaGraph* metagraph = nullptr;
  const MetaSchema* schema = nullptr;  // metaschema
  double alpha = 0.8;

  static WalkerSpec markovian(const MetaPath& mp, const SpaceyGraph& sg);
  static WalkerSpec spacey_metapath(const MetaPath& mp, const SpaceyGraph& sg,
                                    double alpha);
  static WalkerSpec spacey_metagraph(const MetaGraph& mg, double alpha);
  static WalkerSpec spacey_metaschema(const MetaSchema& schema, double alpha);

  void validate(const TypedGraph& g) const;
  // Types whose nodes start walks under this guidance.
  std::vector<type_id> start_types(const TypedGraph& g) const;
};

// One walk trajectory. step() returns the next node or nullopt on a dead end.
class Walker {
 public:
  Walker(const TypedGraph& g, const WalkerSpec& spec);

  void begin_walk(node_id start, std::uint64_t stream_seed);
  std::optional<node_id> step();

  node_id current() const { return current_; }
  std::optional<node_id> previous() const { return previous_; }
  const OccupationVector& occupation() const { return occupation_; }
  OccupationVector& occupation() { return occupation_; }

  // When enabled, every step re-checks the occupation normalization and the
  // totality of the spacey draw, throwing on violation.
  void set_invariant_checks(bool on) { check_invariants_ = on; }
  std::uint64_t checked_steps() const { return checked_steps_; }

  // Keeps the occupation vector across begin_walk calls.
  void set_global_occupation(bool on) { global_occupation_ = on; }

 private:
  type_id draw_y_type(std::span<const type_id> preds);
  type_id choose_branch_type(std::span<const type_id> cands);
  std::optional<node_id> advance(type_id next_type);
  void check_step_invariants();

  const TypedGraph& g_;
  WalkerSpec spec_;
  OccupationVector occupation_;
  Rng rng_;
  node_id current_ = k_no_node;
  std::optional<node_id> previous_;
  std::vector<type_id> scratch_types_;
  bool check_invariants_ = false;
  bool global_occupation_ = false;
  std::uint64_t checked_steps_ = 0;
};

struct WalkConfig {
  std::uint32_t walk_times = 20;   // t: walks per start node
  std::uint32_t walk_length = 320; // l: steps per walk (path has <= l+1 nodes)
  std::uint64_t seed = 1;
  std::uint32_t threads = 1;
  // Truncated walks shorter than this many nodes are discarded;
  // 0 means chain order + 1.
  std::uint32_t min_keep_nodes = 0;
  bool global_occupation = false;  // share one occupation vector across walks
  bool invariant_checks = false;
  std::optional<std::vector<type_id>> start_types;  // override
};

struct CorpusStats {
  std::uint64_t walks = 0;
  std::uint64_t truncated = 0;
  std::uint64_t discarded = 0;
  std::uint64_t steps = 0;
};

struct Corpus {
  std::vector<std::vector<node_id>> paths;
  CorpusStats stats;
};

// Paths are delivered in canonical order (start node, then repetition)
// regardless of thread count.
using PathSink = std::function<void(std::span<const node_id>)>;

CorpusStats walk_corpus(const TypedGraph& g, const WalkerSpec& spec,
                        const WalkConfig& cfg, const PathSink& sink);
Corpus generate_corpus(const TypedGraph& g, const WalkerSpec& spec,
                       const WalkConfig& cfg);

// Corpus file: one walk per line, space-separated external node ids.
void write_corpus(const Corpus& corpus, const TypedGraph& g,
                  const std::string& path);
Corpus read_corpus(const TypedGraph& g, const std::string& path);
void write_corpus_stats(const CorpusStats& stats, const std::string& path);

// Validity checks used by tests and the acceptance suite.
bool is_path_instance(std::span<const node_id> path, const TypedGraph& g,
                      const MetaPath& mp);
bool is_spacey_graph_walk(std::span<const node_id> path, const TypedGraph& g,
                          const SpaceyGraph& sg);
bool respects_schema(std::span<const node_id> path, const TypedGraph& g,
                     const MetaSchema& schema);

// Exact per-step distributions, for oracle comparisons and diagnostics.
// y_distribution: probability of each node being chosen as the spaced-out
// history state Y, given the restriction to valid predecessor types.
std::vector<double> y_distribution(const TypedGraph& g,
                                   const OccupationVector& occ,
                                   std::optional<node_id> previous,
                                   std::span<const type_id> pred_types,
                                   double alpha);
// Next-node distribution of the meta-graph walker at a fixed state
// (Y = y, X = cur) under the given occupation.
std::vector<double> metagraph_step_distribution(const TypedGraph& g,
                                                const MetaGraph& mg,
                                                const OccupationVector& occ,
                                                node_id y, node_id cur,
                                                double alpha);
// Next-node distribution of the meta-schema walker at node cur.
std::vector<double> metaschema_step_distribution(const TypedGraph& g,
                                                 const MetaSchema& schema,
                                                 const OccupationVector& occ,
                                                 node_id cur, double alpha);

}  // namespace hinwalk
