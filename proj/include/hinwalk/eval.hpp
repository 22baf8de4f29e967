#pragma once

#include <string>
#include <vector>

#include "hinwalk/graph.hpp"
#include "hinwalk/skipgram.hpp"
#include "hinwalk/walker.hpp"

namespace hinwalk {

enum class EdgeOp { average, hadamard, weighted_l1, weighted_l2 };
inline constexpr EdgeOp k_all_edge_ops[] = {
    EdgeOp::average, EdgeOp::hadamard, EdgeOp::weighted_l1, EdgeOp::weighted_l2};
std::string_view edge_op_name(EdgeOp op);

std::vector<double> edge_features(std::span<const double> u,
                                  std::span<const double> v, EdgeOp op);

// Minimal one-vs-rest logistic regression trained by full-batch gradient
// descent; labels are per-sample sets of label ids in [0, n_labels).
struct LogRegModel {
  std::size_t n_labels = 0;
  std::size_t dim = 0;
  std::vector<double> weights;  // n_labels x dim
  std::vector<double> bias;     // n_labels
  bool multilabel = false;
};

LogRegModel train_logreg_ovr(const std::vector<std::vector<double>>& features,
                             const std::vector<std::vector<int>>& labels,
                             std::size_t n_labels, double l2 = 1e-4,
                             int iters = 500, double lr = 0.1);
// Per-label probabilities for one sample.
std::vector<double> logreg_scores(const LogRegModel& model,
                                  std::span<const double> features);
// Multilabel: every label with probability > 0.5; single-label: argmax.
std::vector<std::vector<int>> logreg_predict(
    const LogRegModel& model, const std::vector<std::vector<double>>& features);

double micro_f1(const std::vector<std::vector<int>>& predicted,
                const std::vector<std::vector<int>>& truth,
                std::size_t n_labels);
double macro_f1(const std::vector<std::vector<int>>& predicted,
                const std::vector<std::vector<int>>& truth,
                std::size_t n_labels);

struct ClassificationReport {
  std::vector<double> micro_runs, macro_runs;
  double micro_mean = 0, micro_var = 0;
  double macro_mean = 0, macro_var = 0;
};

// Repeated 50/50 (by default) splits of the labeled nodes; reports mean and
// population variance across repeats.
ClassificationReport classification_protocol(
    const std::vector<std::vector<double>>& features,
    const std::vector<std::vector<int>>& labels, std::size_t n_labels,
    unsigned repeats = 10, double train_fraction = 0.5, std::uint64_t seed = 1);

// Labels file: `<node-id> <TAB> <label>[,label...]`.
struct LabelSet {
  std::vector<node_id> nodes;
  std::vector<std::vector<int>> labels;
  std::vector<std::string> label_names;
};
LabelSet load_labels(const TypedGraph& g, const std::string& path);

struct LpSplit {
  TypedGraph train_graph;
  std::vector<std::pair<node_id, node_id>> train_pos, test_pos;
  std::vector<std::pair<node_id, node_id>> train_neg, test_neg;
  bool fallback_all_hidden = false;  // fewer than `sample` hidden edges
  bool isolation_warning = false;    // resampling could not protect all nodes
};

// Hides a fraction of the edges of one type pair, samples positive and
// negative examples, and splits both into equal train/test halves.
LpSplit lp_split(const TypedGraph& g, std::pair<type_id, type_id> edge_type,
                 double hide_fraction = 0.2, std::size_t sample = 2048,
                 std::uint64_t seed = 1);

struct LinkPredictionReport {
  std::vector<double> auc_per_op;  // aligned with k_all_edge_ops
  double mean_auc = 0;
};
LinkPredictionReport link_prediction_scores(const LpSplit& split,
                                            const EmbeddingMatrix& emb);

// Mann-Whitney AUC with midrank tie handling.
double auc(std::span<const double> scores, std::span<const int> labels);

// Jensen-Shannon divergence, base-2 logarithm; in [0, 1].
double js_divergence(std::span<const double> p, std::span<const double> q);

// snapshot: distribution of the nodes occupied at step s across walks.
// cumulative: distribution of all nodes visited up to step s, pooled across
// walks; this is the quantity whose stabilization signals stationarity (for
// meta-path walks, snapshot supports at consecutive steps are disjoint node
// types, so their JS pins at 1).
enum class TraceMode { snapshot, cumulative };

// Runs n_walks walks and reports, for each step s, the JS divergence between
// the node distributions at steps s and s+1.
std::vector<double> stationarity_trace(const TypedGraph& g,
                                       const WalkerSpec& spec,
                                       unsigned n_walks, unsigned max_step,
                                       std::uint64_t seed,
                                       TraceMode mode = TraceMode::snapshot);

enum class SweepAxis { walk_times, walk_length, alpha };
SweepAxis parse_sweep_axis(std::string_view name);

struct PipelineConfig {
  WalkConfig walk;
  TrainConfig train;
  unsigned repeats = 10;
  double train_fraction = 0.5;
  std::uint64_t seed = 1;
};

struct SweepRow {
  double value;
  ClassificationReport report;
};

// walk -> train -> classify for each axis value.
std::vector<SweepRow> parameter_sweep(const TypedGraph& g, WalkerSpec spec,
                                      SweepAxis axis,
                                      std::span<const double> values,
                                      const PipelineConfig& base,
                                      const LabelSet& labels,
                                      std::size_t n_labels);

// --- small statistics helpers ---

// Upper regularized incomplete gamma Q(a, x); chi-square survival function
// is Q(dof/2, stat/2).
double gamma_q(double a, double x);
double chi_square_pvalue(double stat, double dof);

struct Chi2Result {
  double stat = 0;
  double dof = 0;
  double p = 1;
};
// Two-sample homogeneity test over aligned count vectors.
Chi2Result chi_square_homogeneity(std::span<const std::uint64_t> a,
                                  std::span<const std::uint64_t> b);

struct LinearFit {
  double slope = 0, intercept = 0, r_squared = 1;
};
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> v);
// Population variance (divides by n).
double variance(std::span<const double> v);

}  // namespace hinwalk
