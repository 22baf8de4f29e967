#include "hinwalk/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <unordered_set>

namespace hinwalk {

std::string_view edge_op_name(EdgeOp op) {
  switch (op) {
    case EdgeOp::average: return "average";
    case EdgeOp::hadamard: return "hadamard";
    case EdgeOp::weighted_l1: return "weighted-l1";
    case EdgeOp::weighted_l2: return "weighted-l2";
  }
  return "?";
}

std::vector<double> edge_features(std::span<const double> u,
                                  std::span<const double> v, EdgeOp op) {
  if (u.size() != v.size()) fail("edge feature vectors have different dimensions");
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    switch (op) {
      case EdgeOp::average: out[i] = (u[i] + v[i]) / 2.0; break;
      case EdgeOp::hadamard: out[i] = u[i] * v[i]; break;
      case EdgeOp::weighted_l1: out[i] = std::abs(u[i] - v[i]); break;
      case EdgeOp::weighted_l2:
        out[i] = (u[i] - v[i]) * (u[i] - v[i]);
        break;
    }
  }
  return out;
}

LogRegModel train_logreg_ovr(const std::vector<std::vector<double>>& features,
                             const std::vector<std::vector<int>>& labels,
                             std::size_t n_labels, double l2, int iters,
                             double lr) {
  if (features.empty() || features.size() != labels.size())
    fail("classifier needs aligned nonempty features and labels");
  if (n_labels < 2) fail("classifier needs at least two classes");
  const std::size_t n = features.size();
  const std::size_t d = features.front().size();
  for (const auto& f : features)
    if (f.size() != d) fail("inconsistent feature dimensions");

  LogRegModel model;
  model.n_labels = n_labels;
  model.dim = d;
  model.weights.assign(n_labels * d, 0.0);
  model.bias.assign(n_labels, 0.0);

  std::size_t max_labels_per_sample = 0;
  for (const auto& ls : labels)
    max_labels_per_sample = std::max(max_labels_per_sample, ls.size());
  model.multilabel = max_labels_per_sample > 1;

  std::vector<char> y(n);
  std::vector<double> grad(d);
  for (std::size_t label = 0; label < n_labels; ++label) {
    for (std::size_t s = 0; s < n; ++s)
      y[s] = std::find(labels[s].begin(), labels[s].end(),
                       static_cast<int>(label)) != labels[s].end();
    double* w = &model.weights[label * d];
    double& b = model.bias[label];
    for (int it = 0; it < iters; ++it) {
      std::fill(grad.begin(), grad.end(), 0.0);
      double grad_b = 0;
      for (std::size_t s = 0; s < n; ++s) {
        const auto& x = features[s];
        double z = b;
        for (std::size_t i = 0; i < d; ++i) z += w[i] * x[i];
        const double err = logistic(z) - (y[s] ? 1.0 : 0.0);
        for (std::size_t i = 0; i < d; ++i) grad[i] += err * x[i];
        grad_b += err;
      }
      const double inv_n = 1.0 / static_cast<double>(n);
      for (std::size_t i = 0; i < d; ++i)
        w[i] -= lr * (grad[i] * inv_n + l2 * w[i]);
      b -= lr * grad_b * inv_n;
    }
  }
  return model;
}

std::vector<double> logreg_scores(const LogRegModel& model,
                                  std::span<const double> features) {
  std::vector<double> scores(model.n_labels);
  for (std::size_t label = 0; label < model.n_labels; ++label) {
    const double* w = &model.weights[label * model.dim];
    double z = model.bias[label];
    for (std::size_t i = 0; i < model.dim; ++i) z += w[i] * features[i];
    scores[label] = logistic(z);
  }
  return scores;
}

std::vector<std::vector<int>> logreg_predict(
    const LogRegModel& model, const std::vector<std::vector<double>>& features) {
  std::vector<std::vector<int>> out(features.size());
  for (std::size_t s = 0; s < features.size(); ++s) {
    auto scores = logreg_scores(model, features[s]);
    if (model.multilabel) {
      for (std::size_t label = 0; label < scores.size(); ++label)
        if (scores[label] > 0.5) out[s].push_back(static_cast<int>(label));
    } else {
      const auto best = std::max_element(scores.begin(), scores.end());
      out[s].push_back(static_cast<int>(best - scores.begin()));
    }
  }
  return out;
}

namespace {

struct F1Counts {
  std::uint64_t tp = 0, fp = 0, fn = 0;
};

std::vector<F1Counts> per_label_counts(
    const std::vector<std::vector<int>>& predicted,
    const std::vector<std::vector<int>>& truth, std::size_t n_labels) {
  if (predicted.size() != truth.size() || predicted.empty())
    fail("predictions and truth must be aligned and nonempty");
  std::vector<F1Counts> counts(n_labels);
  std::vector<char> has_pred(n_labels), has_true(n_labels);
  for (std::size_t s = 0; s < predicted.size(); ++s) {
    std::fill(has_pred.begin(), has_pred.end(), 0);
    std::fill(has_true.begin(), has_true.end(), 0);
    for (int l : predicted[s]) has_pred[l] = 1;
    for (int l : truth[s]) has_true[l] = 1;
    for (std::size_t l = 0; l < n_labels; ++l) {
      if (has_pred[l] && has_true[l]) counts[l].tp++;
      else if (has_pred[l]) counts[l].fp++;
      else if (has_true[l]) counts[l].fn++;
    }
  }
  return counts;
}

}  // namespace

double micro_f1(const std::vector<std::vector<int>>& predicted,
                const std::vector<std::vector<int>>& truth,
                std::size_t n_labels) {
  auto counts = per_label_counts(predicted, truth, n_labels);
  std::uint64_t tp = 0, fp = 0, fn = 0;
  for (const auto& c : counts) {
    tp += c.tp;
    fp += c.fp;
    fn += c.fn;
  }
  const double denom = static_cast<double>(2 * tp + fp + fn);
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
}

double macro_f1(const std::vector<std::vector<int>>& predicted,
                const std::vector<std::vector<int>>& truth,
                std::size_t n_labels) {
  auto counts = per_label_counts(predicted, truth, n_labels);
  double sum = 0;
  for (const auto& c : counts) {
    const double denom = static_cast<double>(2 * c.tp + c.fp + c.fn);
    sum += denom == 0 ? 0.0 : 2.0 * static_cast<double>(c.tp) / denom;
  }
  return sum / static_cast<double>(n_labels);
}

double mean(std::span<const double> v) {
  if (v.empty()) fail("mean of empty vector");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
  const double m = mean(v);
  double acc = 0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / static_cast<double>(v.size());
}

ClassificationReport classification_protocol(
    const std::vector<std::vector<double>>& features,
    const std::vector<std::vector<int>>& labels, std::size_t n_labels,
    unsigned repeats, double train_fraction, std::uint64_t seed) {
  const std::size_t n = features.size();
  if (n < 2) fail("too few labeled nodes to split");
  ClassificationReport report;
  for (unsigned run = 0; run < repeats; ++run) {
    Rng rng(Rng::stream(seed, 0xc1a5, run));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    // Fisher-Yates with our own rng for cross-platform determinism.
    for (std::size_t i = n - 1; i > 0; --i)
      std::swap(order[i], order[rng.next_below(i + 1)]);
    const std::size_t n_train =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(
                                     train_fraction * static_cast<double>(n))));
    if (n_train >= n) fail("too few labeled nodes to split");

    std::vector<std::vector<double>> train_x, test_x;
    std::vector<std::vector<int>> train_y, test_y;
    for (std::size_t i = 0; i < n; ++i) {
      if (i < n_train) {
        train_x.push_back(features[order[i]]);
        train_y.push_back(labels[order[i]]);
      } else {
        test_x.push_back(features[order[i]]);
        test_y.push_back(labels[order[i]]);
      }
    }
    auto model = train_logreg_ovr(train_x, train_y, n_labels);
    auto preds = logreg_predict(model, test_x);
    report.micro_runs.push_back(micro_f1(preds, test_y, n_labels));
    report.macro_runs.push_back(macro_f1(preds, test_y, n_labels));
  }
  report.micro_mean = mean(report.micro_runs);
  report.micro_var = variance(report.micro_runs);
  report.macro_mean = mean(report.macro_runs);
  report.macro_var = variance(report.macro_runs);
  return report;
}

LabelSet load_labels(const TypedGraph& g, const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open labels file '", path, "'");
  LabelSet out;
  std::map<std::string, int> label_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find_first_of("\t ");
    if (tab == std::string::npos)
      fail(path, ":", line_no, ": malformed label line (want `<id> <labels>`)");
    const std::string name = line.substr(0, tab);
    auto v = g.find_node(name);
    if (!v) fail(path, ":", line_no, ": unknown node '", name, "'");
    std::vector<int> ids;
    std::size_t pos = tab + 1;
    while (pos <= line.size()) {
      auto comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      std::string label = line.substr(pos, comma - pos);
      while (!label.empty() && (label.front() == ' ' || label.front() == '\t'))
        label.erase(label.begin());
      if (!label.empty()) {
        auto [it, inserted] =
            label_ids.emplace(label, static_cast<int>(label_ids.size()));
        if (inserted) out.label_names.push_back(label);
        if (std::find(ids.begin(), ids.end(), it->second) == ids.end())
          ids.push_back(it->second);
      }
      pos = comma + 1;
    }
    if (ids.empty())
      fail(path, ":", line_no, ": node '", name, "' has no labels");
    out.nodes.push_back(*v);
    out.labels.push_back(std::move(ids));
  }
  return out;
}

namespace {
std::uint64_t encode_pair(node_id u, node_id v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}
}  // namespace

LpSplit lp_split(const TypedGraph& g, std::pair<type_id, type_id> edge_type,
                 double hide_fraction, std::size_t sample, std::uint64_t seed) {
  const auto [ta, tb] = edge_type;
  std::vector<std::pair<node_id, node_id>> typed_edges;
  std::unordered_set<std::uint64_t> all_edges;
  for (auto [u, v] : g.edge_list()) {
    all_edges.insert(encode_pair(u, v));
    const auto tu = g.node_type(u);
    const auto tv = g.node_type(v);
    if ((tu == ta && tv == tb) || (tu == tb && tv == ta))
      typed_edges.emplace_back(u, v);
  }
  if (typed_edges.empty())
    fail("no edges of type ", g.type_name(ta), "-", g.type_name(tb));

  const std::size_t n_hide = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::llround(hide_fraction * static_cast<double>(typed_edges.size()))));

  // A hidden set may orphan nodes of this edge type; retry a bounded number
  // of times before proceeding with a warning.
  std::vector<char> keep(typed_edges.size());
  LpSplit split;
  bool protected_ok = false;
  Rng shuffle_rng(Rng::stream(seed, 0x1b, static_cast<std::uint64_t>(ta) << 16 | tb));
  std::vector<std::size_t> order(typed_edges.size());
  std::vector<std::uint32_t> remaining(g.node_count());
  for (int attempt = 0; attempt < 100 && !protected_ok; ++attempt) {
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size() - 1; i > 0; --i)
      std::swap(order[i], order[shuffle_rng.next_below(i + 1)]);
    std::fill(keep.begin(), keep.end(), 1);
    for (std::size_t i = 0; i < n_hide; ++i) keep[order[i]] = 0;

    std::fill(remaining.begin(), remaining.end(), 0);
    for (std::size_t e = 0; e < typed_edges.size(); ++e) {
      if (!keep[e]) continue;
      remaining[typed_edges[e].first]++;
      remaining[typed_edges[e].second]++;
    }
    protected_ok = true;
    for (std::size_t e = 0; e < typed_edges.size(); ++e) {
      if (keep[e]) continue;
      if (remaining[typed_edges[e].first] == 0 ||
          remaining[typed_edges[e].second] == 0) {
        protected_ok = false;
        break;
      }
    }
  }
  split.isolation_warning = !protected_ok;

  std::vector<std::pair<node_id, node_id>> hidden;
  for (std::size_t i = 0; i < n_hide; ++i) hidden.push_back(typed_edges[order[i]]);

  // Residual graph keeps everything except the hidden edges.
  TypedGraph::Builder builder;
  for (node_id v = 0; v < g.node_count(); ++v)
    builder.add_node(g.node_name(v), g.type_name(g.node_type(v)));
  std::unordered_set<std::uint64_t> hidden_set;
  for (auto [u, v] : hidden) hidden_set.insert(encode_pair(u, v));
  for (auto [u, v] : g.edge_list())
    if (!hidden_set.count(encode_pair(u, v))) builder.add_edge(u, v);
  split.train_graph = std::move(builder).build();

  Rng rng(Rng::stream(seed, 0x905, static_cast<std::uint64_t>(ta) << 16 | tb));
  std::vector<std::pair<node_id, node_id>> positives;
  if (hidden.size() <= sample) {
    positives = hidden;
    split.fallback_all_hidden = true;
  } else {
    for (std::size_t i = hidden.size() - 1; i > 0; --i)
      std::swap(hidden[i], hidden[rng.next_below(i + 1)]);
    positives.assign(hidden.begin(), hidden.begin() + sample);
  }

  // Negatives: uniform same-type non-edges, never in the full edge set.
  const auto& nodes_a = g.nodes_of_type(ta);
  const auto& nodes_b = g.nodes_of_type(tb);
  if (nodes_a.empty() || nodes_b.empty())
    fail("edge type has no candidate node pairs");
  std::unordered_set<std::uint64_t> negative_seen;
  std::vector<std::pair<node_id, node_id>> negatives;
  const std::size_t want = positives.size();
  std::uint64_t attempts = 0;
  const std::uint64_t max_attempts = 1000 * (want + 1);
  while (negatives.size() < want && attempts < max_attempts) {
    ++attempts;
    const node_id u = nodes_a[rng.next_below(nodes_a.size())];
    const node_id v = nodes_b[rng.next_below(nodes_b.size())];
    if (u == v) continue;
    const auto key = encode_pair(u, v);
    if (all_edges.count(key) || negative_seen.count(key)) continue;
    negative_seen.insert(key);
    negatives.emplace_back(u, v);
  }
  if (negatives.size() < want)
    fail("could not sample ", want, " negative edges of type ", g.type_name(ta),
         "-", g.type_name(tb));

  auto halve = [](std::vector<std::pair<node_id, node_id>>& src,
                  std::vector<std::pair<node_id, node_id>>& train,
                  std::vector<std::pair<node_id, node_id>>& test) {
    const std::size_t half = src.size() / 2;
    train.assign(src.begin(), src.begin() + half);
    test.assign(src.begin() + half, src.end());
  };
  halve(positives, split.train_pos, split.test_pos);
  halve(negatives, split.train_neg, split.test_neg);
  if (split.train_pos.empty() || split.test_pos.empty())
    fail("too few positive edges to split");
  return split;
}

LinkPredictionReport link_prediction_scores(const LpSplit& split,
                                            const EmbeddingMatrix& emb) {
  LinkPredictionReport report;
  for (EdgeOp op : k_all_edge_ops) {
    std::vector<std::vector<double>> train_x, test_x;
    std::vector<std::vector<int>> train_y;
    auto add = [&](const std::vector<std::pair<node_id, node_id>>& pairs,
                   int label, bool train) {
      for (auto [u, v] : pairs) {
        auto f = edge_features(emb.center(u), emb.center(v), op);
        if (train) {
          train_x.push_back(std::move(f));
          train_y.push_back({label});
        } else {
          test_x.push_back(std::move(f));
        }
      }
    };
    add(split.train_pos, 1, true);
    add(split.train_neg, 0, true);
    add(split.test_pos, 1, false);
    add(split.test_neg, 0, false);
    auto model = train_logreg_ovr(train_x, train_y, 2);
    std::vector<double> scores;
    std::vector<int> labels;
    for (std::size_t i = 0; i < test_x.size(); ++i) {
      scores.push_back(logreg_scores(model, test_x[i])[1]);
      labels.push_back(i < split.test_pos.size() ? 1 : 0);
    }
    report.auc_per_op.push_back(auc(scores, labels));
  }
  report.mean_auc = mean(report.auc_per_op);
  return report;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size() || scores.empty())
    fail("auc needs aligned nonempty scores and labels");
  std::size_t n_pos = 0, n_neg = 0;
  for (int l : labels) (l ? n_pos : n_neg)++;
  if (n_pos == 0 || n_neg == 0) fail("auc needs both classes present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  // Midranks over tied score groups.
  double rank_sum_pos = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (std::size_t q = i; q < j; ++q)
      if (labels[order[q]]) rank_sum_pos += midrank;
    i = j;
  }
  const double u_stat =
      rank_sum_pos - static_cast<double>(n_pos) * (static_cast<double>(n_pos) + 1) / 2.0;
  return u_stat / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double js_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) fail("js divergence needs aligned supports");
  auto term = [](double a, double m) {
    if (a <= 0) return 0.0;  // 0 log 0 := 0
    return a * std::log2(a / m);
  };
  double js = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (m <= 0) continue;
    js += 0.5 * term(p[i], m) + 0.5 * term(q[i], m);
  }
  // Mathematically in [0, 1]; clamp away summation round-off.
  return std::min(1.0, std::max(0.0, js));
}

std::vector<double> stationarity_trace(const TypedGraph& g,
                                       const WalkerSpec& spec,
                                       unsigned n_walks, unsigned max_step,
                                       std::uint64_t seed, TraceMode mode) {
  if (max_step < 1) fail("stationarity trace needs walks of at least 2 steps");
  spec.validate(g);
  std::vector<node_id> starts;
  {
    auto types = spec.start_types(g);
    std::vector<bool> is_start(g.type_count(), false);
    for (type_id t : types) is_start[t] = true;
    for (node_id v = 0; v < g.node_count(); ++v)
      if (is_start[g.node_type(v)]) starts.push_back(v);
  }
  if (starts.empty()) fail("no start nodes for the stationarity trace");

  // node-at-step histograms across walks
  std::vector<std::vector<double>> hist(max_step + 1,
                                        std::vector<double>(g.node_count(), 0.0));
  std::vector<std::uint64_t> alive(max_step + 1, 0);
  Rng start_rng(Rng::stream(seed, 0x71ace, 0));
  Walker walker(g, spec);
  for (unsigned w = 0; w < n_walks; ++w) {
    const node_id start = starts[start_rng.next_below(starts.size())];
    walker.begin_walk(start, Rng::stream(seed, w, 0x517e));
    hist[0][start] += 1;
    alive[0]++;
    for (unsigned s = 1; s <= max_step; ++s) {
      auto next = walker.step();
      if (!next) break;
      hist[s][*next] += 1;
      alive[s]++;
    }
  }

  if (mode == TraceMode::cumulative) {
    // Fold the per-step histograms into running prefix distributions.
    std::vector<double> acc(g.node_count(), 0.0);
    std::uint64_t total = 0;
    std::vector<std::vector<double>> prefix;
    for (unsigned s = 0; s <= max_step; ++s) {
      if (alive[s] == 0) break;
      for (std::size_t v = 0; v < acc.size(); ++v) acc[v] += hist[s][v];
      total += alive[s];
      auto d = acc;
      for (auto& x : d) x /= static_cast<double>(total);
      prefix.push_back(std::move(d));
    }
    std::vector<double> trace;
    for (std::size_t s = 0; s + 1 < prefix.size(); ++s)
      trace.push_back(js_divergence(prefix[s], prefix[s + 1]));
    return trace;
  }

  std::vector<double> trace;
  for (unsigned s = 0; s < max_step; ++s) {
    if (alive[s] == 0 || alive[s + 1] == 0) break;
    auto a = hist[s];
    auto b = hist[s + 1];
    for (auto& x : a) x /= static_cast<double>(alive[s]);
    for (auto& x : b) x /= static_cast<double>(alive[s + 1]);
    trace.push_back(js_divergence(a, b));
  }
  return trace;
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "walk_times") return SweepAxis::walk_times;
  if (name == "walk_length") return SweepAxis::walk_length;
  if (name == "alpha") return SweepAxis::alpha;
  fail("unknown sweep axis '", name, "' (want walk_times|walk_length|alpha)");
}

std::vector<SweepRow> parameter_sweep(const TypedGraph& g, WalkerSpec spec,
                                      SweepAxis axis,
                                      std::span<const double> values,
                                      const PipelineConfig& base,
                                      const LabelSet& labels,
                                      std::size_t n_labels) {
  if (values.empty()) fail("sweep needs at least one value");
  std::vector<SweepRow> rows;
  for (double value : values) {
    WalkConfig wcfg = base.walk;
    switch (axis) {
      case SweepAxis::walk_times:
        wcfg.walk_times = static_cast<std::uint32_t>(value);
        break;
      case SweepAxis::walk_length:
        wcfg.walk_length = static_cast<std::uint32_t>(value);
        break;
      case SweepAxis::alpha:
        spec.alpha = value;
        break;
    }
    auto corpus = generate_corpus(g, spec, wcfg);
    auto emb = train(corpus, g, base.train);
    std::vector<std::vector<double>> features;
    std::vector<std::vector<int>> node_labels;
    for (std::size_t i = 0; i < labels.nodes.size(); ++i) {
      auto row = emb.center(labels.nodes[i]);
      features.emplace_back(row.begin(), row.end());
      node_labels.push_back(labels.labels[i]);
    }
    rows.push_back({value, classification_protocol(features, node_labels, n_labels,
                                                   base.repeats,
                                                   base.train_fraction,
                                                   base.seed)});
  }
  return rows;
}

// Regularized incomplete gamma by series (x < a+1) or continued fraction.
double gamma_q(double a, double x) {
  if (x < 0 || a <= 0) fail("gamma_q domain error");
  if (x == 0) return 1.0;
  if (x < a + 1.0) {
    // P(a,x) series; Q = 1 - P.
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * 1e-15) break;
    }
    const double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    return 1.0 - p;
  }
  // Lentz continued fraction for Q(a,x).
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double chi_square_pvalue(double stat, double dof) {
  if (dof <= 0) return 1.0;
  return gamma_q(dof / 2.0, stat / 2.0);
}

Chi2Result chi_square_homogeneity(std::span<const std::uint64_t> a,
                                  std::span<const std::uint64_t> b) {
  if (a.size() != b.size()) fail("chi-square tables must be aligned");
  double total_a = 0, total_b = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    total_a += static_cast<double>(a[i]);
    total_b += static_cast<double>(b[i]);
  }
  if (total_a == 0 || total_b == 0) fail("chi-square needs nonempty samples");
  Chi2Result result;
  unsigned used = 0;
  const double total = total_a + total_b;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double col = static_cast<double>(a[i] + b[i]);
    if (col == 0) continue;
    ++used;
    const double ea = total_a * col / total;
    const double eb = total_b * col / total;
    const double da = static_cast<double>(a[i]) - ea;
    const double db = static_cast<double>(b[i]) - eb;
    result.stat += da * da / ea + db * db / eb;
  }
  result.dof = used > 1 ? static_cast<double>(used - 1) : 0.0;
  result.p = chi_square_pvalue(result.stat, result.dof);
  return result;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) fail("line fit needs >= 2 points");
  const double mx = mean(x);
  const double my = mean(y);
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy == 0 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

}  // namespace hinwalk
