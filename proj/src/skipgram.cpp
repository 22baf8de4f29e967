#include "hinwalk/skipgram.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <thread>

namespace hinwalk {

namespace {
constexpr double k_neg_power = 0.75;
constexpr double k_min_lr_fraction = 1e-4;
}  // namespace

Vocabulary::Vocabulary(const Corpus& corpus, const TypedGraph& g)
    : counts_(g.node_count(), 0), type_nodes_(g.type_count()) {
  if (corpus.paths.empty()) fail("cannot build a vocabulary from an empty corpus");
  for (const auto& path : corpus.paths)
    for (node_id v : path) {
      if (v >= g.node_count()) fail("corpus token outside the graph's node set");
      counts_[v]++;
      ++total_;
    }
  for (node_id v = 0; v < g.node_count(); ++v) {
    if (counts_[v] == 0) continue;
    present_.push_back(v);
    type_nodes_[g.node_type(v)].push_back(v);
  }
  type_cdf_.resize(g.type_count());
  for (type_id t = 0; t < g.type_count(); ++t) {
    double acc = 0;
    type_cdf_[t].reserve(type_nodes_[t].size());
    for (node_id v : type_nodes_[t]) {
      acc += std::pow(static_cast<double>(counts_[v]), k_neg_power);
      type_cdf_[t].push_back(acc);
    }
  }
  double acc = 0;
  global_cdf_.reserve(present_.size());
  for (node_id v : present_) {
    acc += std::pow(static_cast<double>(counts_[v]), k_neg_power);
    global_cdf_.push_back(acc);
  }
}

namespace {
node_id draw_from_cdf(const std::vector<double>& cdf,
                      const std::vector<node_id>& nodes, Rng& rng) {
  if (cdf.empty()) fail("negative-sampling table is empty");
  const double u = rng.next_double() * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const std::size_t idx = std::min<std::size_t>(it - cdf.begin(), cdf.size() - 1);
  return nodes[idx];
}
}  // namespace

node_id Vocabulary::sample_negative(type_id t, Rng& rng) const {
  return draw_from_cdf(type_cdf_[t], type_nodes_[t], rng);
}

node_id Vocabulary::sample_negative_global(Rng& rng) const {
  return draw_from_cdf(global_cdf_, present_, rng);
}

bool EmbeddingMatrix::all_finite() const {
  auto ok = [](const std::vector<double>& v) {
    for (double x : v)
      if (!std::isfinite(x)) return false;
    return true;
  };
  return ok(center_) && ok(context_);
}

void for_each_window_pair(
    std::span<const node_id> path, std::uint32_t window,
    const std::function<void(node_id, node_id)>& fn) {
  const std::size_t len = path.size();
  for (std::size_t p = 0; p < len; ++p) {
    const std::size_t lo = p >= window ? p - window : 0;
    const std::size_t hi = std::min(len - 1, p + static_cast<std::size_t>(window));
    for (std::size_t q = lo; q <= hi; ++q)
      if (q != p) fn(path[p], path[q]);
  }
}

std::uint64_t window_pair_count(std::size_t path_len, std::uint32_t window) {
  std::uint64_t count = 0;
  for (std::size_t p = 0; p < path_len; ++p) {
    const std::size_t lo = p >= window ? p - window : 0;
    const std::size_t hi =
        path_len == 0 ? 0 : std::min(path_len - 1, p + static_cast<std::size_t>(window));
    count += hi - lo;  // excludes q == p
  }
  return count;
}

double logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {
double log_logistic(double x) {
  // log s(x), overflow-safe.
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}
}  // namespace

void sgd_step(EmbeddingMatrix& emb, node_id center, node_id context,
              std::span<const node_id> negatives, double lr) {
  const std::uint32_t d = emb.dim();
  auto v_cen = emb.center(center);
  auto u_ctx = emb.context(context);

  double dot_pos = 0;
  for (std::uint32_t i = 0; i < d; ++i) dot_pos += u_ctx[i] * v_cen[i];
  const double g_pos = 1.0 - logistic(dot_pos);

  // Accumulate the center gradient from the pre-update context vectors.
  std::vector<double> v_grad(d, 0.0);
  for (std::uint32_t i = 0; i < d; ++i) v_grad[i] = g_pos * u_ctx[i];

  std::vector<double> g_negs(negatives.size());
  for (std::size_t s = 0; s < negatives.size(); ++s) {
    auto u_neg = emb.context(negatives[s]);
    double dot = 0;
    for (std::uint32_t i = 0; i < d; ++i) dot += u_neg[i] * v_cen[i];
    const double g_neg = logistic(dot);
    g_negs[s] = g_neg;
    for (std::uint32_t i = 0; i < d; ++i) v_grad[i] -= g_neg * u_neg[i];
  }

  for (std::uint32_t i = 0; i < d; ++i) u_ctx[i] += lr * g_pos * v_cen[i];
  for (std::size_t s = 0; s < negatives.size(); ++s) {
    auto u_neg = emb.context(negatives[s]);
    for (std::uint32_t i = 0; i < d; ++i) u_neg[i] -= lr * g_negs[s] * v_cen[i];
  }
  for (std::uint32_t i = 0; i < d; ++i) v_cen[i] += lr * v_grad[i];
}

double pair_objective(const EmbeddingMatrix& emb, node_id center,
                      node_id context, std::span<const node_id> negatives) {
  const std::uint32_t d = emb.dim();
  auto v_cen = emb.center(center);
  auto u_ctx = emb.context(context);
  double dot = 0;
  for (std::uint32_t i = 0; i < d; ++i) dot += u_ctx[i] * v_cen[i];
  double obj = log_logistic(dot);
  for (node_id neg : negatives) {
    auto u_neg = emb.context(neg);
    double nd = 0;
    for (std::uint32_t i = 0; i < d; ++i) nd += u_neg[i] * v_cen[i];
    obj += log_logistic(-nd);
  }
  return obj;
}

namespace {

void init_embeddings(EmbeddingMatrix& emb, std::uint64_t seed) {
  Rng rng(Rng::stream(seed, 0x1417));
  const std::uint32_t d = emb.dim();
  const double half = 0.5 / static_cast<double>(d);
  for (node_id v = 0; v < emb.rows(); ++v) {
    auto row = emb.center(v);
    for (std::uint32_t i = 0; i < d; ++i)
      row[i] = (rng.next_double() - 0.5) * 2.0 * half;
  }
}

struct PairTrainer {
  const Vocabulary& vocab;
  const TypedGraph& g;
  const TrainConfig& cfg;
  EmbeddingMatrix& emb;
  std::uint64_t total_pairs;

  void train_pair(node_id center, node_id context, std::uint64_t processed,
                  Rng& rng, std::vector<node_id>& negatives) const {
    const double frac =
        1.0 - static_cast<double>(processed) / static_cast<double>(total_pairs);
    const double lr = cfg.lr0 * std::max(frac, k_min_lr_fraction);
    negatives.clear();
    const type_id ctx_type = g.node_type(context);
    for (std::uint32_t s = 0; s < cfg.negatives; ++s) {
      const node_id neg = cfg.per_type_negatives
                              ? vocab.sample_negative(ctx_type, rng)
                              : vocab.sample_negative_global(rng);
      // word2vec convention: a draw equal to the positive node is skipped.
      if (neg == context) continue;
      negatives.push_back(neg);
    }
    sgd_step(emb, center, context, negatives, lr);
  }
};

}  // namespace

EmbeddingMatrix train(const Corpus& corpus, const TypedGraph& g,
                      const TrainConfig& cfg, TrainStats* stats) {
  if (cfg.dim < 1 || cfg.window < 1 || cfg.negatives < 1 || cfg.lr0 <= 0)
    fail("train config out of range");
  Vocabulary vocab(corpus, g);
  EmbeddingMatrix emb(g.node_count(), cfg.dim);
  init_embeddings(emb, cfg.seed);

  std::uint64_t pairs_per_epoch = 0;
  for (const auto& path : corpus.paths)
    pairs_per_epoch += window_pair_count(path.size(), cfg.window);
  const std::uint64_t total_pairs =
      std::max<std::uint64_t>(1, pairs_per_epoch * cfg.epochs);
  PairTrainer trainer{vocab, g, cfg, emb, total_pairs};

  std::uint64_t processed = 0;
  std::uint64_t sgd_calls = 0;

  if (cfg.deterministic || cfg.threads <= 1) {
    Rng rng(Rng::stream(cfg.seed, 0x9e9));
    std::vector<node_id> negatives;
    for (std::uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      for (const auto& path : corpus.paths) {
        for_each_window_pair(path, cfg.window, [&](node_id c, node_id x) {
          trainer.train_pair(c, x, processed, rng, negatives);
          ++processed;
          ++sgd_calls;
        });
      }
    }
  } else {
    // Asynchronous shared-memory updates; run-to-run nondeterministic.
    std::atomic<std::uint64_t> processed_atomic{0};
    std::atomic<std::uint64_t> sgd_atomic{0};
    std::atomic<std::size_t> next_path{0};
    auto worker = [&] {
      std::vector<node_id> negatives;
      for (;;) {
        const std::size_t idx = next_path.fetch_add(1);
        const std::size_t epoch = idx / corpus.paths.size();
        if (epoch >= cfg.epochs) return;
        const auto& path = corpus.paths[idx % corpus.paths.size()];
        Rng rng(Rng::stream(cfg.seed, 0x9e9 + idx));
        std::uint64_t local = 0;
        for_each_window_pair(path, cfg.window, [&](node_id c, node_id x) {
          trainer.train_pair(c, x, processed_atomic.load(std::memory_order_relaxed),
                             rng, negatives);
          ++local;
        });
        processed_atomic.fetch_add(local, std::memory_order_relaxed);
        sgd_atomic.fetch_add(local, std::memory_order_relaxed);
      }
    };
    std::vector<std::thread> pool;
    for (std::uint32_t i = 0; i < cfg.threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    processed = processed_atomic.load();
    sgd_calls = sgd_atomic.load();
  }

  if (stats) {
    stats->pairs = processed;
    stats->sgd_steps = sgd_calls;
  }
  if (!emb.all_finite())
    fail("training produced non-finite embedding values");
  return emb;
}

double softmax_prob(const EmbeddingMatrix& emb, node_id center, node_id context,
                    std::span<const node_id> candidates) {
  if (candidates.empty()) fail("softmax over an empty candidate set");
  const std::uint32_t d = emb.dim();
  auto v_cen = emb.center(center);
  auto dot_with = [&](node_id j) {
    auto u = emb.context(j);
    double dot = 0;
    for (std::uint32_t i = 0; i < d; ++i) dot += u[i] * v_cen[i];
    return dot;
  };
  double max_logit = dot_with(candidates[0]);
  for (node_id j : candidates) max_logit = std::max(max_logit, dot_with(j));
  double denom = 0;
  for (node_id j : candidates) denom += std::exp(dot_with(j) - max_logit);
  return std::exp(dot_with(context) - max_logit) / denom;
}

void write_embeddings_text(const EmbeddingMatrix& emb, const TypedGraph& g,
                           std::span<const node_id> nodes,
                           const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write embeddings file '", path, "'");
  out << nodes.size() << ' ' << emb.dim() << '\n';
  char buf[32];
  for (node_id v : nodes) {
    out << g.node_name(v);
    for (double x : emb.center(v)) {
      std::snprintf(buf, sizeof buf, " %.6f", x);
      out << buf;
    }
    out << '\n';
  }
}

void write_embeddings_binary(const EmbeddingMatrix& emb, const TypedGraph& g,
                             std::span<const node_id> nodes,
                             const std::string& bin_path,
                             const std::string& index_path) {
  std::ofstream bin(bin_path, std::ios::binary);
  if (!bin) fail("cannot write embeddings file '", bin_path, "'");
  static_assert(std::endian::native == std::endian::little,
                "binary embedding output assumes a little-endian host");
  std::vector<float> row(emb.dim());
  for (node_id v : nodes) {
    auto src = emb.center(v);
    for (std::uint32_t i = 0; i < emb.dim(); ++i)
      row[i] = static_cast<float>(src[i]);
    bin.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  std::ofstream index(index_path);
  if (!index) fail("cannot write index file '", index_path, "'");
  index << nodes.size() << ' ' << emb.dim() << '\n';
  for (node_id v : nodes) index << g.node_name(v) << '\n';
}

LoadedEmbeddings read_embeddings_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open embeddings file '", path, "'");
  LoadedEmbeddings out;
  std::size_t count = 0;
  if (!(in >> count >> out.dim)) fail(path, ": malformed embedding header");
  out.names.reserve(count);
  out.vectors.reserve(count);
  for (std::size_t r = 0; r < count; ++r) {
    std::string name;
    if (!(in >> name)) fail(path, ": truncated embedding file at row ", r);
    std::vector<double> vec(out.dim);
    for (std::uint32_t i = 0; i < out.dim; ++i)
      if (!(in >> vec[i])) fail(path, ": truncated embedding row for '", name, "'");
    out.names.push_back(std::move(name));
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

}  // namespace hinwalk
