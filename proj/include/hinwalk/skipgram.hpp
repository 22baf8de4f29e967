#pragma once

#include <span>
#include <string>
#include <vector>

#include "hinwalk/graph.hpp"
#include "hinwalk/walker.hpp"

namespace hinwalk {

// Corpus vocabulary with per-type unigram^0.75 negative-sampling tables.
class Vocabulary {
 public:
  Vocabulary(const Corpus& corpus, const TypedGraph& g);

  std::uint64_t count(node_id v) const { return counts_[v]; }
  bool contains(node_id v) const { return counts_[v] > 0; }
  std::uint64_t total_tokens() const { return total_; }
  const std::vector<node_id>& type_nodes(type_id t) const {
    return type_nodes_[t];
  }
  // Nodes present in the corpus, ascending.
  const std::vector<node_id>& nodes() const { return present_; }

  // Draws from the type-restricted (or global) unigram^0.75 table.
  node_id sample_negative(type_id t, Rng& rng) const;
  node_id sample_negative_global(Rng& rng) const;

 private:
  std::vector<std::uint64_t> counts_;
  std::vector<node_id> present_;
  std::vector<std::vector<node_id>> type_nodes_;
  std::vector<std::vector<double>> type_cdf_;
  std::vector<double> global_cdf_;
  std::uint64_t total_ = 0;
};

class EmbeddingMatrix {
 public:
  EmbeddingMatrix(std::size_t rows, std::uint32_t dim)
      : dim_(dim), center_(rows * dim, 0.0), context_(rows * dim, 0.0) {}

  std::uint32_t dim() const { return dim_; }
  std::size_t rows() const { return center_.size() / dim_; }
  std::span<double> center(node_id v) { return {&center_[std::size_t(v) * dim_], dim_}; }
  std::span<const double> center(node_id v) const {
    return {&center_[std::size_t(v) * dim_], dim_};
  }
  std::span<double> context(node_id v) { return {&context_[std::size_t(v) * dim_], dim_}; }
  std::span<const double> context(node_id v) const {
    return {&context_[std::size_t(v) * dim_], dim_};
  }
  const std::vector<double>& center_data() const { return center_; }
  bool all_finite() const;

 private:
  std::uint32_t dim_;
  std::vector<double> center_, context_;
};

struct TrainConfig {
  std::uint32_t dim = 128;
  std::uint32_t window = 10;  // per-side radius
  std::uint32_t negatives = 5;
  double lr0 = 0.025;
  std::uint32_t epochs = 1;
  std::uint64_t seed = 1;
  bool deterministic = true;  // single-threaded, bit-reproducible
  std::uint32_t threads = 1;  // used only when deterministic = false
  bool per_type_negatives = true;
};

struct TrainStats {
  std::uint64_t pairs = 0;
  std::uint64_t sgd_steps = 0;
};

// Emits (seq[p], seq[q]) for all q != p with |p - q| <= window.
void for_each_window_pair(
    std::span<const node_id> path, std::uint32_t window,
    const std::function<void(node_id center, node_id context)>& fn);
std::uint64_t window_pair_count(std::size_t path_len, std::uint32_t window);

// One negative-sampling ascent step on the pair objective
//   log s(u_ctx . v_cen) + sum_neg log s(-u_neg . v_cen).
void sgd_step(EmbeddingMatrix& emb, node_id center, node_id context,
              std::span<const node_id> negatives, double lr);

// The pair objective value, for gradient and monotonicity tests.
double pair_objective(const EmbeddingMatrix& emb, node_id center,
                      node_id context, std::span<const node_id> negatives);

double logistic(double x);

EmbeddingMatrix train(const Corpus& corpus, const TypedGraph& g,
                      const TrainConfig& cfg, TrainStats* stats = nullptr);

// Full softmax over a candidate set; diagnostics only.
double softmax_prob(const EmbeddingMatrix& emb, node_id center, node_id context,
                    std::span<const node_id> candidates);

// Text format: `<count> <dim>` header then `<id> <d floats>` rows, vocab
// nodes only. Binary: raw little-endian f32 rows plus a text index sidecar.
void write_embeddings_text(const EmbeddingMatrix& emb, const TypedGraph& g,
                           std::span<const node_id> nodes,
                           const std::string& path);
void write_embeddings_binary(const EmbeddingMatrix& emb, const TypedGraph& g,
                             std::span<const node_id> nodes,
                             const std::string& bin_path,
                             const std::string& index_path);
struct LoadedEmbeddings {
  std::uint32_t dim = 0;
  std::vector<std::string> names;
  std::vector<std::vector<double>> vectors;
};
LoadedEmbeddings read_embeddings_text(const std::string& path);

}  // namespace hinwalk
