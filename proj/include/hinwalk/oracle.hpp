#pragma once

#include <vector>

#include "hinwalk/meta.hpp"
#include "hinwalk/walker.hpp"

namespace hinwalk {

// Dense third-order transition tensor. Reference computations only; hard
// size cap keeps it off any production path.
struct Hypermatrix {
  static constexpr std::size_t max_nodes = 200;

  std::size_t n = 0;
  std::vector<double> entries;  // n^3, row-major (i, j, k)

  explicit Hypermatrix(std::size_t n_nodes)
      : n(n_nodes), entries(n_nodes * n_nodes * n_nodes, 0.0) {}

  double& at(std::size_t i, std::size_t j, std::size_t k) {
    return entries[(i * n + j) * n + k];
  }
  double at(std::size_t i, std::size_t j, std::size_t k) const {
    return entries[(i * n + j) * n + k];
  }
  // Sum over k; 1 for valid (i, j) contexts, 0 for type-mismatched ones.
  double slice_sum(std::size_t i, std::size_t j) const;
};

// H[i][j][k] = P(next = k | last = j, second-last = i) under the meta-path's
// factorized windows; zero on invalid contexts.
Hypermatrix build_hypermatrix(const TypedGraph& g, const MetaPath& mp);

// Entry-wise average over the members that are nonzero at each cell.
Hypermatrix integrate_hypermatrices(std::span<const Hypermatrix> members);

struct FixedPointResult {
  std::vector<double> pi;
  double residual = 0.0;
  unsigned iterations = 0;
};

// Thrown when the damped iteration fails to reach tol; carries the last
// iterate so callers can inspect it.
class NonConvergence : public Error {
 public:
  NonConvergence(std::string what, std::vector<double> last, double residual)
      : Error(std::move(what)), last_iterate(std::move(last)), residual(residual) {}
  std::vector<double> last_iterate;
  double residual;
};

// Solves pi = normalize(H (pi ⊗ pi)) by damped self-map iteration from the
// uniform start. The normalization divides by the mass H places on valid
// contexts, which is below 1 whenever pi spreads over type-mismatched pairs.
FixedPointResult fixed_point_stationary(const Hypermatrix& h, double tol = 1e-10,
                                        unsigned max_iter = 100000,
                                        double damping = 0.5);

// Residual of the normalized fixed-point map, recomputed by a plain triple
// loop independent of the solver.
double fixed_point_residual(const Hypermatrix& h, std::span<const double> pi);

// R[j][k] = sum_i H[i][j][k] ((1-alpha) x_i + alpha w_i), literal values.
// Rows can sum below 1 when mass sits on invalid predecessors.
std::vector<double> spacey_transition_matrix(const Hypermatrix& h,
                                             std::span<const double> x,
                                             std::span<const double> w,
                                             double alpha);
// Row-normalized view of a row-major square matrix; zero rows stay zero.
std::vector<double> renormalize_rows(std::vector<double> matrix, std::size_t n);

// Stationary distribution of the second-order chain lifted to ordered pairs,
// marginalized to nodes. Throws (naming a context) if the valid-pair chain
// restricted to the contexts reachable from start states is reducible.
struct PairChainResult {
  std::vector<double> node_marginal;
  std::vector<double> pair_stationary;  // indexed by valid-pair order
  std::vector<std::pair<node_id, node_id>> valid_pairs;
};
PairChainResult pair_chain_stationary(const Hypermatrix& h);

// Normalized visit-frequency histogram.
std::vector<double> empirical_distribution(
    std::span<const std::vector<node_id>> paths, std::size_t n_nodes);
std::vector<double> empirical_distribution(std::span<const node_id> trajectory,
                                           std::size_t n_nodes);

double l1_distance(std::span<const double> a, std::span<const double> b);

// Next-node distribution read directly off the integrated hypermatrix with
// the branch-type law applied literally; the counterpart of the walker's
// two-stage sampling.
std::vector<double> integrated_step_distribution(const Hypermatrix& integrated,
                                                 const TypedGraph& g,
                                                 const OccupationVector& occ,
                                                 node_id y, node_id cur,
                                                 double alpha);

}  // namespace hinwalk
