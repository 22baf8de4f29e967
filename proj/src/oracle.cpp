#include "hinwalk/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>

namespace hinwalk {

double Hypermatrix::slice_sum(std::size_t i, std::size_t j) const {
  double sum = 0;
  for (std::size_t k = 0; k < n; ++k) sum += at(i, j, k);
  return sum;
}

Hypermatrix build_hypermatrix(const TypedGraph& g, const MetaPath& mp) {
  if (mp.order > 2) fail("hypermatrix is defined for orders 1 and 2");
  if (g.node_count() > Hypermatrix::max_nodes)
    fail("graph too large for dense hypermatrix (", g.node_count(), " > ",
         Hypermatrix::max_nodes, " nodes)");
  const SpaceyGraph sg(mp);
  const std::size_t n = g.node_count();
  Hypermatrix h(n);
  for (node_id i = 0; i < n; ++i) {
    for (node_id j = 0; j < n; ++j) {
      auto next_type = sg.successor(g.node_type(i), g.node_type(j));
      if (!next_type) continue;
      auto nbrs = g.neighbors(j, *next_type);
      if (nbrs.empty()) continue;
      const double p = 1.0 / static_cast<double>(nbrs.size());
      for (node_id k : nbrs) h.at(i, j, k) = p;
    }
  }
  return h;
}

Hypermatrix integrate_hypermatrices(std::span<const Hypermatrix> members) {
  if (members.empty()) fail("cannot integrate an empty hypermatrix list");
  const std::size_t n = members.front().n;
  for (const auto& m : members)
    if (m.n != n) fail("hypermatrix sizes differ");
  Hypermatrix out(n);
  for (std::size_t idx = 0; idx < out.entries.size(); ++idx) {
    double sum = 0;
    unsigned nonzero = 0;
    for (const auto& m : members) {
      const double v = m.entries[idx];
      if (v > 0) {
        sum += v;
        ++nonzero;
      }
    }
    if (nonzero > 0) out.entries[idx] = sum / nonzero;
  }
  return out;
}

namespace {

// y_k = sum_{i,j} H[i][j][k] x_j x_i, the tensor apply of the fixed-point map.
std::vector<double> tensor_apply(const Hypermatrix& h,
                                 std::span<const double> x) {
  const std::size_t n = h.n;
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const double xij = x[i] * x[j];
      if (xij == 0) continue;
      const double* row = &h.entries[(i * n + j) * n];
      for (std::size_t k = 0; k < n; ++k) y[k] += row[k] * xij;
    }
  }
  return y;
}

}  // namespace

double fixed_point_residual(const Hypermatrix& h, std::span<const double> pi) {
  const std::size_t n = h.n;
  std::vector<double> y(n, 0.0);
  double mass = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        const double v = h.at(i, j, k) * pi[j] * pi[i];
        y[k] += v;
        mass += v;
      }
  if (mass <= 0) return std::numeric_limits<double>::infinity();
  double res = 0;
  for (std::size_t k = 0; k < n; ++k)
    res = std::max(res, std::abs(pi[k] - y[k] / mass));
  return res;
}

FixedPointResult fixed_point_stationary(const Hypermatrix& h, double tol,
                                        unsigned max_iter, double damping) {
  if (tol <= 0) fail("tolerance must be positive");
  const std::size_t n = h.n;
  std::vector<double> x(n, 1.0 / static_cast<double>(n));
  double residual = std::numeric_limits<double>::infinity();
  for (unsigned it = 1; it <= max_iter; ++it) {
    std::vector<double> y = tensor_apply(h, x);
    const double mass = std::accumulate(y.begin(), y.end(), 0.0);
    if (mass <= 0)
      throw NonConvergence("fixed-point map lost all mass", x, residual);
    residual = 0;
    for (std::size_t k = 0; k < n; ++k) {
      y[k] /= mass;
      residual = std::max(residual, std::abs(y[k] - x[k]));
    }
    // Return the pre-update iterate: it is the point the residual certifies.
    if (residual <= tol) return {std::move(x), residual, it};
    for (std::size_t k = 0; k < n; ++k)
      x[k] = (1.0 - damping) * y[k] + damping * x[k];
  }
  throw NonConvergence(
      cat("fixed point not reached after ", max_iter,
          " iterations (residual ", residual, " > tol ", tol, ")"),
      x, residual);
}

std::vector<double> spacey_transition_matrix(const Hypermatrix& h,
                                             std::span<const double> x,
                                             std::span<const double> w,
                                             double alpha) {
  const std::size_t n = h.n;
  if (x.size() != n || w.size() != n) fail("distribution sizes disagree");
  std::vector<double> r(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double mix = (1.0 - alpha) * x[i] + alpha * w[i];
    if (mix == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      const double* row = &h.entries[(i * n + j) * n];
      for (std::size_t k = 0; k < n; ++k) r[j * n + k] += row[k] * mix;
    }
  }
  return r;
}

std::vector<double> renormalize_rows(std::vector<double> matrix, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0;
    for (std::size_t k = 0; k < n; ++k) sum += matrix[j * n + k];
    if (sum > 0)
      for (std::size_t k = 0; k < n; ++k) matrix[j * n + k] /= sum;
  }
  return matrix;
}

PairChainResult pair_chain_stationary(const Hypermatrix& h) {
  const std::size_t n = h.n;
  PairChainResult out;
  // Walkable contexts both leave (nonzero slice) and arrive (some H entry
  // transitions into them, which requires the (i, j) edge to exist).
  std::vector<char> enterable(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (h.at(i, j, k) > 0) enterable[j * n + k] = 1;
  std::map<std::pair<node_id, node_id>, std::size_t> index;
  for (node_id i = 0; i < n; ++i)
    for (node_id j = 0; j < n; ++j)
      if (enterable[i * n + j] && h.slice_sum(i, j) > 0) {
        index.emplace(std::make_pair(i, j), out.valid_pairs.size());
        out.valid_pairs.emplace_back(i, j);
      }
  const std::size_t m = out.valid_pairs.size();
  if (m == 0) fail("hypermatrix has no walkable contexts");

  // Transition (i,j) -> (j,k) with probability H[i][j][k].
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(m);
  std::vector<std::vector<std::size_t>> radj(m);
  for (std::size_t p = 0; p < m; ++p) {
    auto [i, j] = out.valid_pairs[p];
    for (node_id k = 0; k < n; ++k) {
      const double v = h.at(i, j, k);
      if (v <= 0) continue;
      auto it = index.find({j, k});
      if (it == index.end())
        fail("pair chain hits the dead-end context (", j, ",", k, ")");
      adj[p].emplace_back(it->second, v);
      radj[it->second].push_back(p);
    }
  }

  // Irreducibility: every valid context reachable from context 0 and back.
  auto bfs = [m](const auto& neighbors_of, std::size_t src) {
    std::vector<char> seen(m, 0);
    std::deque<std::size_t> queue{src};
    seen[src] = 1;
    while (!queue.empty()) {
      const std::size_t p = queue.front();
      queue.pop_front();
      for (const auto& q : neighbors_of(p))
        if (!seen[q]) {
          seen[q] = 1;
          queue.push_back(q);
        }
    }
    return seen;
  };
  auto fwd = bfs(
      [&](std::size_t p) {
        std::vector<std::size_t> qs;
        for (auto [q, v] : adj[p]) qs.push_back(q);
        return qs;
      },
      0);
  auto bwd = bfs([&](std::size_t p) { return radj[p]; }, 0);
  for (std::size_t p = 0; p < m; ++p) {
    if (!fwd[p] || !bwd[p]) {
      auto [i, j] = out.valid_pairs[p];
      fail("pair chain is reducible: context (", i, ",", j,
           ") is not strongly connected to context (",
           out.valid_pairs[0].first, ",", out.valid_pairs[0].second, ")");
    }
  }

  // Power iteration on the lazy chain (I + P)/2; same stationary vector,
  // immune to the periodicity of meta-path cycles.
  std::vector<double> mu(m, 1.0 / static_cast<double>(m));
  std::vector<double> next(m, 0.0);
  for (unsigned it = 0; it < 1000000; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t p = 0; p < m; ++p) {
      next[p] += 0.5 * mu[p];
      for (auto [q, v] : adj[p]) next[q] += 0.5 * mu[p] * v;
    }
    double diff = 0;
    for (std::size_t p = 0; p < m; ++p) diff = std::max(diff, std::abs(next[p] - mu[p]));
    mu.swap(next);
    if (diff <= 1e-14) break;
  }

  out.pair_stationary = mu;
  out.node_marginal.assign(n, 0.0);
  for (std::size_t p = 0; p < m; ++p)
    out.node_marginal[out.valid_pairs[p].second] += mu[p];
  return out;
}

std::vector<double> empirical_distribution(
    std::span<const std::vector<node_id>> paths, std::size_t n_nodes) {
  std::vector<double> hist(n_nodes, 0.0);
  std::uint64_t total = 0;
  for (const auto& path : paths)
    for (node_id v : path) {
      hist[v] += 1.0;
      ++total;
    }
  if (total == 0) fail("empirical distribution of an empty corpus");
  for (auto& v : hist) v /= static_cast<double>(total);
  return hist;
}

std::vector<double> empirical_distribution(std::span<const node_id> trajectory,
                                           std::size_t n_nodes) {
  std::vector<double> hist(n_nodes, 0.0);
  if (trajectory.empty()) fail("empirical distribution of an empty trajectory");
  for (node_id v : trajectory) hist[v] += 1.0;
  for (auto& v : hist) v /= static_cast<double>(trajectory.size());
  return hist;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail("distribution sizes disagree");
  double sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum;
}

std::vector<double> integrated_step_distribution(const Hypermatrix& integrated,
                                                 const TypedGraph& g,
                                                 const OccupationVector& occ,
                                                 node_id y, node_id cur,
                                                 double alpha) {
  const std::size_t n = integrated.n;
  std::vector<double> dist(n, 0.0);
  // Candidate types are read off the tensor itself: types with any nonzero
  // entry in the (y, cur) slice.
  std::vector<type_id> cands;
  for (node_id k = 0; k < n; ++k) {
    if (integrated.at(y, cur, k) <= 0) continue;
    const type_id t = g.node_type(k);
    if (std::find(cands.begin(), cands.end(), t) == cands.end())
      cands.push_back(t);
  }
  if (cands.empty()) return dist;
  std::sort(cands.begin(), cands.end());

  std::uint64_t total = 0;
  for (type_id t : cands) total += occ.restricted_mass({&t, 1});
  for (type_id t : cands) {
    const double z =
        static_cast<double>(occ.restricted_mass({&t, 1})) / static_cast<double>(total);
    const double type_prob =
        (1.0 - alpha) / static_cast<double>(cands.size()) + alpha * z;
    // Slice restricted to type t is a normalized row (Eq. (11) averages
    // identical member probabilities), so scale it by the type probability.
    double slice_mass = 0;
    for (node_id k = 0; k < n; ++k)
      if (g.node_type(k) == t) slice_mass += integrated.at(y, cur, k);
    for (node_id k = 0; k < n; ++k)
      if (g.node_type(k) == t)
        dist[k] += type_prob * integrated.at(y, cur, k) / slice_mass;
  }
  return dist;
}

}  // namespace hinwalk
