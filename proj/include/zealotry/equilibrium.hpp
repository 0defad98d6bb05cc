#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "zealotry/errors.hpp"
#include "zealotry/network.hpp"

namespace zealotry {

struct SolverOptions {
  /// Residual tolerance for the iterative route; also the bound checked after a direct solve.
  double tolerance = 1e-10;
  /// Free-node count up to which systems are factorized directly.
  std::size_t direct_limit = 300;
  int max_iterations = 20000;
};

namespace detail {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;
using Triplet = Eigen::Triplet<double>;

/// Solves A x = b (or A^T x = b). Direct LU below the size limit, BiCGSTAB otherwise.
class LinearSolver {
 public:
  LinearSolver(SparseMatrix a, bool direct, const SolverOptions& opts)
      : a_(std::move(a)), direct_(direct), opts_(opts) {
    if (a_.rows() == 0) return;
    a_.makeCompressed();
    if (direct_) {
      lu_.analyzePattern(a_);
      lu_.factorize(a_);
      if (lu_.info() != Eigen::Success) throw NumericalError("sparse LU failed: " + lu_.lastErrorMessage());
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b, bool transposed = false) const {
    if (a_.rows() == 0) return Eigen::VectorXd();
    Eigen::VectorXd x;
    if (direct_) {
      x = transposed ? Eigen::VectorXd(lu_.transpose().solve(b)) : Eigen::VectorXd(lu_.solve(b));
    } else {
      const SparseMatrix at = transposed ? SparseMatrix(a_.transpose()) : a_;
      Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> it;
      it.setTolerance(opts_.tolerance);
      it.setMaxIterations(opts_.max_iterations);
      it.compute(at);
      x = it.solve(b);
      if (it.info() != Eigen::Success) {
        throw NumericalError("iterative solve did not converge (estimated error " +
                             std::to_string(it.error()) + ")");
      }
    }
    if (!x.allFinite()) throw NumericalError("linear solve produced non-finite values");
    return x;
  }

  const SparseMatrix& matrix() const noexcept { return a_; }

 private:
  SparseMatrix a_;
  bool direct_;
  SolverOptions opts_;
  // transpose() is non-const in Eigen.
  mutable Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu_;
};

/// Free nodes with no influence path from any zealot. The opinion system is
/// nonsingular exactly when this set is empty.
inline std::vector<NodeId> unanchored_free_nodes(const Network& net, std::span<const double> z0,
                                                 std::span<const double> z1) {
  const std::size_t f = net.free_count();
  std::vector<std::vector<std::size_t>> influences(f);  // k -> free nodes that k influences
  std::vector<char> anchored(f, 0);
  std::queue<std::size_t> frontier;
  for (std::size_t a = 0; a < f; ++a) {
    for (const InEdge& e : net.in_edges(net.free_nodes()[a])) {
      if (net.is_free(e.source)) influences[net.free_index(e.source)].push_back(a);
    }
    if (z0[a] + z1[a] > 0.0) {
      anchored[a] = 1;
      frontier.push(a);
    }
  }
  while (!frontier.empty()) {
    const std::size_t k = frontier.front();
    frontier.pop();
    for (std::size_t a : influences[k]) {
      if (!anchored[a]) {
        anchored[a] = 1;
        frontier.push(a);
      }
    }
  }
  std::vector<NodeId> out;
  for (std::size_t a = 0; a < f; ++a) {
    if (!anchored[a]) out.push_back(net.free_nodes()[a]);
  }
  return out;
}

}  // namespace detail

/// The opinion system [L + diag(z0 + z1)] x = z1 over free nodes, factorized once.
/// Its diagonal is d_i, off-diagonals -w_ik for free k.
class OpinionSystem {
 public:
  OpinionSystem(const Network& net, const SolverOptions& opts = {}) : opts_(opts) {
    require_valid(net);
    influence_ = zealot_influence(net);
    if (auto stray = detail::unanchored_free_nodes(net, influence_.z0, influence_.z1); !stray.empty()) {
      std::string list;
      for (std::size_t k = 0; k < stray.size() && k < 10; ++k) list += " " + std::to_string(stray[k]);
      if (stray.size() > 10) list += " ...";
      throw SingularSystem("free component with no zealot influence:" + list, std::move(stray));
    }
    const std::size_t f = net.free_count();
    std::vector<detail::Triplet> trip;
    for (std::size_t a = 0; a < f; ++a) {
      const NodeId i = net.free_nodes()[a];
      trip.emplace_back(a, a, net.in_degree(i));
      for (const InEdge& e : net.in_edges(i)) {
        if (net.is_free(e.source)) trip.emplace_back(a, net.free_index(e.source), -e.weight);
      }
    }
    detail::SparseMatrix m(static_cast<Eigen::Index>(f), static_cast<Eigen::Index>(f));
    m.setFromTriplets(trip.begin(), trip.end());
    solver_.emplace(std::move(m), f <= opts.direct_limit, opts);
  }

  const ZealotInfluence& influence() const noexcept { return influence_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const { return solver_->solve(rhs); }
  Eigen::VectorXd solve_transposed(const Eigen::VectorXd& rhs) const { return solver_->solve(rhs, true); }
  const detail::SparseMatrix& matrix() const { return solver_->matrix(); }

 private:
  SolverOptions opts_;
  ZealotInfluence influence_;
  std::optional<detail::LinearSolver> solver_;
};

struct OpinionEquilibrium {
  /// x*_k for every node: solved value for free nodes, 0 or 1 for zealots.
  std::vector<double> x;
  /// x*_f in free-index order.
  std::vector<double> x_free;
  double x_bar_free = 0.0;
  double x_bar = 0.0;
  double sigma = 0.0;
  /// max_i |d_i x_i - sum_{j in F} w_ij x_j - z1_i| over free i.
  double residual = 0.0;
};

inline double opinion_residual(const Network& net, std::span<const double> x) {
  double worst = 0.0;
  for (NodeId i : net.free_nodes()) {
    double r = net.in_degree(i) * x[i];
    for (const InEdge& e : net.in_edges(i)) r -= e.weight * x[e.source];
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

/// Equilibrium mean opinions: x*_f = [L + diag(z0 + z1)]^{-1} z1.
///
/// Throws SingularSystem when some free component has no zealot influence.
inline OpinionEquilibrium solve_opinions(const Network& net, const SolverOptions& opts = {}) {
  const OpinionSystem system(net, opts);
  const auto& z1 = system.influence().z1;
  const std::size_t f = net.free_count();
  const Eigen::VectorXd x = system.solve(Eigen::Map<const Eigen::VectorXd>(z1.data(), f));

  OpinionEquilibrium eq;
  eq.x.assign(net.size(), 0.0);
  for (NodeId i = 0; i < net.size(); ++i) {
    if (net.role(i) == NodeRole::zealot1) eq.x[i] = 1.0;
  }
  eq.x_free.resize(f);
  double sum = 0.0;
  for (std::size_t a = 0; a < f; ++a) {
    // Rounding can push a probability a few ulps outside [0, 1].
    eq.x_free[a] = std::clamp(x[static_cast<Eigen::Index>(a)], 0.0, 1.0);
    eq.x[net.free_nodes()[a]] = eq.x_free[a];
    sum += eq.x_free[a];
  }
  eq.x_bar_free = f > 0 ? sum / static_cast<double>(f) : 0.0;
  const double n = static_cast<double>(net.size());
  eq.x_bar = (static_cast<double>(f) * eq.x_bar_free + static_cast<double>(net.count(NodeRole::zealot1))) / n;
  eq.sigma = 4.0 * eq.x_bar * (1.0 - eq.x_bar);
  eq.residual = opinion_residual(net, eq.x);
  return eq;
}

// ---------------------------------------------------------------------------
// Pairwise disagreement

/// Clock driving the pair equations.
///
/// per_edge: node i updates at rate d_i (every edge j -> i fires at rate w_ij).
///   This yields the published linear system
///   q_ij (d_i + d_j) - sum_k (w_ik q_jk + w_jk q_ik) = zt_j x_i + zt_i x_j + z1_i + z1_j.
/// per_node: every free node updates at rate 1, as in the simulated dynamics.
///   Each side of the system is then divided by its in-degree.
///
/// Both coincide when d_i = d_j for all free pairs (e.g. complete unweighted graphs),
/// and both leave x* unchanged.
enum class UpdateClock { per_edge, per_node };

struct ActivationOptions {
  SolverOptions solver;
  UpdateClock clock = UpdateClock::per_edge;
};

class ActivationEquilibrium {
 public:
  ActivationEquilibrium() = default;

  /// q_ij for any pair with at least one free node. Zealot-zealot pairs are
  /// deterministic: 0 when they agree, 1 otherwise.
  double q(NodeId i, NodeId j) const {
    if (i == j) return 0.0;
    const bool fi = roles_.at(i) == NodeRole::free;
    const bool fj = roles_.at(j) == NodeRole::free;
    if (fi && fj) return q_free_[pair_index(free_index_[i], free_index_[j])];
    if (fi) return roles_[j] == NodeRole::zealot0 ? x_[i] : 1.0 - x_[i];
    if (fj) return roles_[i] == NodeRole::zealot0 ? x_[j] : 1.0 - x_[j];
    return roles_[i] == roles_[j] ? 0.0 : 1.0;
  }

  /// Free-free unknowns, packed upper triangle in free-index order.
  std::span<const double> free_pairs() const noexcept { return q_free_; }

  /// Mean of q over the counted edges E' (every positive-weight edge).
  double rho = 0.0;
  /// Weight-averaged q over E'.
  double rho_w = 0.0;
  /// Sum of q over E' divided by N(N-1), the normalization used by the closed form.
  double rho_ordered_pairs = 0.0;
  std::size_t counted_edges = 0;
  /// Max absolute residual of the pair system at the returned q.
  double residual = 0.0;
  UpdateClock clock = UpdateClock::per_edge;

  static std::size_t pair_index(std::size_t a, std::size_t b, std::size_t f) {
    if (a > b) std::swap(a, b);
    return a * (2 * f - a - 1) / 2 + (b - a - 1);
  }

 private:
  friend ActivationEquilibrium solve_activation(const Network&, const OpinionEquilibrium&,
                                                const ActivationOptions&);

  std::size_t pair_index(std::size_t a, std::size_t b) const { return pair_index(a, b, f_); }

  std::size_t f_ = 0;
  std::vector<double> q_free_;
  std::vector<double> x_;
  std::vector<NodeRole> roles_;
  std::vector<std::size_t> free_index_;
};

namespace detail {

inline double clock_rate(UpdateClock clock, double in_degree) {
  return clock == UpdateClock::per_edge ? in_degree : 1.0;
}

}  // namespace detail

/// Pair disagreement probabilities and active-link densities at equilibrium.
///
/// Unknowns are all F(F-1)/2 unordered free pairs, adjacent or not; free-zealot
/// pairs follow in closed form (q = x_i against a 0-zealot, 1 - x_i against a
/// 1-zealot). Densities count each positive-weight edge once.
inline ActivationEquilibrium solve_activation(const Network& net, const OpinionEquilibrium& eq,
                                              const ActivationOptions& opts = {}) {
  require_valid(net);
  if (eq.x.size() != net.size() || eq.x_free.size() != net.free_count()) {
    throw std::invalid_argument("opinion equilibrium does not match the network");
  }
  const ZealotInfluence zi = zealot_influence(net);
  const std::size_t f = net.free_count();
  const auto free = net.free_nodes();
  const std::size_t unknowns = f * (f > 0 ? f - 1 : 0) / 2;

  std::vector<double> degree(f), scale(f), rate(f);
  for (std::size_t a = 0; a < f; ++a) {
    degree[a] = net.in_degree(free[a]);
    rate[a] = detail::clock_rate(opts.clock, degree[a]);
    scale[a] = rate[a] / degree[a];
  }

  // Row (a, b): (c_a + c_b) q_ab - sum_k s_a w_ak q_bk - sum_k s_b w_bk q_ak
  //           = s_a (z1_a (1 - x_b) + z0_a x_b) + s_b (z1_b (1 - x_a) + z0_b x_a).
  std::vector<detail::Triplet> trip;
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(unknowns));
  auto side = [&](std::size_t a, std::size_t b, Eigen::Index row) {
    for (const InEdge& e : net.in_edges(free[a])) {
      if (!net.is_free(e.source)) continue;
      const std::size_t k = net.free_index(e.source);
      if (k == b) continue;
      trip.emplace_back(row, ActivationEquilibrium::pair_index(b, k, f), -scale[a] * e.weight);
    }
    const double xb = eq.x_free[b];
    return scale[a] * (zi.z1[a] * (1.0 - xb) + zi.z0[a] * xb);
  };
  for (std::size_t a = 0; a < f; ++a) {
    for (std::size_t b = a + 1; b < f; ++b) {
      const auto row = static_cast<Eigen::Index>(ActivationEquilibrium::pair_index(a, b, f));
      trip.emplace_back(row, row, rate[a] + rate[b]);
      rhs[row] = side(a, b, row) + side(b, a, row);
    }
  }

  ActivationEquilibrium act;
  act.clock = opts.clock;
  act.f_ = f;
  act.x_ = eq.x;
  act.roles_.assign(net.roles().begin(), net.roles().end());
  act.free_index_.resize(net.size());
  for (NodeId i = 0; i < net.size(); ++i) act.free_index_[i] = net.free_index(i);

  if (unknowns > 0) {
    detail::SparseMatrix a(static_cast<Eigen::Index>(unknowns), static_cast<Eigen::Index>(unknowns));
    a.setFromTriplets(trip.begin(), trip.end());
    trip.clear();
    trip.shrink_to_fit();
    const detail::LinearSolver solver(a, f <= opts.solver.direct_limit, opts.solver);
    const Eigen::VectorXd q = solver.solve(rhs);
    act.residual = (solver.matrix() * q - rhs).cwiseAbs().maxCoeff();
    act.q_free_.resize(unknowns);
    for (std::size_t k = 0; k < unknowns; ++k) {
      act.q_free_[k] = std::clamp(q[static_cast<Eigen::Index>(k)], 0.0, 1.0);
    }
  }

  double sum = 0.0, wsum = 0.0, wtotal = 0.0;
  std::size_t count = 0;
  for (NodeId i : free) {
    for (const InEdge& e : net.in_edges(i)) {
      const double q = act.q(i, e.source);
      sum += q;
      wsum += e.weight * q;
      wtotal += e.weight;
      ++count;
    }
  }
  act.counted_edges = count;
  act.rho = count > 0 ? sum / static_cast<double>(count) : 0.0;
  act.rho_w = wtotal > 0 ? wsum / wtotal : 0.0;
  const double n = static_cast<double>(net.size());
  act.rho_ordered_pairs = net.size() > 1 ? sum / (n * (n - 1.0)) : 0.0;
  return act;
}

/// Residual of the pair system at (i, j) for the given clock, evaluated from
/// the stored q values.
inline double activation_residual(const Network& net, const OpinionEquilibrium& eq,
                                  const ActivationEquilibrium& act, NodeId i, NodeId j) {
  const double di = net.in_degree(i), dj = net.in_degree(j);
  const double ci = detail::clock_rate(act.clock, di), cj = detail::clock_rate(act.clock, dj);
  auto side = [&](NodeId u, NodeId v, double du, double cu) {
    double z0 = 0.0, z1 = 0.0, coupled = 0.0;
    for (const InEdge& e : net.in_edges(u)) {
      switch (net.role(e.source)) {
        case NodeRole::zealot0: z0 += e.weight; break;
        case NodeRole::zealot1: z1 += e.weight; break;
        case NodeRole::free:
          if (e.source != v) coupled += e.weight * act.q(v, e.source);
          break;
      }
    }
    return (cu / du) * (coupled + z1 * (1.0 - eq.x[v]) + z0 * eq.x[v]);
  };
  return (ci + cj) * act.q(i, j) - side(i, j, di, ci) - side(j, i, dj, cj);
}

// ---------------------------------------------------------------------------
// Transition rates

/// Rates at which free node i aligns with (lambda) or moves away from (mu)
/// node j's opinion, per unit of i's own clock: lambda + mu = 1.
struct TransitionRates {
  double lambda = 0.0;
  double mu = 0.0;
};

inline TransitionRates transition_rates(const Network& net, const OpinionEquilibrium& eq,
                                        const ActivationEquilibrium& act, NodeId i, NodeId j) {
  if (!net.is_free(i)) throw std::invalid_argument("node " + std::to_string(i) + " is not free");
  if (i == j) throw std::invalid_argument("rates need two distinct nodes");
  const double xj = eq.x.at(j);
  double direct = 0.0, aligned = 0.0, opposed = 0.0, z0 = 0.0, z1 = 0.0;
  for (const InEdge& e : net.in_edges(i)) {
    const NodeRole r = net.role(e.source);
    if (r == NodeRole::zealot0) z0 += e.weight;
    if (r == NodeRole::zealot1) z1 += e.weight;
    if (r != NodeRole::free) continue;
    if (e.source == j) {
      direct += e.weight;
    } else {
      const double q = act.q(j, e.source);
      aligned += e.weight * (1.0 - q);
      opposed += e.weight * q;
    }
  }
  // A zealot j is already part of z0/z1, so copying it directly is counted there.
  const double d = net.in_degree(i);
  return {(direct + aligned + z1 * xj + z0 * (1.0 - xj)) / d, (opposed + z1 * (1.0 - xj) + z0 * xj) / d};
}

/// Stationary probability of {x_i != x_j} for the two-state chain driven by the
/// transition rates, each node's rates scaled by its clock (zealots have none).
inline double two_state_disagreement(const Network& net, const OpinionEquilibrium& eq,
                                     const ActivationEquilibrium& act, NodeId i, NodeId j) {
  double up = 0.0, total = 0.0;
  for (auto [u, v] : {std::pair{i, j}, std::pair{j, i}}) {
    if (!net.is_free(u)) continue;
    const double c = detail::clock_rate(act.clock, net.in_degree(u));
    const TransitionRates r = transition_rates(net, eq, act, u, v);
    up += c * r.mu;
    total += c * (r.lambda + r.mu);
  }
  if (total == 0.0) throw std::invalid_argument("pair has no free node");
  return up / total;
}

// ---------------------------------------------------------------------------
// Export

inline void write_opinion_table(std::ostream& os, const Network& net, const OpinionEquilibrium& eq) {
  os << "node,x\n";
  os.precision(17);
  for (NodeId i : net.free_nodes()) os << i << ',' << eq.x[i] << '\n';
}

/// One row per counted pair: every unordered pair joined by at least one edge.
inline void write_pair_table(std::ostream& os, const Network& net, const ActivationEquilibrium& act) {
  os << "i,j,q\n";
  os.precision(17);
  for (NodeId i = 0; i < net.size(); ++i) {
    for (const InEdge& e : net.in_edges(i)) {
      const NodeId j = e.source;
      // Report a pair once: from its lower endpoint unless only the reverse edge exists.
      if (j < i && net.weight(j, i) > 0.0) continue;
      os << std::min(i, j) << ',' << std::max(i, j) << ',' << act.q(i, j) << '\n';
    }
  }
}

}  // namespace zealotry
