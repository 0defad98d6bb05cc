#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "zealotry/equilibrium.hpp"
#include "zealotry/network.hpp"
#include "zealotry/polynomial.hpp"

namespace zealotry {

// ---------------------------------------------------------------------------
// Complete-network problems with a backfire effect.
//
// Turning z1 free users into opinion-1 zealots radicalises alpha * z1 free users
// into opinion-0 zealots, so the post-intervention counts are (z0 + alpha z1, z1)
// and z0 + (1 + alpha) z1 <= N.

struct BackfireSpec {
  double z0 = 0.0;
  double alpha = 0.0;
  double n = 0.0;

  void check() const {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw std::invalid_argument("backfire intensity alpha must lie in [0, 1)");
    if (!(n > 0.0)) throw std::invalid_argument("population n must be positive");
    if (!(z0 >= 0.0 && z0 <= n)) throw std::invalid_argument("need 0 <= z0 <= n");
  }

  double z1_max() const { return (n - z0) / (1.0 + alpha); }
};

/// x-bar* after the intervention: z1 / (z0 + (1 + alpha) z1), taken as 0 when no zealots exist.
inline double backfire_mean_opinion(double z0, double alpha, double z1) {
  const double s = z0 + (1.0 + alpha) * z1;
  return s > 0.0 ? z1 / s : 0.0;
}

/// sigma_{z0,alpha}(z1) = 4 (z0 + alpha z1) z1 / (z0 + (1 + alpha) z1)^2.
inline double backfire_sigma(double z0, double alpha, double z1) {
  const double s = z0 + (1.0 + alpha) * z1;
  return s > 0.0 ? 4.0 * (z0 + alpha * z1) * z1 / (s * s) : 0.0;
}

/// rho_{z0,alpha}(z1) = 2 (z0 + alpha z1) z1 / ((z0 + (1 + alpha) z1)(z0 + (1 + alpha) z1 + 1)).
/// This is the free-free disagreement probability at the post-intervention counts.
inline double backfire_active(double z0, double alpha, double z1) {
  const double s = z0 + (1.0 + alpha) * z1;
  return s > 0.0 ? 2.0 * (z0 + alpha * z1) * z1 / (s * (s + 1.0)) : 0.0;
}

struct OptimizationResult {
  double z1_star = 0.0;
  /// Best of floor/ceil of z1_star within [0, z1_max], by objective.
  long long z1_star_rounded = 0;
  double objective_at_star = 0.0;
  double objective_at_rounded = 0.0;
  double z1_max = 0.0;
  /// Zealot counts after the intervention: (z0 + alpha z1_star, z1_star).
  double post_z0 = 0.0;
  double post_z1 = 0.0;
};

namespace detail {

template <class Objective>
OptimizationResult finish(const BackfireSpec& spec, double z1_star, Objective objective, bool maximize) {
  OptimizationResult r;
  r.z1_max = spec.z1_max();
  r.z1_star = std::clamp(z1_star, 0.0, r.z1_max);
  r.objective_at_star = objective(r.z1_star);
  r.post_z0 = spec.z0 + spec.alpha * r.z1_star;
  r.post_z1 = r.z1_star;

  const double lo = std::floor(r.z1_star);
  const double hi = std::ceil(r.z1_star);
  r.z1_star_rounded = static_cast<long long>(lo);
  r.objective_at_rounded = objective(lo);
  if (hi != lo && hi <= r.z1_max) {
    const double v = objective(hi);
    if (maximize ? v > r.objective_at_rounded : v < r.objective_at_rounded) {
      r.z1_star_rounded = static_cast<long long>(hi);
      r.objective_at_rounded = v;
    }
  }
  return r;
}

}  // namespace detail

/// (P1): z1 minimizing (x-bar* - lambda)^2 over [0, z1_max]. With d = 1 - lambda - alpha lambda,
/// z1* = min(z1_max, lambda z0 / d) when d > 0 and z1_max otherwise.
inline OptimizationResult solve_p1_target(const BackfireSpec& spec, double lambda) {
  spec.check();
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("target lambda must lie in [0, 1]");
  const double d = 1.0 - lambda - spec.alpha * lambda;
  const double z1 = d > 0.0 ? std::min(spec.z1_max(), lambda * spec.z0 / d) : spec.z1_max();
  auto objective = [&](double z) {
    const double gap = backfire_mean_opinion(spec.z0, spec.alpha, z) - lambda;
    return gap * gap;
  };
  return detail::finish(spec, z1, objective, false);
}

/// (P2): z1 maximizing sigma_{z0,alpha}; z1* = min(z1_max, z0 / (1 - alpha)).
///
/// Without opinion-0 zealots sigma is constant on (0, z1_max]; z1_max is returned.
inline OptimizationResult solve_p2_diversity_complete(const BackfireSpec& spec) {
  spec.check();
  const double z1 = spec.z0 > 0.0 ? std::min(spec.z1_max(), spec.z0 / (1.0 - spec.alpha)) : spec.z1_max();
  return detail::finish(spec, z1, [&](double z) { return backfire_sigma(spec.z0, spec.alpha, z); }, true);
}

/// Numerator of d/dz1 rho_{z0,alpha}(z1), a polynomial of degree at most 3
/// (the cubic terms cancel, leaving at most a quadratic).
inline Polynomial<double> backfire_active_derivative_numerator(double z0, double alpha) {
  const double b = 1.0 + alpha;
  const Polynomial<double> u{0.0, z0, alpha};      // (z0 + alpha z) z
  const Polynomial<double> s{z0, b};               // z0 + b z
  const Polynomial<double> v = s * s + s;          // s (s + 1)
  return u.derivative() * v - u * v.derivative();
}

/// (P3): z1 maximizing rho_{z0,alpha} over [0, z1_max]. Candidates are z1_max and
/// every real root of the derivative's numerator inside (0, z1_max).
inline OptimizationResult solve_p3_active_complete(const BackfireSpec& spec) {
  spec.check();
  const double z1_max = spec.z1_max();
  auto objective = [&](double z) { return backfire_active(spec.z0, spec.alpha, z); };
  double best = z1_max;
  double best_value = objective(z1_max);
  for (double r : real_roots(backfire_active_derivative_numerator(spec.z0, spec.alpha))) {
    if (r > 0.0 && r < z1_max) {
      const double v = objective(r);
      if (v > best_value) {
        best = r;
        best_value = v;
      }
    }
  }
  return detail::finish(spec, best, objective, true);
}

// ---------------------------------------------------------------------------
// General networks

struct DiversityOptions {
  /// Target accuracy on |x-bar* - 1/2|.
  double tolerance = 1e-6;
  int max_iterations = 500;
  SolverOptions solver;
};

struct DiversityResult {
  /// Input network with the optimized support weights.
  Network network;
  /// Edges out of the support nodes, carrying the optimized weights.
  std::vector<Edge> support_edges;
  /// Resulting opinion-1 zealot influence per free node (free-index order).
  std::vector<double> z1;
  double x_bar = 0.0;
  double sigma = 0.0;
  int iterations = 0;
};

namespace detail {

inline Network with_weights(std::span<const NodeRole> roles, std::vector<Edge> edges,
                            std::span<const std::size_t> slots, std::span<const double> weights) {
  for (std::size_t k = 0; k < slots.size(); ++k) edges[slots[k]].weight = weights[k];
  return Network(std::vector<NodeRole>(roles.begin(), roles.end()), std::move(edges));
}

}  // namespace detail

/// (P): choose the outgoing weights of the given opinion-1 zealots onto free
/// nodes, all >= 0, so that x-bar* = 1/2 (sigma = 1).
///
/// Projected gradient descent on (x-bar* - 1/2)^2. The gradient of x-bar* comes
/// from one adjoint solve: d x-bar* / d z1_i = a_i (1 - x_i) / N with
/// [L + diag(z0 + z1)]^T a = 1. Steps are Gauss-Newton sized along the gradient,
/// halved until the gap shrinks; negative weights are clipped to zero.
inline DiversityResult solve_p_diversity_general(const Network& net, std::span<const NodeId> support,
                                                 const DiversityOptions& opts = {}) {
  require_valid(net);
  if (support.empty()) throw std::invalid_argument("support set is empty");
  std::vector<char> in_support(net.size(), 0);
  for (NodeId s : support) {
    if (s >= net.size() || net.role(s) != NodeRole::zealot1) {
      throw std::invalid_argument("support node " + std::to_string(s) + " is not an opinion-1 zealot");
    }
    in_support[s] = 1;
  }
  const std::vector<Edge> base = net.edges();
  std::vector<std::size_t> slots;
  std::vector<double> v;
  for (std::size_t k = 0; k < base.size(); ++k) {
    if (in_support[base[k].src]) {
      slots.push_back(k);
      v.push_back(base[k].weight);
    }
  }
  if (slots.empty()) throw InputError("infeasible support: no free node is influenced by the support");
  const ZealotInfluence zi = zealot_influence(net);
  if (std::all_of(zi.z0.begin(), zi.z0.end(), [](double z) { return z == 0.0; })) {
    throw InputError("degenerate input: opinion-0 zealots exert no influence, x-bar* is not controllable");
  }

  const double n = static_cast<double>(net.size());
  const double ones = static_cast<double>(net.count(NodeRole::zealot1));

  struct State {
    Network network;
    std::shared_ptr<const OpinionSystem> system;
    Eigen::VectorXd x;
    double x_bar = 0.0;
  };
  auto evaluate = [&](std::span<const double> weights) -> std::optional<State> {
    State st{detail::with_weights(net.roles(), base, slots, weights), nullptr, {}, 0.0};
    if (!validate(st.network).ok()) return std::nullopt;
    try {
      st.system = std::make_shared<const OpinionSystem>(st.network, opts.solver);
    } catch (const SingularSystem&) {
      return std::nullopt;
    }
    const auto& z1 = st.system->influence().z1;
    st.x = st.system->solve(Eigen::Map<const Eigen::VectorXd>(z1.data(), static_cast<Eigen::Index>(z1.size())));
    st.x_bar = (st.x.sum() + ones) / n;
    return st;
  };

  std::optional<State> current = evaluate(v);
  if (!current) throw SingularSystem("initial support weights leave free nodes without zealot influence", {});
  int iter = 0;
  for (; std::abs(current->x_bar - 0.5) >= opts.tolerance; ++iter) {
    if (iter >= opts.max_iterations) {
      throw ConvergenceError("diversity ascent did not converge; final |x_bar - 1/2| = " +
                                 std::to_string(std::abs(current->x_bar - 0.5)),
                             std::abs(current->x_bar - 0.5));
    }
    const Network& cn = current->network;
    const Eigen::VectorXd adj =
        current->system->solve_transposed(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(cn.free_count())));
    std::vector<double> grad(slots.size());
    double norm2 = 0.0;
    for (std::size_t k = 0; k < slots.size(); ++k) {
      const auto a = static_cast<Eigen::Index>(cn.free_index(base[slots[k]].dst));
      grad[k] = adj[a] * (1.0 - current->x[a]) / n;
      norm2 += grad[k] * grad[k];
    }
    const double gap = current->x_bar - 0.5;
    if (norm2 == 0.0) {
      throw ConvergenceError("zero gradient: support weights no longer move x_bar", std::abs(gap));
    }
    bool moved = false;
    std::vector<double> trial(v.size());
    for (double step = 1.0; step > 1e-14; step /= 2.0) {
      for (std::size_t k = 0; k < v.size(); ++k) trial[k] = std::max(0.0, v[k] - step * gap * grad[k] / norm2);
      if (trial == v) break;
      if (auto next = evaluate(trial); next && std::abs(next->x_bar - 0.5) < std::abs(gap)) {
        v = trial;
        current = std::move(next);
        moved = true;
        break;
      }
    }
    if (!moved) {
      throw ConvergenceError("diversity ascent stalled at the feasible boundary; |x_bar - 1/2| = " +
                                 std::to_string(std::abs(gap)),
                             std::abs(gap));
    }
  }

  DiversityResult out;
  out.network = current->network;
  for (std::size_t k = 0; k < slots.size(); ++k) out.support_edges.push_back({base[slots[k]].dst, base[slots[k]].src, v[k]});
  out.z1 = current->system->influence().z1;
  out.x_bar = current->x_bar;
  out.sigma = 4.0 * out.x_bar * (1.0 - out.x_bar);
  out.iterations = iter;
  return out;
}

}  // namespace zealotry
