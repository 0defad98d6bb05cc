#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zealotry/network.hpp"

namespace zealotry {

enum class WeightLaw { constant, uniform, exponential };

inline std::string_view to_string(WeightLaw law) {
  switch (law) {
    case WeightLaw::constant: return "constant";
    case WeightLaw::uniform: return "uniform";
    case WeightLaw::exponential: return "exponential";
  }
  return "?";
}

inline std::optional<WeightLaw> parse_weight_law(std::string_view text) {
  if (text == "constant") return WeightLaw::constant;
  if (text == "uniform") return WeightLaw::uniform;
  if (text == "exponential") return WeightLaw::exponential;
  return std::nullopt;
}

namespace detail {

// Strictly positive draws: uniform on (0, 1], exponential with mean 1.
inline double draw_weight(WeightLaw law, std::mt19937_64& rng) {
  switch (law) {
    case WeightLaw::constant: return 1.0;
    case WeightLaw::uniform: return 1.0 - std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    case WeightLaw::exponential: {
      std::exponential_distribution<double> exp1(1.0);
      double w = 0.0;
      while (w == 0.0) w = exp1(rng);
      return w;
    }
  }
  return 1.0;
}

inline void check_counts(std::size_t n, std::size_t z0_count, std::size_t z1_count) {
  if (z0_count + z1_count > n) {
    throw std::invalid_argument("zealot counts " + std::to_string(z0_count) + " + " +
                                std::to_string(z1_count) + " exceed node count " + std::to_string(n));
  }
}

/// Uniform placement without replacement: a shuffled prefix becomes Z0, the next block Z1.
inline std::vector<NodeRole> draw_roles(std::size_t n, std::size_t z0_count, std::size_t z1_count,
                                        std::mt19937_64& rng) {
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), NodeId{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<NodeRole> roles(n, NodeRole::free);
  for (std::size_t k = 0; k < z0_count; ++k) roles[order[k]] = NodeRole::zealot0;
  for (std::size_t k = z0_count; k < z0_count + z1_count; ++k) roles[order[k]] = NodeRole::zealot1;
  return roles;
}

}  // namespace detail

/// Directed Erdos-Renyi graph. Every ordered pair (i, j) with i free and i != j
/// carries the edge j -> i independently with probability `density`.
///
/// A free node whose row comes out empty has its row redrawn, so the result
/// always passes validate(); this conditions on d_i > 0.
inline Network generate_erdos_renyi(std::size_t n, double density, std::size_t z0_count,
                                    std::size_t z1_count, WeightLaw law, std::uint64_t seed) {
  detail::check_counts(n, z0_count, z1_count);
  if (!(density > 0.0 && density <= 1.0)) {
    throw std::invalid_argument("density must lie in (0, 1]");
  }
  std::mt19937_64 rng(seed);
  std::vector<NodeRole> roles = detail::draw_roles(n, z0_count, z1_count, rng);
  if (n == 1 && roles[0] == NodeRole::free) {
    throw std::invalid_argument("a single free node cannot receive influence");
  }
  std::bernoulli_distribution coin(density);
  std::vector<Edge> edges;
  std::vector<Edge> row;
  for (NodeId i = 0; i < n; ++i) {
    if (roles[i] != NodeRole::free) continue;
    do {
      row.clear();
      for (NodeId j = 0; j < n; ++j) {
        if (j != i && coin(rng)) row.push_back({i, j, detail::draw_weight(law, rng)});
      }
    } while (row.empty());
    edges.insert(edges.end(), row.begin(), row.end());
  }
  return Network(std::move(roles), std::move(edges));
}

/// Undirected preferential-attachment skeleton: a clique on the first m nodes,
/// then each new node links to m distinct earlier nodes chosen with probability
/// proportional to degree. Each undirected link becomes two directed edges with
/// independent weights; edges into zealots are dropped.
///
/// m = 5 at n = 100 gives skeleton density (10 + 5 * 95) / 4950 = 0.098.
inline Network generate_barabasi_albert(std::size_t n, std::size_t m, std::size_t z0_count,
                                        std::size_t z1_count, WeightLaw law, std::uint64_t seed) {
  detail::check_counts(n, z0_count, z1_count);
  if (m < 1 || m >= n) throw std::invalid_argument("attachment count m must satisfy 1 <= m < n");
  std::mt19937_64 rng(seed);
  std::vector<NodeRole> roles = detail::draw_roles(n, z0_count, z1_count, rng);

  std::vector<std::pair<NodeId, NodeId>> links;
  // Each endpoint appears once per incident link: sampling an entry is degree-proportional.
  std::vector<NodeId> endpoints;
  for (NodeId u = 0; u < m; ++u) {
    for (NodeId v = u + 1; v < m; ++v) {
      links.emplace_back(u, v);
      endpoints.push_back(u);
      endpoints.push_back(v);
    }
  }
  std::set<NodeId> targets;
  for (NodeId v = m; v < n; ++v) {
    targets.clear();
    while (targets.size() < m) {
      NodeId t;
      if (endpoints.empty()) {
        t = std::uniform_int_distribution<NodeId>(0, v - 1)(rng);
      } else {
        t = endpoints[std::uniform_int_distribution<std::size_t>(0, endpoints.size() - 1)(rng)];
      }
      targets.insert(t);
    }
    for (NodeId t : targets) {
      links.emplace_back(t, v);
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }

  std::vector<Edge> edges;
  edges.reserve(2 * links.size());
  for (auto [u, v] : links) {
    const double w_uv = detail::draw_weight(law, rng);
    const double w_vu = detail::draw_weight(law, rng);
    if (roles[u] == NodeRole::free) edges.push_back({u, v, w_uv});
    if (roles[v] == NodeRole::free) edges.push_back({v, u, w_vu});
  }
  return Network(std::move(roles), std::move(edges));
}

/// Complete unweighted network: w_ij = 1 for every i free, j != i. Zealots are
/// the lowest ids (Z0 first, then Z1); all placements are equivalent here.
inline Network generate_complete(std::size_t n, std::size_t z0_count, std::size_t z1_count) {
  detail::check_counts(n, z0_count, z1_count);
  if (n == 1 && z0_count + z1_count == 0) {
    throw std::invalid_argument("a single free node cannot receive influence");
  }
  std::vector<NodeRole> roles(n, NodeRole::free);
  for (std::size_t k = 0; k < z0_count; ++k) roles[k] = NodeRole::zealot0;
  for (std::size_t k = z0_count; k < z0_count + z1_count; ++k) roles[k] = NodeRole::zealot1;
  std::vector<Edge> edges;
  edges.reserve((n - z0_count - z1_count) * (n > 0 ? n - 1 : 0));
  for (NodeId i = z0_count + z1_count; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) {
      if (j != i) edges.push_back({i, j, 1.0});
    }
  }
  return Network(std::move(roles), std::move(edges));
}

}  // namespace zealotry
