#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "zealotry/errors.hpp"

namespace zealotry {

using NodeId = std::size_t;

enum class NodeRole : std::uint8_t { free, zealot0, zealot1 };

inline std::string_view to_string(NodeRole role) {
  switch (role) {
    case NodeRole::free: return "free";
    case NodeRole::zealot0: return "z0";
    case NodeRole::zealot1: return "z1";
  }
  return "?";
}

inline std::optional<NodeRole> parse_role(std::string_view text) {
  if (text == "free") return NodeRole::free;
  if (text == "z0") return NodeRole::zealot0;
  if (text == "z1") return NodeRole::zealot1;
  return std::nullopt;
}

inline bool is_zealot(NodeRole role) { return role != NodeRole::free; }

/// Directed edge src -> dst carrying w_{dst,src}: the influence of src over dst.
struct Edge {
  NodeId dst;
  NodeId src;
  double weight;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct InEdge {
  NodeId source;
  double weight;

  friend bool operator==(const InEdge&, const InEdge&) = default;
};

/// Directed weighted influence graph with node roles.
///
/// Edges are stored by destination (compressed rows of w), sorted by source.
/// Zero-weight edges are dropped. The constructor only checks structural
/// consistency (ids in range, no duplicate pairs); model invariants are
/// checked by validate() so that invalid graphs can still be represented and
/// reported on.
class Network {
 public:
  Network() = default;

  Network(std::vector<NodeRole> roles, std::vector<Edge> edges) : roles_(std::move(roles)) {
    const std::size_t n = roles_.size();
    std::erase_if(edges, [](const Edge& e) { return e.weight == 0.0; });
    for (const Edge& e : edges) {
      if (e.dst >= n || e.src >= n) {
        throw std::invalid_argument("edge endpoint out of range: " + std::to_string(e.dst) + " <- " +
                                    std::to_string(e.src));
      }
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return a.dst != b.dst ? a.dst < b.dst : a.src < b.src;
    });
    offsets_.assign(n + 1, 0);
    in_.reserve(edges.size());
    for (std::size_t k = 0; k < edges.size(); ++k) {
      if (k > 0 && edges[k].dst == edges[k - 1].dst && edges[k].src == edges[k - 1].src) {
        throw std::invalid_argument("duplicate edge " + std::to_string(edges[k].dst) + " <- " +
                                    std::to_string(edges[k].src));
      }
      ++offsets_[edges[k].dst + 1];
      in_.push_back({edges[k].src, edges[k].weight});
    }
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];

    free_index_.assign(n, npos);
    for (NodeId i = 0; i < n; ++i) {
      if (roles_[i] == NodeRole::free) {
        free_index_[i] = free_.size();
        free_.push_back(i);
      }
    }
  }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t size() const noexcept { return roles_.size(); }
  std::size_t edge_count() const noexcept { return in_.size(); }

  NodeRole role(NodeId i) const { return roles_.at(i); }
  std::span<const NodeRole> roles() const noexcept { return roles_; }
  bool is_free(NodeId i) const { return roles_.at(i) == NodeRole::free; }

  std::size_t count(NodeRole role) const {
    return static_cast<std::size_t>(std::count(roles_.begin(), roles_.end(), role));
  }

  /// Free nodes in increasing id order; position in this list is the node's free index.
  std::span<const NodeId> free_nodes() const noexcept { return free_; }
  std::size_t free_count() const noexcept { return free_.size(); }
  std::size_t free_index(NodeId i) const { return free_index_.at(i); }

  std::span<const InEdge> in_edges(NodeId i) const {
    return {in_.data() + offsets_.at(i), in_.data() + offsets_.at(i + 1)};
  }

  /// w_{dst,src}, zero when absent.
  double weight(NodeId dst, NodeId src) const {
    auto row = in_edges(dst);
    auto it = std::lower_bound(row.begin(), row.end(), src,
                               [](const InEdge& e, NodeId s) { return e.source < s; });
    return (it != row.end() && it->source == src) ? it->weight : 0.0;
  }

  /// d_i, the total influence received by i.
  double in_degree(NodeId i) const {
    double d = 0.0;
    for (const InEdge& e : in_edges(i)) d += e.weight;
    return d;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(in_.size());
    for (NodeId i = 0; i < size(); ++i) {
      for (const InEdge& e : in_edges(i)) out.push_back({i, e.source, e.weight});
    }
    return out;
  }

  friend bool operator==(const Network& a, const Network& b) {
    return a.roles_ == b.roles_ && a.offsets_ == b.offsets_ && a.in_ == b.in_;
  }

 private:
  std::vector<NodeRole> roles_;
  std::vector<std::size_t> offsets_{0};
  std::vector<InEdge> in_;
  std::vector<NodeId> free_;
  std::vector<std::size_t> free_index_;
};

// ---------------------------------------------------------------------------
// Validation

struct Violation {
  enum class Kind { self_loop, bad_weight, zealot_receives_influence, isolated_free_node };

  Kind kind;
  NodeId node;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const noexcept { return violations.empty(); }

  bool has(Violation::Kind kind) const {
    return std::any_of(violations.begin(), violations.end(),
                       [kind](const Violation& v) { return v.kind == kind; });
  }

  std::string to_string() const {
    std::ostringstream os;
    for (const Violation& v : violations) os << v.message << '\n';
    return os.str();
  }
};

inline ValidationReport validate(const Network& net) {
  ValidationReport report;
  auto add = [&](Violation::Kind kind, NodeId node, const std::string& what) {
    report.violations.push_back({kind, node, what + " (node " + std::to_string(node) + ")"});
  };
  for (NodeId i = 0; i < net.size(); ++i) {
    const auto row = net.in_edges(i);
    for (const InEdge& e : row) {
      if (e.source == i) add(Violation::Kind::self_loop, i, "self-loop");
      if (!std::isfinite(e.weight) || e.weight < 0.0) {
        add(Violation::Kind::bad_weight, i,
            "weight from " + std::to_string(e.source) + " is negative or not finite");
      }
    }
    if (is_zealot(net.role(i)) && !row.empty()) {
      add(Violation::Kind::zealot_receives_influence, i, "zealot receives influence");
    }
    if (net.role(i) == NodeRole::free && !(net.in_degree(i) > 0.0)) {
      add(Violation::Kind::isolated_free_node, i, "isolated free node");
    }
  }
  return report;
}

inline void require_valid(const Network& net) {
  const ValidationReport report = validate(net);
  if (!report.ok()) throw InputError("invalid network:\n" + report.to_string());
}

// ---------------------------------------------------------------------------

/// Zealot influence over free users, indexed by free index.
struct ZealotInfluence {
  std::vector<double> z0;
  std::vector<double> z1;
};

inline ZealotInfluence zealot_influence(const Network& net) {
  require_valid(net);
  ZealotInfluence zi;
  zi.z0.assign(net.free_count(), 0.0);
  zi.z1.assign(net.free_count(), 0.0);
  for (std::size_t a = 0; a < net.free_count(); ++a) {
    for (const InEdge& e : net.in_edges(net.free_nodes()[a])) {
      switch (net.role(e.source)) {
        case NodeRole::zealot0: zi.z0[a] += e.weight; break;
        case NodeRole::zealot1: zi.z1[a] += e.weight; break;
        case NodeRole::free: break;
      }
    }
  }
  return zi;
}

}  // namespace zealotry
