#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "zealotry/errors.hpp"
#include "zealotry/network.hpp"

// Text format, one record per line, '#' starts a comment:
//
//   nodes <N>
//   node <id> <free|z0|z1>        one line per node
//   edge <dst> <src> <weight>     w_{dst,src} = weight
//
// Weights are written in shortest round-trip form, so save/load is exact.

namespace zealotry {

namespace detail {

inline std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

template <class T>
bool parse_number(std::string_view token, T& out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc{} && ptr == token.data() + token.size();
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') ++end;
    if (end > pos) tokens.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return tokens;
}

}  // namespace detail

inline void save_network(const Network& net, std::ostream& os) {
  os << "nodes " << net.size() << '\n';
  for (NodeId i = 0; i < net.size(); ++i) os << "node " << i << ' ' << to_string(net.role(i)) << '\n';
  for (NodeId i = 0; i < net.size(); ++i) {
    for (const InEdge& e : net.in_edges(i)) {
      os << "edge " << i << ' ' << e.source << ' ' << detail::format_double(e.weight) << '\n';
    }
  }
}

inline void save_network(const Network& net, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw InputError("cannot open " + path + " for writing");
  save_network(net, os);
  if (!os) throw InputError("write failed: " + path);
}

/// Parses and validates. Malformed lines, self-loops, negative weights and
/// duplicate records raise ParseError with the line number; model invariant
/// violations raise InputError carrying the validate() report.
inline Network load_network(std::istream& is, const std::string& source = "<stream>") {
  std::string line;
  std::size_t lineno = 0;
  std::size_t n = 0;
  bool have_header = false;
  std::vector<NodeRole> roles;
  std::vector<bool> seen;
  std::vector<Edge> edges;

  auto fail = [&](const std::string& what) { throw ParseError(source, lineno, what); };
  auto parse_id = [&](std::string_view token) {
    NodeId id = 0;
    if (!detail::parse_number(token, id)) fail("bad node id '" + std::string(token) + "'");
    if (id >= n) fail("node id " + std::to_string(id) + " out of range");
    return id;
  };

  while (std::getline(is, line)) {
    ++lineno;
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    const auto tok = detail::split_ws(view);
    if (tok.empty()) continue;

    if (tok[0] == "nodes") {
      if (have_header) fail("duplicate 'nodes' header");
      if (tok.size() != 2 || !detail::parse_number(tok[1], n)) fail("expected 'nodes <N>'");
      have_header = true;
      roles.assign(n, NodeRole::free);
      seen.assign(n, false);
      continue;
    }
    if (!have_header) fail("expected 'nodes <N>' before any record");

    if (tok[0] == "node") {
      if (tok.size() != 3) fail("expected 'node <id> <role>'");
      const NodeId id = parse_id(tok[1]);
      const auto role = parse_role(tok[2]);
      if (!role) fail("unknown role '" + std::string(tok[2]) + "'");
      if (seen[id]) fail("node " + std::to_string(id) + " declared twice");
      seen[id] = true;
      roles[id] = *role;
    } else if (tok[0] == "edge") {
      if (tok.size() != 4) fail("expected 'edge <dst> <src> <weight>'");
      const NodeId dst = parse_id(tok[1]);
      const NodeId src = parse_id(tok[2]);
      double w = 0.0;
      if (!detail::parse_number(tok[3], w) || !std::isfinite(w)) {
        fail("bad weight '" + std::string(tok[3]) + "'");
      }
      if (dst == src) fail("self-loop on node " + std::to_string(dst));
      if (w < 0.0) fail("negative weight");
      edges.push_back({dst, src, w});
    } else {
      fail("unknown record '" + std::string(tok[0]) + "'");
    }
  }
  if (!have_header) throw ParseError(source, lineno, "missing 'nodes <N>' header");
  for (NodeId i = 0; i < n; ++i) {
    if (!seen[i]) throw ParseError(source, lineno, "node " + std::to_string(i) + " has no role line");
  }

  Network net;
  try {
    net = Network(std::move(roles), std::move(edges));
  } catch (const std::invalid_argument& e) {
    throw ParseError(source, lineno, e.what());
  }
  const ValidationReport report = validate(net);
  if (!report.ok()) throw InputError(source + ": invalid network:\n" + report.to_string());
  return net;
}

inline Network load_network(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open " + path);
  return load_network(is, path);
}

}  // namespace zealotry
