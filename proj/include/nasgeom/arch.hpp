#pragma once

// Cell specifications in the NAS-Bench-201 textual format:
//
//   |op~0|+|op~0|op~1|+|op~0|op~1|op~2|
//
// Group t (1-based) lists the incoming edges of node t, one "op~source" token
// per source node s < t.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rng.hpp"

namespace nasgeom {

enum class OpKind : std::uint8_t { none, skip_connect, nor_conv_1x1, nor_conv_3x3, avg_pool_3x3 };

inline constexpr std::array<OpKind, 5> kAllOps = {OpKind::none, OpKind::skip_connect, OpKind::nor_conv_1x1,
                                                  OpKind::nor_conv_3x3, OpKind::avg_pool_3x3};

constexpr std::string_view to_string(OpKind op) noexcept {
  switch (op) {
    case OpKind::none: return "none";
    case OpKind::skip_connect: return "skip_connect";
    case OpKind::nor_conv_1x1: return "nor_conv_1x1";
    case OpKind::nor_conv_3x3: return "nor_conv_3x3";
    case OpKind::avg_pool_3x3: return "avg_pool_3x3";
  }
  return "?";
}

constexpr std::optional<OpKind> op_from_string(std::string_view s) noexcept {
  for (OpKind op : kAllOps)
    if (to_string(op) == s) return op;
  return std::nullopt;
}

class ArchParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Edge {
  int target;
  int source;
  OpKind op;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Densely connected cell DAG. Edges are ordered by (target, source).
struct CellSpec {
  int num_nodes = 4;
  std::vector<Edge> edges;

  friend bool operator==(const CellSpec&, const CellSpec&) = default;

  static constexpr std::size_t edge_count(int nodes) noexcept {
    return static_cast<std::size_t>(nodes) * static_cast<std::size_t>(nodes - 1) / 2;
  }

  OpKind op(int target, int source) const {
    for (const auto& e : edges)
      if (e.target == target && e.source == source) return e.op;
    throw std::out_of_range("no edge " + std::to_string(source) + "->" + std::to_string(target));
  }

  /// True when the output node receives no signal (every path to it passes a `none` edge).
  bool output_is_zero() const {
    std::vector<bool> live(static_cast<std::size_t>(num_nodes), false);
    live[0] = true;
    for (int t = 1; t < num_nodes; ++t)
      for (int s = 0; s < t; ++s)
        if (live[static_cast<std::size_t>(s)] && op(t, s) != OpKind::none) live[static_cast<std::size_t>(t)] = true;
    return !live.back();
  }
};

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

inline CellSpec parse_arch_string(std::string_view s, int num_nodes = 4) {
  if (s.empty()) throw ArchParseError("empty architecture string");
  const auto groups = detail::split(s, '+');
  if (static_cast<int>(groups.size()) != num_nodes - 1)
    throw ArchParseError("wrong edge count: expected " + std::to_string(num_nodes - 1) + " node groups (" +
                         std::to_string(CellSpec::edge_count(num_nodes)) + " edges), got " + std::to_string(groups.size()));
  CellSpec cell;
  cell.num_nodes = num_nodes;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const int target = static_cast<int>(g) + 1;
    std::string_view group = groups[g];
    if (group.size() < 2 || group.front() != '|' || group.back() != '|')
      throw ArchParseError("malformed group " + std::to_string(target) + ": expected |op~src|...|");
    group = group.substr(1, group.size() - 2);
    const auto tokens = detail::split(group, '|');
    if (static_cast<int>(tokens.size()) != target)
      throw ArchParseError("wrong edge count for node " + std::to_string(target) + ": expected " +
                           std::to_string(target) + ", got " + std::to_string(tokens.size()));
    std::vector<bool> seen(static_cast<std::size_t>(target), false);
    std::vector<Edge> incoming;
    for (auto token : tokens) {
      const auto tilde = token.find('~');
      if (tilde == std::string_view::npos) throw ArchParseError("malformed token '" + std::string(token) + "'");
      const auto name = token.substr(0, tilde);
      const auto src_text = token.substr(tilde + 1);
      const auto op = op_from_string(name);
      if (!op) throw ArchParseError("unknown op token '" + std::string(name) + "'");
      if (src_text.empty() || !std::all_of(src_text.begin(), src_text.end(), [](char c) { return c >= '0' && c <= '9'; }))
        throw ArchParseError("malformed source index in '" + std::string(token) + "'");
      const int source = std::stoi(std::string(src_text));
      if (source >= target || seen[static_cast<std::size_t>(source)])
        throw ArchParseError("invalid or repeated source " + std::to_string(source) + " for node " +
                             std::to_string(target));
      seen[static_cast<std::size_t>(source)] = true;
      incoming.push_back({target, source, *op});
    }
    std::sort(incoming.begin(), incoming.end(), [](const Edge& a, const Edge& b) { return a.source < b.source; });
    cell.edges.insert(cell.edges.end(), incoming.begin(), incoming.end());
  }
  if (cell.num_nodes < 2) throw ArchParseError("cell needs at least two nodes");
  return cell;
}

inline std::string format_arch_string(const CellSpec& cell) {
  std::string out;
  for (int t = 1; t < cell.num_nodes; ++t) {
    if (t > 1) out += '+';
    out += '|';
    for (int s = 0; s < t; ++s) {
      out += to_string(cell.op(t, s));
      out += '~';
      out += std::to_string(s);
      out += '|';
    }
  }
  return out;
}

/// Each edge's op drawn uniformly from the five kinds.
inline CellSpec random_arch(std::uint64_t seed, int num_nodes = 4) {
  CounterRng rng(hash_combine(seed, 0xA4C1));
  CellSpec cell;
  cell.num_nodes = num_nodes;
  for (int t = 1; t < num_nodes; ++t)
    for (int s = 0; s < t; ++s) cell.edges.push_back({t, s, kAllOps[rng.below(kAllOps.size())]});
  return cell;
}

}  // namespace nasgeom
