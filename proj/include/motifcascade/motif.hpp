#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <istream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "motifcascade/error.hpp"
#include "motifcascade/temporal.hpp"

namespace motifcascade {

// Edge of a motif over local vertices {0, 1, 2}.
struct LocalEdge {
  std::uint8_t src;
  std::uint8_t dst;
  EdgeType type;
};

// Canonical label of a typed 3-vertex directed multigraph: two bits (cascade,
// historical) for each of the six ordered vertex pairs, packed so that the
// numeric order equals lexicographic order over the pair list.
struct MotifCode {
  std::uint16_t bits = 0;
  friend auto operator<=>(const MotifCode&, const MotifCode&) = default;
};

namespace detail {

inline constexpr std::array<std::array<int, 2>, 6> kOrderedPairs{
    {{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}}};

inline int pair_slot(int a, int b) {
  for (int k = 0; k < 6; ++k)
    if (kOrderedPairs[k][0] == a && kOrderedPairs[k][1] == b) return k;
  return -1;
}

// adjacency[a][b] holds bit0 = cascade, bit1 = historical.
using TypedAdjacency3 = std::array<std::array<std::uint8_t, 3>, 3>;

inline std::uint16_t encode(const TypedAdjacency3& adj, const std::array<int, 3>& perm) {
  TypedAdjacency3 p{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) p[perm[a]][perm[b]] = adj[a][b];
  std::uint16_t code = 0;
  for (int k = 0; k < 6; ++k)
    code = static_cast<std::uint16_t>((code << 2) | p[kOrderedPairs[k][0]][kOrderedPairs[k][1]]);
  return code;
}

inline MotifCode canonical_from_adjacency(const TypedAdjacency3& adj) {
  std::array<int, 3> perm{0, 1, 2};
  std::uint16_t best = 0xffff;
  do {
    best = std::min(best, encode(adj, perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {best};
}

inline bool connected(const TypedAdjacency3& adj) {
  auto linked = [&](int a, int b) { return adj[a][b] != 0 || adj[b][a] != 0; };
  int links = linked(0, 1) + linked(0, 2) + linked(1, 2);
  return links >= 2;
}

}  // namespace detail

// Minimum encoding over all six vertex relabelings.
inline MotifCode canonicalize_pattern(std::span<const LocalEdge> edges) {
  detail::TypedAdjacency3 adj{};
  for (const auto& e : edges) {
    if (e.src > 2 || e.dst > 2)
      throw ConfigError("motif patterns are limited to vertices {0, 1, 2}");
    if (e.src == e.dst) throw ConfigError("motif patterns cannot contain self-loops");
    adj[e.src][e.dst] |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(e.type));
  }
  return detail::canonical_from_adjacency(adj);
}

struct MotifPattern {
  MotifCode code;
  std::string name;
  std::vector<LocalEdge> edges;
};

class PatternSet {
 public:
  PatternSet() = default;

  void add(std::string name, std::vector<LocalEdge> edges) {
    detail::TypedAdjacency3 adj{};
    for (const auto& e : edges) {
      if (e.src > 2 || e.dst > 2 || e.src == e.dst)
        throw ConfigError("pattern '" + name + "' has an edge outside vertices {0, 1, 2}");
      adj[e.src][e.dst] |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(e.type));
    }
    if (!detail::connected(adj))
      throw ConfigError("pattern '" + name + "' is not a connected 3-node graph");
    auto code = canonicalize_pattern(edges);
    if (codes_.insert(code).second) patterns_.push_back({code, std::move(name), std::move(edges)});
  }

  bool contains(MotifCode code) const { return codes_.count(code) != 0; }
  const std::vector<MotifPattern>& patterns() const noexcept { return patterns_; }
  std::size_t size() const noexcept { return patterns_.size(); }

 private:
  std::vector<MotifPattern> patterns_;
  std::set<MotifCode> codes_;
};

// Six connected patterns built around a parent->child pair that carries both
// a cascade and a historical edge (vertex 0 = parent, 1 = child, 2 = third).
inline PatternSet default_patterns() {
  constexpr auto C = EdgeType::cascade;
  constexpr auto H = EdgeType::historical;
  PatternSet set;
  set.add("sibling", {{0, 1, C}, {0, 1, H}, {0, 2, C}, {0, 2, H}});
  set.add("side-exposure", {{0, 1, C}, {0, 1, H}, {2, 1, H}});
  set.add("chain", {{0, 1, C}, {0, 1, H}, {2, 0, C}, {2, 0, H}});
  set.add("chain-exposure", {{0, 1, C}, {0, 1, H}, {2, 0, C}, {2, 0, H}, {2, 1, H}});
  set.add("sibling-exposure", {{0, 1, C}, {0, 1, H}, {0, 2, C}, {0, 2, H}, {2, 1, H}});
  set.add("co-follower", {{0, 1, C}, {0, 1, H}, {2, 0, H}, {2, 1, H}});
  return set;
}

// JSON list of patterns, each a list of [src, dst, "cascade" | "historical"].
inline PatternSet parse_patterns(const nlohmann::json& doc) {
  if (!doc.is_array()) throw ConfigError("pattern file must hold a JSON list");
  PatternSet set;
  std::size_t i = 0;
  for (const auto& p : doc) {
    if (!p.is_array()) throw ConfigError("pattern " + std::to_string(i) + " is not a list");
    std::vector<LocalEdge> edges;
    for (const auto& e : p) {
      if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() ||
          !e[1].is_number_integer() || !e[2].is_string())
        throw ConfigError("pattern " + std::to_string(i) + ": edge must be [src, dst, type]");
      const auto type = e[2].get<std::string>();
      if (type != "cascade" && type != "historical")
        throw ConfigError("pattern " + std::to_string(i) + ": unknown edge type '" + type + "'");
      const int s = e[0].get<int>(), d = e[1].get<int>();
      if (s < 0 || s > 2 || d < 0 || d > 2)
        throw ConfigError("pattern " + std::to_string(i) + ": vertex out of range");
      edges.push_back({static_cast<std::uint8_t>(s), static_cast<std::uint8_t>(d),
                       type == "cascade" ? EdgeType::cascade : EdgeType::historical});
    }
    set.add("pattern-" + std::to_string(i), std::move(edges));
    ++i;
  }
  return set;
}

inline nlohmann::json patterns_to_json(const PatternSet& set) {
  auto doc = nlohmann::json::array();
  for (const auto& p : set.patterns()) {
    auto edges = nlohmann::json::array();
    for (const auto& e : p.edges)
      edges.push_back({e.src, e.dst, e.type == EdgeType::cascade ? "cascade" : "historical"});
    doc.push_back(edges);
  }
  return doc;
}

// Connected induced 3-node subgraph of a window.
struct MotifInstance {
  std::array<NodeId, 3> vertices;  // ascending NodeId
  std::vector<TypedEdge> edges;
  MotifCode code;
};

// Local adjacency of a window graph for enumeration.
class WindowGraph {
 public:
  explicit WindowGraph(const TemporalWindow& w) : nodes_(w.nodes()) {
    std::sort(nodes_.begin(), nodes_.end());
    const std::size_t n = nodes_.size();
    typed_.assign(n * n, 0);
    undirected_.assign(n, {});
    for (const auto& e : w.edges) {
      auto a = local(e.src), b = local(e.dst);
      typed_[a * n + b] |= static_cast<std::uint8_t>(1u << static_cast<unsigned>(e.type));
    }
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (a != b && (typed_[a * n + b] || typed_[b * n + a])) undirected_[a].push_back(b);
  }

  std::size_t size() const noexcept { return nodes_.size(); }
  NodeId node(std::size_t i) const { return nodes_[i]; }
  std::size_t local(NodeId v) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), v);
    if (it == nodes_.end() || *it != v) throw DataError("edge endpoint outside window");
    return static_cast<std::size_t>(it - nodes_.begin());
  }
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return undirected_[i]; }
  bool adjacent(std::size_t a, std::size_t b) const {
    return typed_[a * size() + b] || typed_[b * size() + a];
  }
  std::uint8_t typed(std::size_t a, std::size_t b) const { return typed_[a * size() + b]; }

  MotifInstance instance(std::array<std::size_t, 3> loc) const {
    std::sort(loc.begin(), loc.end());
    MotifInstance m;
    detail::TypedAdjacency3 adj{};
    for (int a = 0; a < 3; ++a) {
      m.vertices[a] = nodes_[loc[a]];
      for (int b = 0; b < 3; ++b) {
        if (a == b) continue;
        const auto bits = typed(loc[a], loc[b]);
        adj[a][b] = bits;
        if (bits & 1u) m.edges.push_back({nodes_[loc[a]], nodes_[loc[b]], EdgeType::cascade});
        if (bits & 2u) m.edges.push_back({nodes_[loc[a]], nodes_[loc[b]], EdgeType::historical});
      }
    }
    std::sort(m.edges.begin(), m.edges.end());
    m.code = detail::canonical_from_adjacency(adj);
    return m;
  }

 private:
  std::vector<NodeId> nodes_;
  std::vector<std::uint8_t> typed_;
  std::vector<std::vector<std::size_t>> undirected_;
};

// ESU enumeration (Wernicke) specialised to k = 3: every connected induced
// triple is visited exactly once.
inline void for_each_size3(const WindowGraph& g, const std::function<void(const MotifInstance&)>& fn) {
  const std::size_t n = g.size();
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<std::size_t> ext;
    for (auto u : g.neighbors(v))
      if (u > v) ext.push_back(u);
    while (!ext.empty()) {
      const std::size_t w = ext.back();
      ext.pop_back();
      // exclusive neighbourhood of w relative to {v}
      std::vector<std::size_t> next(ext);
      for (auto u : g.neighbors(w))
        if (u > v && u != v && !g.adjacent(u, v)) next.push_back(u);
      for (auto u : next) fn(g.instance({v, w, u}));
    }
  }
}

inline std::vector<MotifInstance> enumerate_size3(const TemporalWindow& window) {
  WindowGraph g(window);
  std::vector<MotifInstance> out;
  for_each_size3(g, [&](const MotifInstance& m) { out.push_back(m); });
  return out;
}

}  // namespace motifcascade
