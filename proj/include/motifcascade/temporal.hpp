#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "motifcascade/cascade.hpp"
#include "motifcascade/error.hpp"
#include "motifcascade/graph.hpp"

namespace motifcascade {

enum class EdgeType : std::uint8_t { cascade = 0, historical = 1 };

struct TypedEdge {
  NodeId src;
  NodeId dst;
  EdgeType type;

  friend auto operator<=>(const TypedEdge&, const TypedEdge&) = default;
};

// Cascade reshare edges unioned with historical edges among participants.
// An ordered pair present in both sources carries two typed edges.
struct AugmentedCascadeGraph {
  std::string cascade_id;
  std::vector<NodeId> nodes;      // activation order
  std::vector<TypedEdge> edges;   // sorted, unique
};

inline AugmentedCascadeGraph augment_cascade(const Cascade& c, const HistoricalGraph& g) {
  AugmentedCascadeGraph out;
  out.cascade_id = c.id();
  out.nodes.reserve(c.size());
  for (const auto& a : c.activations()) {
    out.nodes.push_back(a.node);
    if (a.parent) {
      if (!c.contains(*a.parent))
        throw DataError("cascade " + c.id() + ": parent of node " +
                        std::to_string(index_of(a.node)) + " is not a participant");
      out.edges.push_back({*a.parent, a.node, EdgeType::cascade});
    }
  }
  for (const auto& a : c.activations()) {
    if (index_of(a.node) >= g.node_count()) continue;
    for (NodeId d : g.out_neighbors(a.node))
      if (c.contains(d)) out.edges.push_back({a.node, d, EdgeType::historical});
  }
  std::sort(out.edges.begin(), out.edges.end());
  out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
  return out;
}

// W consecutive activations of one cascade.
struct Subsequence {
  std::string cascade_id;
  std::size_t index = 0;
  std::size_t first_position = 0;  // position of nodes[0] within the cascade
  std::vector<NodeId> nodes;
  double start_time = 0.0;
  double end_time = 0.0;
};

// Floor(R / W) equal-size subsequences; the trailing R mod W activations are dropped.
inline std::vector<Subsequence> partition_cascade(const Cascade& c, std::size_t window_size) {
  if (window_size < 2) throw ConfigError("window size must be at least 2");
  if (c.size() < 2 * window_size)
    throw CascadeTooShort("cascade " + c.id() + " has " + std::to_string(c.size()) +
                          " activations, need at least " + std::to_string(2 * window_size));
  const std::size_t q = c.size() / window_size;
  std::vector<Subsequence> out(q);
  for (std::size_t i = 0; i < q; ++i) {
    auto& s = out[i];
    s.cascade_id = c.id();
    s.index = i;
    s.first_position = i * window_size;
    for (std::size_t k = 0; k < window_size; ++k) s.nodes.push_back(c[s.first_position + k].node);
    s.start_time = c[s.first_position].time;
    s.end_time = c[s.first_position + window_size - 1].time;
  }
  return out;
}

// Edges with both endpoints inside one subsequence (E^{tau'} of that subsequence).
inline std::vector<TypedEdge> subsequence_edges(const Subsequence& s,
                                                const AugmentedCascadeGraph& g) {
  std::unordered_set<NodeId> members(s.nodes.begin(), s.nodes.end());
  std::vector<TypedEdge> out;
  for (const auto& e : g.edges)
    if (members.count(e.src) && members.count(e.dst)) out.push_back(e);
  return out;
}

// Union graph of subsequences index-1 (prior) and index (current).
struct TemporalWindow {
  std::string cascade_id;
  std::size_t index = 0;
  std::vector<NodeId> prior_nodes;    // V^{tau'}
  std::vector<NodeId> current_nodes;  // V^{tau''}
  std::vector<TypedEdge> edges;       // sorted

  std::size_t node_count() const noexcept { return prior_nodes.size() + current_nodes.size(); }
  std::vector<NodeId> nodes() const {
    std::vector<NodeId> out(prior_nodes);
    out.insert(out.end(), current_nodes.begin(), current_nodes.end());
    return out;
  }
};

// Q-1 windows. Each carries the internal edges of both subsequences plus the
// edges crossing between them, i.e. the augmented graph induced on its 2W nodes.
inline std::vector<TemporalWindow> temporal_windows(std::span<const Subsequence> subsequences,
                                                    const AugmentedCascadeGraph& augmented) {
  if (subsequences.size() < 2) throw CascadeTooShort("need at least two subsequences");
  std::unordered_map<NodeId, std::size_t> owner;
  for (const auto& s : subsequences)
    for (NodeId v : s.nodes) owner.emplace(v, s.index);
  std::vector<TemporalWindow> out(subsequences.size() - 1);
  for (std::size_t i = 1; i < subsequences.size(); ++i) {
    auto& w = out[i - 1];
    w.cascade_id = augmented.cascade_id;
    w.index = i;
    w.prior_nodes = subsequences[i - 1].nodes;
    w.current_nodes = subsequences[i].nodes;
  }
  for (const auto& e : augmented.edges) {
    auto a = owner.find(e.src), b = owner.find(e.dst);
    if (a == owner.end() || b == owner.end()) continue;
    const std::size_t lo = std::min(a->second, b->second), hi = std::max(a->second, b->second);
    if (hi - lo > 1) continue;
    if (lo == hi) {
      if (lo >= 1) out[lo - 1].edges.push_back(e);
      if (lo + 1 < subsequences.size()) out[lo].edges.push_back(e);
    } else {
      out[hi - 1].edges.push_back(e);
    }
  }
  return out;
}

// A_{v2u}.
inline std::uint32_t compute_a_v2u(const HistoricalGraph& g, NodeId v, NodeId u) {
  return g.reshare_count(v, u);
}

}  // namespace motifcascade
