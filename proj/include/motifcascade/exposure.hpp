#pragma once

#include <algorithm>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "motifcascade/cascade.hpp"
#include "motifcascade/error.hpp"
#include "motifcascade/motif.hpp"
#include "motifcascade/temporal.hpp"

namespace motifcascade {

inline constexpr double kDefaultGateThreshold = 1.0;

struct GateCandidate {
  NodeId node;
  double delta;  // 1 / (t_v - t_w), normalized cascade time
};

// AND gate: order candidates by (delta, NodeId) ascending and drop from the
// front while the product of the remaining deltas is <= th. Exhausting the
// list yields the empty set.
inline std::vector<GateCandidate> and_gate(std::vector<GateCandidate> candidates, double th) {
  if (!(th > 0.0)) throw DomainError("gate threshold must be positive");
  std::sort(candidates.begin(), candidates.end(), [](const GateCandidate& a, const GateCandidate& b) {
    if (a.delta != b.delta) return a.delta < b.delta;
    return index_of(a.node) < index_of(b.node);
  });
  std::size_t first = 0;
  while (first < candidates.size()) {
    double prod = 1.0;
    for (std::size_t i = first; i < candidates.size(); ++i) prod *= candidates[i].delta;
    if (prod > th) break;
    ++first;
  }
  return {candidates.begin() + static_cast<std::ptrdiff_t>(first), candidates.end()};
}

// zeta_{v,C} together with the reciprocal gaps of its members.
struct ExposureSet {
  NodeId target{};
  std::string cascade_id;
  std::vector<NodeId> members;          // ascending
  std::map<NodeId, double> delta;       // member -> 1 / (t_v - t_w)
  bool parent_outside_window = false;

  bool empty() const noexcept { return members.empty(); }
};

using ExposureMap = std::unordered_map<NodeId, ExposureSet>;

// Parent-anchored candidates from motif instances of v, then the AND gate.
inline ExposureSet extract_exposure_nodes(const TemporalWindow& window,
                                          std::span<const MotifInstance> instances,
                                          const Cascade& cascade, NodeId v, NodeId parent,
                                          const PatternSet& patterns, double th) {
  ExposureSet out;
  out.target = v;
  out.cascade_id = cascade.id();
  const auto& prior = window.prior_nodes;
  const auto& current = window.current_nodes;
  const bool parent_present = std::find(prior.begin(), prior.end(), parent) != prior.end() ||
                              std::find(current.begin(), current.end(), parent) != current.end();
  if (!parent_present) {
    out.parent_outside_window = true;
    return out;
  }
  if (!(th > 0.0)) throw DomainError("gate threshold must be positive");
  const std::unordered_set<NodeId> prior_set(prior.begin(), prior.end());
  const double tv = cascade.normalized_time_of(v);
  std::map<NodeId, double> candidates;
  for (const auto& m : instances) {
    if (!patterns.contains(m.code)) continue;
    const auto& vs = m.vertices;
    if (std::find(vs.begin(), vs.end(), v) == vs.end()) continue;
    if (std::find(vs.begin(), vs.end(), parent) == vs.end()) continue;
    for (NodeId w : vs) {
      if (w == v || w == parent || !prior_set.count(w)) continue;
      const double tw = cascade.normalized_time_of(w);
      if (tw < tv) candidates[w] = 1.0 / (tv - tw);
    }
  }
  std::vector<GateCandidate> list;
  list.reserve(candidates.size());
  for (const auto& [w, d] : candidates) list.push_back({w, d});
  for (const auto& c : and_gate(std::move(list), th)) {
    out.members.push_back(c.node);
    out.delta.emplace(c.node, c.delta);
  }
  std::sort(out.members.begin(), out.members.end());
  return out;
}

struct ExposureStats {
  std::size_t targets = 0;
  std::size_t parent_outside_window = 0;
  std::size_t nonempty = 0;
};

// Exposure sets for every non-root node of the window's current subsequence.
inline std::vector<ExposureSet> compute_window_exposures(const TemporalWindow& window,
                                                         const Cascade& cascade,
                                                         const PatternSet& patterns, double th) {
  std::vector<MotifInstance> instances;
  WindowGraph g(window);
  for_each_size3(g, [&](const MotifInstance& m) {
    if (patterns.contains(m.code)) instances.push_back(m);
  });
  std::vector<ExposureSet> out;
  for (NodeId v : window.current_nodes) {
    auto parent = cascade.parent_of(v);
    if (!parent) continue;
    out.push_back(extract_exposure_nodes(window, instances, cascade, v, *parent, patterns, th));
  }
  return out;
}

// Exposure sets over all windows of a cascade. Nodes of the first subsequence
// and of the dropped tail get none.
inline ExposureMap compute_cascade_exposures(const Cascade& cascade, const HistoricalGraph& hist,
                                             std::size_t window_size, const PatternSet& patterns,
                                             double th, ExposureStats* stats = nullptr) {
  const auto augmented = augment_cascade(cascade, hist);
  const auto subs = partition_cascade(cascade, window_size);
  ExposureMap out;
  for (const auto& w : temporal_windows(subs, augmented)) {
    for (auto& e : compute_window_exposures(w, cascade, patterns, th)) {
      if (stats) {
        ++stats->targets;
        if (e.parent_outside_window) ++stats->parent_outside_window;
        if (!e.empty()) ++stats->nonempty;
      }
      out.emplace(e.target, std::move(e));
    }
  }
  return out;
}

// Audit dump: `cascade_id \t v \t member \t delta`, targets in activation order.
inline void write_exposure_dump(std::ostream& out, const Cascade& cascade, const ExposureMap& exposures,
                                const NodeDictionary& dict) {
  for (const auto& a : cascade.activations()) {
    auto it = exposures.find(a.node);
    if (it == exposures.end()) continue;
    for (NodeId m : it->second.members)
      out << cascade.id() << '\t' << dict.label(a.node) << '\t' << dict.label(m) << '\t'
          << format_double(it->second.delta.at(m)) << '\n';
  }
}

}  // namespace motifcascade
