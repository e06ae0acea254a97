#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "motifcascade/error.hpp"
#include "motifcascade/graph.hpp"
#include "motifcascade/text.hpp"

namespace motifcascade {

// Tie-break offset added to the k-th member of a group of equal timestamps.
inline constexpr double kTieEpsilon = 1e-9;

struct Activation {
  NodeId node;
  std::optional<NodeId> parent;  // absent only for the root
  double time = 0.0;             // seconds
};

// One message's reshares, chronologically ordered. Construct via make_cascade.
class Cascade {
 public:
  const std::string& id() const noexcept { return id_; }
  const std::vector<Activation>& activations() const noexcept { return activations_; }
  std::size_t size() const noexcept { return activations_.size(); }
  const Activation& operator[](std::size_t pos) const { return activations_[pos]; }

  // Activation time rescaled so the cascade spans [0, 1].
  double normalized_time(std::size_t pos) const { return normalized_[pos]; }
  double normalized_time_of(NodeId v) const { return normalized_[position(v)]; }
  double time_of(NodeId v) const { return activations_[position(v)].time; }

  bool contains(NodeId v) const { return positions_.count(v) != 0; }
  std::size_t position(NodeId v) const {
    auto it = positions_.find(v);
    if (it == positions_.end())
      throw DataError("node " + std::to_string(index_of(v)) + " not in cascade " + id_);
    return it->second;
  }

  std::optional<NodeId> parent_of(NodeId v) const { return activations_[position(v)].parent; }

 private:
  friend Cascade make_cascade(std::string id, std::vector<Activation> activations);

  std::string id_;
  std::vector<Activation> activations_;
  std::vector<double> normalized_;
  std::unordered_map<NodeId, std::size_t> positions_;
};

// Sorts by (timestamp, NodeId), separates ties by k * kTieEpsilon and checks
// the structural invariants (one root, unique nodes, parents strictly earlier).
inline Cascade make_cascade(std::string id, std::vector<Activation> activations) {
  if (activations.empty()) throw DataError("cascade " + id + " is empty");
  std::sort(activations.begin(), activations.end(), [](const Activation& a, const Activation& b) {
    if (a.time != b.time) return a.time < b.time;
    return index_of(a.node) < index_of(b.node);
  });
  std::vector<double> raw(activations.size());
  for (std::size_t i = 0; i < activations.size(); ++i) raw[i] = activations[i].time;
  for (std::size_t i = 1, k = 0; i < activations.size(); ++i) {
    k = raw[i] == raw[i - 1] ? k + 1 : 0;
    activations[i].time = raw[i] + static_cast<double>(k) * kTieEpsilon;
    // epsilon is below one ulp for large epoch timestamps
    if (k > 0 && !(activations[i].time > activations[i - 1].time))
      activations[i].time = std::nextafter(activations[i - 1].time, INFINITY);
  }
  Cascade c;
  c.id_ = std::move(id);
  std::size_t roots = 0;
  for (std::size_t i = 0; i < activations.size(); ++i) {
    if (!c.positions_.emplace(activations[i].node, i).second)
      throw DataError("cascade " + c.id_ + ": node " +
                      std::to_string(index_of(activations[i].node)) + " activates twice");
    if (!activations[i].parent) ++roots;
    if (i > 0 && !(activations[i].time > activations[i - 1].time))
      throw DataError("cascade " + c.id_ + ": timestamps not strictly increasing after tie-break");
  }
  if (roots != 1)
    throw DataError("cascade " + c.id_ + ": expected exactly one root, found " +
                    std::to_string(roots));
  for (std::size_t i = 0; i < activations.size(); ++i) {
    const auto& a = activations[i];
    if (!a.parent) continue;
    auto it = c.positions_.find(*a.parent);
    if (it == c.positions_.end())
      throw DataError("cascade " + c.id_ + ": parent " + std::to_string(index_of(*a.parent)) +
                      " of node " + std::to_string(index_of(a.node)) + " is not a participant");
    if (it->second >= i)
      throw DataError("cascade " + c.id_ + ": parent of node " +
                      std::to_string(index_of(a.node)) + " activates after it");
  }
  const double t0 = activations.front().time;
  const double span = activations.back().time - t0;
  c.normalized_.resize(activations.size());
  for (std::size_t i = 0; i < activations.size(); ++i)
    c.normalized_[i] = span > 0.0 ? (activations[i].time - t0) / span : 0.0;
  c.activations_ = std::move(activations);
  return c;
}

// Reads `cascade_id \t node \t parent_or_dash \t timestamp_seconds`. Cascades
// are returned in order of first appearance.
inline std::vector<Cascade> read_cascades(std::istream& in, NodeDictionary& dict) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<Activation>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() != 4)
      throw IngestionError(lineno, "expected 4 tab-separated columns, got " +
                                       std::to_string(cols.size()));
    if (cols[0].empty() || cols[1].empty()) throw IngestionError(lineno, "empty field");
    auto t = parse_double(cols[3]);
    if (!t) throw IngestionError(lineno, "bad timestamp '" + cols[3] + "'");
    Activation a{dict.intern(cols[1]), std::nullopt, *t};
    if (cols[2] != "-" && !cols[2].empty()) a.parent = dict.intern(cols[2]);
    auto [it, inserted] = rows.try_emplace(cols[0]);
    if (inserted) order.push_back(cols[0]);
    it->second.push_back(a);
  }
  std::vector<Cascade> out;
  out.reserve(order.size());
  for (const auto& id : order) out.push_back(make_cascade(id, std::move(rows[id])));
  return out;
}

inline void write_cascades(std::ostream& out, const std::vector<Cascade>& cascades,
                           const NodeDictionary& dict) {
  for (const auto& c : cascades)
    for (const auto& a : c.activations())
      out << c.id() << '\t' << dict.label(a.node) << '\t'
          << (a.parent ? dict.label(*a.parent) : std::string("-")) << '\t'
          << format_double(a.time) << '\n';
}

}  // namespace motifcascade
