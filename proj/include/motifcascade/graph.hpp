#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "motifcascade/error.hpp"
#include "motifcascade/text.hpp"

namespace motifcascade {

// Dense zero-based node identifier.
enum class NodeId : std::uint32_t {};

constexpr std::uint32_t index_of(NodeId id) noexcept {
  return static_cast<std::uint32_t>(id);
}
constexpr NodeId node_id(std::uint32_t index) noexcept {
  return static_cast<NodeId>(index);
}

struct NodePair {
  NodeId src;
  NodeId dst;

  friend auto operator<=>(const NodePair&, const NodePair&) = default;
};

struct NodePairHash {
  std::size_t operator()(const NodePair& p) const noexcept {
    return std::hash<std::uint64_t>{}(
        (std::uint64_t{index_of(p.src)} << 32) | index_of(p.dst));
  }
};

// Bijective raw-label <-> NodeId mapping, grown during ingestion.
class NodeDictionary {
 public:
  NodeId intern(const std::string& label) {
    auto [it, inserted] =
        ids_.try_emplace(label, node_id(static_cast<std::uint32_t>(labels_.size())));
    if (inserted) labels_.push_back(label);
    return it->second;
  }

  std::optional<NodeId> find(const std::string& label) const {
    auto it = ids_.find(label);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  NodeId at(const std::string& label) const {
    auto id = find(label);
    if (!id) throw DataError("unknown node label '" + label + "'");
    return *id;
  }

  const std::string& label(NodeId id) const { return labels_.at(index_of(id)); }
  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  std::unordered_map<std::string, NodeId> ids_;
  std::vector<std::string> labels_;
};

// One line of the historical edge file.
struct EdgeRecord {
  NodeId src;
  NodeId dst;
  std::optional<std::string> cascade_id;
  std::optional<double> timestamp;
};

// Directed graph of prior diffusion / follow links. Immutable once built.
class HistoricalGraph {
 public:
  HistoricalGraph() = default;

  std::size_t node_count() const noexcept { return out_offsets_.empty() ? 0 : out_offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return out_targets_.size(); }

  std::span<const NodeId> out_neighbors(NodeId v) const {
    auto i = index_of(v);
    return {out_targets_.data() + out_offsets_[i], out_offsets_[i + 1] - out_offsets_[i]};
  }
  std::span<const NodeId> in_neighbors(NodeId v) const {
    auto i = index_of(v);
    return {in_sources_.data() + in_offsets_[i], in_offsets_[i + 1] - in_offsets_[i]};
  }

  bool has_edge(NodeId src, NodeId dst) const {
    if (index_of(src) >= node_count()) return false;
    auto nbrs = out_neighbors(src);
    return std::binary_search(nbrs.begin(), nbrs.end(), dst);
  }

  // A_{v2u}: how many times dst reshared a message from src.
  std::uint32_t reshare_count(NodeId src, NodeId dst) const {
    auto it = reshares_.find({src, dst});
    return it == reshares_.end() ? 0 : it->second;
  }

  // A_v: number of distinct historical cascades the node took part in.
  std::uint32_t cascade_count(NodeId v) const {
    return index_of(v) < cascade_counts_.size() ? cascade_counts_[index_of(v)] : 0;
  }

  // Sorted (src, dst) edge list.
  std::vector<NodePair> edges() const {
    std::vector<NodePair> out;
    out.reserve(edge_count());
    for (std::uint32_t i = 0; i < node_count(); ++i)
      for (NodeId d : out_neighbors(node_id(i))) out.push_back({node_id(i), d});
    return out;
  }

  const std::unordered_map<NodePair, std::uint32_t, NodePairHash>& reshare_counts() const noexcept {
    return reshares_;
  }

  std::uint64_t content_hash() const {
    Fnv1a h;
    h.add(static_cast<std::uint64_t>(node_count()));
    for (const auto& e : edges()) {
      h.add(index_of(e.src));
      h.add(index_of(e.dst));
    }
    return h.value();
  }

 private:
  friend class HistoricalGraphBuilder;

  std::vector<std::size_t> out_offsets_;
  std::vector<NodeId> out_targets_;
  std::vector<std::size_t> in_offsets_;
  std::vector<NodeId> in_sources_;
  std::unordered_map<NodePair, std::uint32_t, NodePairHash> reshares_;
  std::vector<std::uint32_t> cascade_counts_;
};

class HistoricalGraphBuilder {
 public:
  explicit HistoricalGraphBuilder(std::size_t node_count = 0) : node_count_(node_count) {}

  // Returns false (and counts it) for self-loops.
  bool add(const EdgeRecord& r) {
    if (r.src == r.dst) {
      ++skipped_self_loops_;
      return false;
    }
    node_count_ = std::max<std::size_t>(node_count_, std::max(index_of(r.src), index_of(r.dst)) + 1);
    edges_.insert({r.src, r.dst});
    ++reshares_[{r.src, r.dst}];
    if (r.cascade_id) {
      participation_.insert({index_of(r.src), *r.cascade_id});
      participation_.insert({index_of(r.dst), *r.cascade_id});
    }
    return true;
  }

  void reserve_nodes(std::size_t n) { node_count_ = std::max(node_count_, n); }
  std::size_t skipped_self_loops() const noexcept { return skipped_self_loops_; }

  HistoricalGraph build() const {
    HistoricalGraph g;
    const std::size_t n = node_count_;
    g.out_offsets_.assign(n + 1, 0);
    g.in_offsets_.assign(n + 1, 0);
    for (const auto& e : edges_) {
      ++g.out_offsets_[index_of(e.src) + 1];
      ++g.in_offsets_[index_of(e.dst) + 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
      g.out_offsets_[i + 1] += g.out_offsets_[i];
      g.in_offsets_[i + 1] += g.in_offsets_[i];
    }
    g.out_targets_.resize(edges_.size());
    g.in_sources_.resize(edges_.size());
    std::vector<std::size_t> out_fill(g.out_offsets_.begin(), g.out_offsets_.end() - 1);
    std::vector<std::size_t> in_fill(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
    // edges_ is ordered by (src, dst), so out lists come out sorted; in lists by src.
    for (const auto& e : edges_) {
      g.out_targets_[out_fill[index_of(e.src)]++] = e.dst;
      g.in_sources_[in_fill[index_of(e.dst)]++] = e.src;
    }
    g.reshares_.insert(reshares_.begin(), reshares_.end());
    g.cascade_counts_.assign(n, 0);
    for (const auto& [node, cascade] : participation_) ++g.cascade_counts_[node];
    return g;
  }

 private:
  std::size_t node_count_;
  std::set<NodePair> edges_;
  std::map<NodePair, std::uint32_t> reshares_;
  std::set<std::pair<std::uint32_t, std::string>> participation_;
  std::size_t skipped_self_loops_ = 0;
};

struct GraphIngestStats {
  std::size_t records = 0;
  std::size_t skipped_self_loops = 0;
};

inline HistoricalGraph build_historical_graph(std::span<const EdgeRecord> records,
                                              std::size_t node_count = 0,
                                              GraphIngestStats* stats = nullptr) {
  HistoricalGraphBuilder b(node_count);
  for (const auto& r : records) b.add(r);
  if (stats) {
    stats->records = records.size();
    stats->skipped_self_loops = b.skipped_self_loops();
  }
  return b.build();
}

// Parses `src \t dst [\t cascade_id [\t timestamp]]`. Blank lines and lines
// starting with '#' are ignored. An empty or "-" cascade_id means absent.
inline std::vector<EdgeRecord> read_edge_records(std::istream& in, NodeDictionary& dict) {
  std::vector<EdgeRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cols = split_tabs(line);
    if (cols.size() < 2 || cols.size() > 4)
      throw IngestionError(lineno, "expected 2-4 tab-separated columns, got " +
                                       std::to_string(cols.size()));
    if (cols[0].empty() || cols[1].empty()) throw IngestionError(lineno, "empty node label");
    EdgeRecord r{dict.intern(cols[0]), dict.intern(cols[1]), std::nullopt, std::nullopt};
    if (cols.size() >= 3 && !cols[2].empty() && cols[2] != "-") r.cascade_id = cols[2];
    if (cols.size() == 4 && !cols[3].empty() && cols[3] != "-") {
      auto t = parse_double(cols[3]);
      if (!t) throw IngestionError(lineno, "bad timestamp '" + cols[3] + "'");
      r.timestamp = *t;
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline void write_edge_records(std::ostream& out, std::span<const EdgeRecord> records,
                               const NodeDictionary& dict) {
  for (const auto& r : records) {
    out << dict.label(r.src) << '\t' << dict.label(r.dst);
    if (r.cascade_id || r.timestamp) {
      out << '\t' << (r.cascade_id ? *r.cascade_id : std::string("-"));
      if (r.timestamp) out << '\t' << format_double(*r.timestamp);
    }
    out << '\n';
  }
}

}  // namespace motifcascade
