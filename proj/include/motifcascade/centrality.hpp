#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <istream>
#include <ostream>
#include <stack>
#include <string>
#include <string_view>
#include <vector>

#include "motifcascade/error.hpp"
#include "motifcascade/graph.hpp"

namespace motifcascade {

enum class CentralityKind { degree, betweenness, pagerank };

inline std::string_view to_string(CentralityKind k) {
  switch (k) {
    case CentralityKind::degree: return "degree";
    case CentralityKind::betweenness: return "betweenness";
    case CentralityKind::pagerank: return "pagerank";
  }
  return "degree";
}

inline CentralityKind parse_centrality_kind(std::string_view s) {
  if (s == "degree") return CentralityKind::degree;
  if (s == "betweenness") return CentralityKind::betweenness;
  if (s == "pagerank") return CentralityKind::pagerank;
  throw ConfigError("unknown centrality kind '" + std::string(s) + "'");
}

// Per-node attribute x, indexed by NodeId.
struct CentralityVector {
  CentralityKind kind = CentralityKind::degree;
  std::vector<double> values;

  double operator[](NodeId v) const { return values.at(index_of(v)); }
  std::size_t size() const noexcept { return values.size(); }
};

inline constexpr double kPageRankDamping = 0.85;
inline constexpr double kPageRankTolerance = 1e-9;
inline constexpr double kCentralityFloor = 1e-6;

namespace detail {

inline std::vector<double> degree_centrality(const HistoricalGraph& g) {
  std::vector<double> out(g.node_count());
  for (std::uint32_t i = 0; i < g.node_count(); ++i)
    out[i] = static_cast<double>(g.out_neighbors(node_id(i)).size() +
                                 g.in_neighbors(node_id(i)).size());
  return out;
}

// Brandes accumulation over unweighted directed shortest paths.
inline std::vector<double> betweenness_centrality(const HistoricalGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<double> cb(n, 0.0);
  std::vector<std::vector<std::uint32_t>> preds(n);
  std::vector<double> sigma(n), delta(n);
  std::vector<long> dist(n);
  std::vector<std::uint32_t> order;
  order.reserve(n);
  std::deque<std::uint32_t> queue;
  for (std::uint32_t s = 0; s < n; ++s) {
    for (auto& p : preds) p.clear();
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1L);
    order.clear();
    sigma[s] = 1.0;
    dist[s] = 0;
    queue.push_back(s);
    while (!queue.empty()) {
      auto v = queue.front();
      queue.pop_front();
      order.push_back(v);
      for (NodeId wid : g.out_neighbors(node_id(v))) {
        auto w = index_of(wid);
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      auto w = *it;
      for (auto v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      if (w != s) cb[w] += delta[w];
    }
  }
  return cb;
}

// Power iteration; dangling mass is spread uniformly.
inline std::vector<double> pagerank(const HistoricalGraph& g, double damping, double tol) {
  const std::size_t n = g.node_count();
  std::vector<double> rank(n, 1.0 / static_cast<double>(n)), next(n);
  for (int iter = 0; iter < 10000; ++iter) {
    double dangling = 0.0;
    for (std::uint32_t i = 0; i < n; ++i)
      if (g.out_neighbors(node_id(i)).empty()) dangling += rank[i];
    const double base = (1.0 - damping + damping * dangling) / static_cast<double>(n);
    std::fill(next.begin(), next.end(), base);
    for (std::uint32_t i = 0; i < n; ++i) {
      auto nbrs = g.out_neighbors(node_id(i));
      if (nbrs.empty()) continue;
      const double share = damping * rank[i] / static_cast<double>(nbrs.size());
      for (NodeId d : nbrs) next[index_of(d)] += share;
    }
    double diff = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diff += std::abs(next[i] - rank[i]);
      total += next[i];
    }
    for (auto& v : next) v /= total;
    rank.swap(next);
    if (diff < tol * 1e-3) break;
  }
  return rank;
}

}  // namespace detail

inline CentralityVector compute_centrality(const HistoricalGraph& g, CentralityKind kind) {
  if (g.node_count() == 0) throw DataError("centrality of an empty graph");
  CentralityVector cv{kind, {}};
  switch (kind) {
    case CentralityKind::degree: cv.values = detail::degree_centrality(g); break;
    case CentralityKind::betweenness: cv.values = detail::betweenness_centrality(g); break;
    case CentralityKind::pagerank:
      cv.values = detail::pagerank(g, kPageRankDamping, kPageRankTolerance);
      break;
  }
  return cv;
}

// Min-max rescale into [floor, 1]; a constant vector maps to all ones.
inline CentralityVector normalize_centrality(const CentralityVector& raw,
                                             double floor = kCentralityFloor) {
  CentralityVector out{raw.kind, raw.values};
  if (out.values.empty()) return out;
  auto [lo, hi] = std::minmax_element(out.values.begin(), out.values.end());
  const double min = *lo, span = *hi - *lo;
  for (auto& v : out.values)
    v = span > 0.0 ? floor + (1.0 - floor) * (v - min) / span : 1.0;
  return out;
}

// Cache format: header line `# <kind> <graph-hash>` then `label \t value`.
inline void write_centrality_cache(std::ostream& out, const CentralityVector& cv,
                                   const NodeDictionary& dict, std::uint64_t graph_hash) {
  out << "# " << to_string(cv.kind) << ' ' << hex64(graph_hash) << '\n';
  for (std::uint32_t i = 0; i < cv.size(); ++i)
    out << dict.label(node_id(i)) << '\t' << format_double(cv.values[i]) << '\n';
}

// Returns nullopt when the cache was built for a different graph or kind.
inline std::optional<CentralityVector> read_centrality_cache(std::istream& in,
                                                             const NodeDictionary& dict,
                                                             CentralityKind kind,
                                                             std::uint64_t graph_hash) {
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  const std::string expected = "# " + std::string(to_string(kind)) + ' ' + hex64(graph_hash);
  if (line != expected) return std::nullopt;
  CentralityVector cv{kind, std::vector<double>(dict.size(), 0.0)};
  std::vector<bool> seen(dict.size(), false);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cols = split_tabs(line);
    if (cols.size() != 2) throw IngestionError(lineno, "expected `node \\t value`");
    auto id = dict.find(cols[0]);
    auto v = parse_double(cols[1]);
    if (!id || !v) return std::nullopt;
    cv.values[index_of(*id)] = *v;
    seen[index_of(*id)] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) return std::nullopt;
  return cv;
}

}  // namespace motifcascade
