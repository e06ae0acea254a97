#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "motifcascade/cascade.hpp"
#include "motifcascade/centrality.hpp"
#include "motifcascade/error.hpp"
#include "motifcascade/survival.hpp"
#include "motifcascade/temporal.hpp"

namespace motifcascade {

enum class Method { infercut, infercut_ne, bernoulli, cc, random };

inline constexpr std::array<Method, 5> kAllMethods{Method::infercut, Method::infercut_ne, Method::bernoulli,
                                                   Method::cc, Method::random};

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::infercut: return "infercut";
    case Method::infercut_ne: return "infercut-ne";
    case Method::bernoulli: return "bernoulli";
    case Method::cc: return "cc";
    case Method::random: return "random";
  }
  return "infercut";
}

inline Method parse_method(std::string_view s) {
  for (auto m : kAllMethods)
    if (to_string(m) == s) return m;
  throw ConfigError("unknown method '" + std::string(s) + "'");
}

struct TimedNode {
  NodeId node;
  double time;  // normalized cascade time
};

// Parent attribution for the targets of subsequence `interval` given the
// graph of subsequence `interval - 1`.
struct InferenceTask {
  std::string cascade_id;
  std::size_t interval = 0;
  std::vector<TimedNode> prior;        // V^{tau'}
  std::vector<TypedEdge> prior_edges;  // E^{tau'}
  std::vector<TimedNode> targets;      // V^{tau''}
  double t_thresh = 1.0;
};

inline InferenceTask make_inference_task(const Cascade& c, const AugmentedCascadeGraph& augmented,
                                         std::span<const Subsequence> subs, std::size_t interval,
                                         double t_thresh) {
  if (interval < 1 || interval >= subs.size())
    throw ConfigError("interval " + std::to_string(interval) + " outside [1, " +
                      std::to_string(subs.size()) + ")");
  InferenceTask t;
  t.cascade_id = c.id();
  t.interval = interval;
  t.t_thresh = t_thresh;
  for (NodeId v : subs[interval - 1].nodes) t.prior.push_back({v, c.normalized_time_of(v)});
  for (NodeId v : subs[interval].nodes) t.targets.push_back({v, c.normalized_time_of(v)});
  t.prior_edges = subsequence_edges(subs[interval - 1], augmented);
  return t;
}

struct PredictedEdge {
  NodeId parent;
  NodeId child;
  double score;
};

struct CutEdgeSet {
  Method method = Method::infercut;
  std::vector<PredictedEdge> edges;  // at most one per target, in target order
  bool empty_prior_graph = false;
};

// How InferCut assembles its rates. `model` pairs the transmission rate with
// the candidate parent (alpha = lambda x_s x_v, eta = beta x_e); `literal`
// uses alpha = lambda x_v x_e and eta = beta x_s.
enum class AlphaConvention { model, literal };

struct InferenceModel {
  double lambda = 1.0;
  double beta = 1.0;
  const CentralityVector* x = nullptr;
  AlphaConvention convention = AlphaConvention::model;
};

namespace detail {

// Strict argmax on (score desc, s asc, e asc).
struct PairChoice {
  double score = -1.0;
  NodeId s{};
  NodeId e{};
  bool set = false;

  void offer(double sc, NodeId cand_s, NodeId cand_e) {
    if (!set || sc > score || (sc == score && (index_of(cand_s) < index_of(s) ||
                                                (cand_s == s && index_of(cand_e) < index_of(e))))) {
      score = sc;
      s = cand_s;
      e = cand_e;
      set = true;
    }
  }
};

inline const CentralityVector& attributes(const InferenceModel& m) {
  if (!m.x) throw ConfigError("inference model has no node attributes");
  return *m.x;
}

}  // namespace detail

inline double transmission_likelihood(double alpha, double gap) { return rayleigh(alpha, gap).density; }

inline CutEdgeSet infer_cut(const InferenceTask& task, const InferenceModel& model) {
  const auto& x = detail::attributes(model);
  CutEdgeSet out{Method::infercut, {}, task.prior_edges.empty()};
  if (out.empty_prior_graph) return out;
  std::unordered_map<NodeId, double> prior_time;
  for (const auto& p : task.prior) prior_time.emplace(p.node, p.time);
  for (const auto& v : task.targets) {
    detail::PairChoice best;
    for (const auto& edge : task.prior_edges) {
      const NodeId s = edge.src, e = edge.dst;
      const double ts = prior_time.at(s), te = prior_time.at(e);
      if (v.time - ts > task.t_thresh) continue;
      double alpha, eta;
      if (model.convention == AlphaConvention::model) {
        alpha = model.lambda * x[s] * x[v.node];
        eta = model.beta * x[e];
      } else {
        alpha = model.lambda * x[v.node] * x[e];
        eta = model.beta * x[s];
      }
      const double tl = transmission_likelihood(alpha, v.time - ts);
      const double el = exposure_value(eta, v.time, te);
      best.offer(el * tl, s, e);
    }
    if (best.set) out.edges.push_back({best.s, v.node, best.score});
  }
  return out;
}

inline CutEdgeSet infer_cut_no_exposure(const InferenceTask& task, const InferenceModel& model) {
  const auto& x = detail::attributes(model);
  CutEdgeSet out{Method::infercut_ne, {}, task.prior_edges.empty()};
  if (out.empty_prior_graph) return out;
  for (const auto& v : task.targets) {
    detail::PairChoice best;
    for (const auto& s : task.prior) {
      if (v.time - s.time > task.t_thresh) continue;
      const double alpha = model.lambda * x[s.node] * x[v.node];
      best.offer(transmission_likelihood(alpha, v.time - s.time), s.node, s.node);
    }
    if (best.set) out.edges.push_back({best.s, v.node, best.score});
  }
  return out;
}

// A_{s2v} / A_s, zero when s has no recorded cascades.
inline double bernoulli_score(const HistoricalGraph& hist, NodeId s, NodeId v) {
  const double a_s = hist.cascade_count(s);
  return a_s > 0.0 ? static_cast<double>(hist.reshare_count(s, v)) / a_s : 0.0;
}

inline CutEdgeSet bernoulli_baseline(const InferenceTask& task, const HistoricalGraph& hist) {
  CutEdgeSet out{Method::bernoulli, {}, task.prior_edges.empty()};
  for (const auto& v : task.targets) {
    detail::PairChoice best;
    for (const auto& s : task.prior) best.offer(bernoulli_score(hist, s.node, v.node), s.node, s.node);
    if (best.set) out.edges.push_back({best.s, v.node, best.score});
  }
  return out;
}

struct ContagionParams {
  double slope = 1.0;       // a
  double intercept = -2.0;  // b
};

inline double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// k_s: prior adopters u != s with u -> v historical that are historical
// neighbours of s in either direction.
inline std::size_t contagion_exposure_count(const InferenceTask& task, const HistoricalGraph& hist,
                                            NodeId s, NodeId v) {
  std::size_t k = 0;
  for (const auto& u : task.prior) {
    if (u.node == s || !hist.has_edge(u.node, v)) continue;
    if (hist.has_edge(u.node, s) || hist.has_edge(s, u.node)) ++k;
  }
  return k;
}

inline CutEdgeSet complex_contagion_baseline(const InferenceTask& task, const HistoricalGraph& hist,
                                             const ContagionParams& params = {}) {
  CutEdgeSet out{Method::cc, {}, task.prior_edges.empty()};
  for (const auto& v : task.targets) {
    detail::PairChoice best;
    for (const auto& s : task.prior) {
      const auto k = static_cast<double>(contagion_exposure_count(task, hist, s.node, v.node));
      best.offer(logistic(params.slope * k + params.intercept), s.node, s.node);
    }
    if (best.set) out.edges.push_back({best.s, v.node, best.score});
  }
  return out;
}

inline std::uint64_t task_seed(std::uint64_t global_seed, std::string_view cascade_id, std::size_t interval) {
  return Fnv1a().add(global_seed).add(cascade_id).add(static_cast<std::uint64_t>(interval)).value();
}

// Uniform choice among prior adopters within t_thresh of the target.
inline CutEdgeSet random_temporal_baseline(const InferenceTask& task, std::uint64_t seed) {
  CutEdgeSet out{Method::random, {}, task.prior_edges.empty()};
  std::mt19937_64 rng(seed);
  for (const auto& v : task.targets) {
    std::vector<NodeId> eligible;
    for (const auto& s : task.prior)
      if (v.time - s.time <= task.t_thresh) eligible.push_back(s.node);
    if (eligible.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
    out.edges.push_back({eligible[pick(rng)], v.node, 1.0 / static_cast<double>(eligible.size())});
  }
  return out;
}

struct MethodContext {
  const InferenceModel* model = nullptr;
  const HistoricalGraph* hist = nullptr;
  ContagionParams contagion;
  std::uint64_t seed = 0;
};

inline CutEdgeSet run_method(Method m, const InferenceTask& task, const MethodContext& ctx) {
  auto need_model = [&]() -> const InferenceModel& {
    if (!ctx.model) throw ConfigError(std::string(to_string(m)) + " needs a trained checkpoint");
    return *ctx.model;
  };
  auto need_hist = [&]() -> const HistoricalGraph& {
    if (!ctx.hist) throw ConfigError(std::string(to_string(m)) + " needs the historical graph");
    return *ctx.hist;
  };
  switch (m) {
    case Method::infercut: return infer_cut(task, need_model());
    case Method::infercut_ne: return infer_cut_no_exposure(task, need_model());
    case Method::bernoulli: return bernoulli_baseline(task, need_hist());
    case Method::cc: return complex_contagion_baseline(task, need_hist(), ctx.contagion);
    case Method::random: return random_temporal_baseline(task, task_seed(ctx.seed, task.cascade_id, task.interval));
  }
  return {};
}

struct Evaluation {
  double precision = 0.0;
  double recall = 0.0;
  std::size_t truth_edges = 0;      // |E_cut|
  std::size_t predicted_edges = 0;  // |E_hat| over covered targets
  std::size_t hits = 0;
  bool excluded = false;            // |E_cut| = 0
};

// Only targets whose true parent lies in V^{tau'} are scored.
inline Evaluation evaluate(const CutEdgeSet& predicted, const Cascade& truth, const InferenceTask& task) {
  std::unordered_set<NodeId> prior;
  for (const auto& p : task.prior) prior.insert(p.node);
  std::unordered_map<NodeId, NodeId> truth_parent;
  for (const auto& v : task.targets) {
    auto parent = truth.parent_of(v.node);
    if (parent && prior.count(*parent)) truth_parent.emplace(v.node, *parent);
  }
  Evaluation ev;
  ev.truth_edges = truth_parent.size();
  if (ev.truth_edges == 0) {
    ev.excluded = true;
    return ev;
  }
  for (const auto& e : predicted.edges) {
    auto it = truth_parent.find(e.child);
    if (it == truth_parent.end()) continue;
    ++ev.predicted_edges;
    if (it->second == e.parent) ++ev.hits;
  }
  ev.recall = static_cast<double>(ev.hits) / static_cast<double>(ev.truth_edges);
  ev.precision = ev.predicted_edges ? static_cast<double>(ev.hits) / static_cast<double>(ev.predicted_edges) : 0.0;
  return ev;
}

// Unweighted means over cascades for one (method, interval) cell.
struct MetricCell {
  double precision_sum = 0.0;
  double recall_sum = 0.0;
  std::size_t cascades = 0;
  std::size_t edges = 0;
  std::size_t excluded = 0;
  std::size_t skipped = 0;  // interval beyond Q-1

  void add(const Evaluation& ev) {
    if (ev.excluded) {
      ++excluded;
      return;
    }
    precision_sum += ev.precision;
    recall_sum += ev.recall;
    edges += ev.truth_edges;
    ++cascades;
  }
  double precision() const { return cascades ? precision_sum / static_cast<double>(cascades) : 0.0; }
  double recall() const { return cascades ? recall_sum / static_cast<double>(cascades) : 0.0; }
};

// Nearest-rank percentile of normalized (child - parent) gaps.
inline double parent_gap_percentile(std::span<const Cascade> corpus, double q) {
  std::vector<double> gaps;
  for (const auto& c : corpus)
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c[i].parent) gaps.push_back(c.normalized_time(i) - c.normalized_time_of(*c[i].parent));
  if (gaps.empty()) throw ConfigError("no parent gaps to derive t_thresh from");
  std::sort(gaps.begin(), gaps.end());
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(gaps.size())));
  rank = std::clamp<std::size_t>(rank, 1, gaps.size());
  return gaps[rank - 1];
}

}  // namespace motifcascade
