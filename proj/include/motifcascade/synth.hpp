#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "motifcascade/cascade.hpp"
#include "motifcascade/centrality.hpp"
#include "motifcascade/error.hpp"
#include "motifcascade/graph.hpp"

namespace motifcascade {

enum class TransmissionKind { rayleigh, exponential };

struct SynthConfig {
  std::size_t n_nodes = 2000;
  std::size_t attachment = 3;          // edges added per new node
  double reciprocity = 0.3;            // chance of the follower->followee edge too
  std::size_t n_cascades = 200;
  std::size_t min_cascade_size = 300;
  std::size_t max_cascade_size = 0;    // 0: 2 * min_cascade_size
  std::size_t n_history_cascades = 0;  // 0: same as n_cascades
  std::size_t history_cascade_size = 50;
  double true_lambda = 1.0;
  double true_beta = 50.0;
  double exposure_boost = 10.0;
  TransmissionKind transmission = TransmissionKind::rayleigh;
  CentralityKind planted_centrality = CentralityKind::degree;
  std::size_t resample_budget = 20;    // attempts per requested cascade
  std::uint64_t seed = 1;

  std::size_t cascade_cap() const { return max_cascade_size ? max_cascade_size : 2 * min_cascade_size; }

  void validate() const {
    if (n_nodes < attachment + 2) throw ConfigError("synth: n_nodes too small for the attachment parameter");
    if (attachment < 1) throw ConfigError("synth: attachment must be at least 1");
    if (min_cascade_size < 2) throw ConfigError("synth: min_cascade_size must be at least 2");
    if (cascade_cap() < min_cascade_size) throw ConfigError("synth: max_cascade_size below min_cascade_size");
    if (true_lambda < 0.0 || true_beta < 0.0 || exposure_boost <= 0.0)
      throw ConfigError("synth: rates must be non-negative and exposure_boost positive");
    if (reciprocity < 0.0 || reciprocity > 1.0) throw ConfigError("synth: reciprocity must lie in [0, 1]");
  }
};

inline void from_json(const nlohmann::json& j, SynthConfig& c) {
  c.n_nodes = j.value("n_nodes", c.n_nodes);
  c.attachment = j.value("attachment", c.attachment);
  c.reciprocity = j.value("reciprocity", c.reciprocity);
  c.n_cascades = j.value("n_cascades", c.n_cascades);
  c.min_cascade_size = j.value("min_cascade_size", c.min_cascade_size);
  c.max_cascade_size = j.value("max_cascade_size", c.max_cascade_size);
  c.n_history_cascades = j.value("n_history_cascades", c.n_history_cascades);
  c.history_cascade_size = j.value("history_cascade_size", c.history_cascade_size);
  c.true_lambda = j.value("true_lambda", c.true_lambda);
  c.true_beta = j.value("true_beta", c.true_beta);
  c.exposure_boost = j.value("exposure_boost", c.exposure_boost);
  const auto t = j.value("transmission", std::string("rayleigh"));
  if (t != "rayleigh" && t != "exponential") throw ConfigError("synth: unknown transmission '" + t + "'");
  c.transmission = t == "rayleigh" ? TransmissionKind::rayleigh : TransmissionKind::exponential;
  c.planted_centrality = parse_centrality_kind(j.value("planted_centrality", std::string("degree")));
  c.resample_budget = j.value("resample_budget", c.resample_budget);
  c.seed = j.value("seed", c.seed);
}

inline nlohmann::json to_json_value(const SynthConfig& c) {
  return {{"n_nodes", c.n_nodes},
          {"attachment", c.attachment},
          {"reciprocity", c.reciprocity},
          {"n_cascades", c.n_cascades},
          {"min_cascade_size", c.min_cascade_size},
          {"max_cascade_size", c.max_cascade_size},
          {"n_history_cascades", c.n_history_cascades},
          {"history_cascade_size", c.history_cascade_size},
          {"true_lambda", c.true_lambda},
          {"true_beta", c.true_beta},
          {"exposure_boost", c.exposure_boost},
          {"transmission", c.transmission == TransmissionKind::rayleigh ? "rayleigh" : "exponential"},
          {"planted_centrality", std::string(to_string(c.planted_centrality))},
          {"resample_budget", c.resample_budget},
          {"seed", c.seed}};
}

// Directed preferential attachment: each new node follows `attachment`
// existing nodes picked proportionally to degree (edge followee -> follower),
// and with probability `reciprocity` is followed back.
inline std::vector<NodePair> scale_free_edges(const SynthConfig& cfg, std::mt19937_64& rng) {
  std::set<NodePair> edges;
  std::vector<std::uint32_t> endpoints;  // one entry per incident edge end
  const std::uint32_t core = static_cast<std::uint32_t>(cfg.attachment + 1);
  for (std::uint32_t a = 0; a < core; ++a)
    for (std::uint32_t b = 0; b < core; ++b)
      if (a != b) {
        edges.insert({node_id(a), node_id(b)});
        endpoints.push_back(a);
        endpoints.push_back(b);
      }
  std::bernoulli_distribution reciprocate(cfg.reciprocity);
  for (std::uint32_t u = core; u < cfg.n_nodes; ++u) {
    std::set<std::uint32_t> targets;
    while (targets.size() < cfg.attachment) {
      std::uniform_int_distribution<std::size_t> pick(0, endpoints.size() - 1);
      targets.insert(endpoints[pick(rng)]);
    }
    for (auto t : targets) {
      edges.insert({node_id(t), node_id(u)});
      endpoints.push_back(t);
      endpoints.push_back(u);
      if (reciprocate(rng)) {
        edges.insert({node_id(u), node_id(t)});
        endpoints.push_back(u);
        endpoints.push_back(t);
      }
    }
  }
  return {edges.begin(), edges.end()};
}

// Continuous-time race: every activation offers each inactive historical
// out-neighbour an infection time; the earliest offer wins and names the
// parent. The base hazard of j -> i is that of a Rayleigh (or exponential)
// variable with rate x_i x_j lambda. Once i also has an active in-neighbour m
// that j points to (the j -> m -> i, j -> i motif) the hazard from then on is
// multiplied by exposure_boost * (1 + true_beta * sum x_m). Each offer keeps an
// Exp(1) threshold on its cumulative hazard, so multiplier changes re-time it
// exactly.
inline std::vector<Activation> simulate_cascade(const HistoricalGraph& g, const CentralityVector& x,
                                                NodeId seed, const SynthConfig& cfg, std::size_t cap,
                                                std::mt19937_64& rng) {
  struct Pending {
    double start;      // t_j
    double rate;       // base rate
    double threshold;  // Exp(1) draw
    double spent = 0.0;
    double since = 0.0;  // time the current multiplier took effect
    double co_mass = 0.0;
    bool co_exposed = false;
    std::uint32_t version = 0;
  };
  struct Offer {
    double time;
    NodeId target;
    NodeId source;
    std::uint32_t version;
    bool operator>(const Offer& o) const {
      if (time != o.time) return time > o.time;
      if (target != o.target) return index_of(target) > index_of(o.target);
      return index_of(source) > index_of(o.source);
    }
  };
  const bool rayleigh = cfg.transmission == TransmissionKind::rayleigh;
  std::vector<char> active(g.node_count(), 0);
  std::unordered_map<NodePair, Pending, NodePairHash> pending;
  std::priority_queue<Offer, std::vector<Offer>, std::greater<>> offers;
  std::vector<Activation> out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto multiplier = [&](const Pending& p) {
    return p.co_exposed ? cfg.exposure_boost * (1.0 + cfg.true_beta * p.co_mass) : 1.0;
  };
  // Cumulative base hazard between t_j and t.
  auto base_hazard = [&](const Pending& p, double t) {
    const double d = t - p.start;
    return rayleigh ? 0.5 * p.rate * d * d : p.rate * d;
  };
  auto schedule = [&](NodePair key, Pending& p) {
    const double left = (p.threshold - p.spent) / multiplier(p);
    double t;
    if (rayleigh) {
      const double d0 = p.since - p.start;
      t = p.start + std::sqrt(d0 * d0 + 2.0 * left / p.rate);
    } else {
      t = p.since + left / p.rate;
    }
    offers.push({t, key.dst, key.src, ++p.version});
  };
  auto boost = [&](NodePair key, double now, double mass) {
    auto it = pending.find(key);
    if (it == pending.end()) return;
    Pending& p = it->second;
    p.spent += multiplier(p) * (base_hazard(p, now) - base_hazard(p, p.since));
    p.since = now;
    p.co_exposed = true;
    p.co_mass += mass;
    schedule(key, p);
  };

  auto activate = [&](NodeId v, std::optional<NodeId> parent, double t) {
    active[index_of(v)] = 1;
    out.push_back({v, parent, t});
    // v as a co-exposer: j -> v -> i with j -> i pending.
    for (NodeId i : g.out_neighbors(v)) {
      if (active[index_of(i)]) continue;
      for (NodeId j : g.in_neighbors(i))
        if (j != v && active[index_of(j)] && g.has_edge(j, v)) boost({j, i}, t, x[v]);
    }
    // v as a sender.
    for (NodeId i : g.out_neighbors(v)) {
      if (active[index_of(i)]) continue;
      Pending p;
      p.start = p.since = t;
      p.rate = cfg.true_lambda * x[v] * x[i];
      if (!(p.rate > 0.0)) continue;
      double u = unit(rng);
      while (u <= 0.0) u = unit(rng);
      p.threshold = -std::log(u);
      for (NodeId m : g.in_neighbors(i))
        if (m != v && active[index_of(m)] && g.has_edge(v, m)) {
          p.co_exposed = true;
          p.co_mass += x[m];
        }
      auto [it, inserted] = pending.emplace(NodePair{v, i}, p);
      schedule(it->first, it->second);
    }
  };

  activate(seed, std::nullopt, 0.0);
  while (out.size() < cap && !offers.empty()) {
    const Offer o = offers.top();
    offers.pop();
    if (active[index_of(o.target)]) continue;
    if (pending.at({o.source, o.target}).version != o.version) continue;
    activate(o.target, o.source, o.time);
  }
  return out;
}

struct SyntheticData {
  NodeDictionary dict;
  std::vector<EdgeRecord> records;  // what the edge file holds
  HistoricalGraph graph;
  std::vector<Cascade> cascades;
  CentralityVector planted;         // normalized attribute driving the rates
};

inline SyntheticData generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  SyntheticData data;
  for (std::size_t i = 0; i < cfg.n_nodes; ++i) data.dict.intern("u" + std::to_string(i));
  const auto edges = scale_free_edges(cfg, rng);
  HistoricalGraph topology = build_historical_graph(
      [&] {
        std::vector<EdgeRecord> r;
        for (const auto& e : edges) r.push_back({e.src, e.dst, std::nullopt, std::nullopt});
        return r;
      }(),
      cfg.n_nodes);
  data.planted = normalize_centrality(compute_centrality(topology, cfg.planted_centrality));
  std::uniform_int_distribution<std::uint32_t> pick_seed(0, static_cast<std::uint32_t>(cfg.n_nodes - 1));

  // Historical reshares give A_{v2u} and A_v.
  std::map<NodePair, std::vector<std::string>> reshares;
  const std::size_t n_history = cfg.n_history_cascades ? cfg.n_history_cascades : cfg.n_cascades;
  for (std::size_t h = 0; h < n_history; ++h) {
    const std::string id = "h" + std::to_string(h);
    for (const auto& a : simulate_cascade(topology, data.planted, node_id(pick_seed(rng)), cfg,
                                          cfg.history_cascade_size, rng))
      if (a.parent) reshares[{*a.parent, a.node}].push_back(id);
  }
  for (const auto& e : edges) {
    auto it = reshares.find(e);
    if (it == reshares.end()) {
      data.records.push_back({e.src, e.dst, std::nullopt, std::nullopt});
      continue;
    }
    for (const auto& id : it->second) data.records.push_back({e.src, e.dst, id, std::nullopt});
  }
  data.graph = build_historical_graph(data.records, cfg.n_nodes);

  const std::size_t budget = cfg.resample_budget * std::max<std::size_t>(cfg.n_cascades, 1);
  std::size_t attempts = 0, largest = 0;
  while (data.cascades.size() < cfg.n_cascades) {
    if (attempts++ >= budget)
      throw GeneratorStarved("synth: produced " + std::to_string(data.cascades.size()) + " of " +
                             std::to_string(cfg.n_cascades) + " cascades in " + std::to_string(budget) +
                             " attempts; largest rejected size " + std::to_string(largest) + " < " +
                             std::to_string(cfg.min_cascade_size));
    auto acts = simulate_cascade(topology, data.planted, node_id(pick_seed(rng)), cfg, cfg.cascade_cap(), rng);
    if (acts.size() < cfg.min_cascade_size) {
      largest = std::max(largest, acts.size());
      continue;
    }
    data.cascades.push_back(make_cascade("c" + std::to_string(data.cascades.size()), std::move(acts)));
  }
  return data;
}

}  // namespace motifcascade
