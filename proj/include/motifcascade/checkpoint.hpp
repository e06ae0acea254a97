#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "motifcascade/cascade.hpp"
#include "motifcascade/centrality.hpp"
#include "motifcascade/error.hpp"
#include "motifcascade/graph.hpp"
#include "motifcascade/survival.hpp"
#include "motifcascade/text.hpp"
#include "motifcascade/trainer.hpp"

namespace motifcascade {

// Hash of a training corpus together with the graph it was read against.
inline std::string corpus_hash(std::span<const Cascade> corpus, const HistoricalGraph& g) {
  Fnv1a h;
  h.add(g.content_hash());
  for (const auto& c : corpus) {
    h.add(std::string_view(c.id()));
    for (const auto& a : c.activations()) {
      h.add(static_cast<std::uint64_t>(index_of(a.node)));
      h.add(a.parent ? static_cast<std::uint64_t>(index_of(*a.parent)) : ~std::uint64_t{0});
      h.add(a.time);
    }
  }
  return hex64(h.value());
}

struct AlphaEntry {
  NodePair pair;
  double alpha;
};

struct EtaEntry {
  NodeId node;
  double eta;
};

// Everything inference needs, plus provenance. Only realized parent pairs
// are listed in alpha_entries; the remaining survival-only slots sit near the
// positivity floor and are not needed downstream.
struct Checkpoint {
  double lambda = 1.0;
  double beta = 1.0;
  ObjectiveWeights weights;
  CentralityKind centrality = CentralityKind::degree;
  std::vector<AlphaEntry> alpha_entries;  // ascending by pair
  std::vector<EtaEntry> eta_entries;      // ascending by node
  std::string corpus_hash;
  std::string input_hash;  // hash of corpus + training settings, for resume
  double t_thresh = 1.0;
  std::size_t window_size = 10;
  double threshold = 1.0;
  bool converged = false;
  std::size_t iterations = 0;
};

inline Checkpoint make_checkpoint(const Trainer& t, const TrainTrace& trace, const TrainConfig& cfg) {
  Checkpoint cp;
  cp.lambda = t.lambda();
  cp.beta = t.beta();
  cp.weights = cfg.weights;
  const auto& s = t.statistics();
  for (std::size_t p = 0; p < s.pairs.size(); ++p)
    if (s.hazard_count[p] > 0.0) cp.alpha_entries.push_back({s.pairs[p], t.alpha()[p]});
  for (std::size_t m = 0; m < s.exposure_nodes.size(); ++m) cp.eta_entries.push_back({s.exposure_nodes[m], t.eta()[m]});
  cp.converged = trace.converged;
  cp.iterations = trace.rows.empty() ? 0 : trace.rows.back().iter;
  return cp;
}

inline ModelParams to_model_params(const Checkpoint& cp) {
  ModelParams p;
  p.lambda = cp.lambda;
  p.beta = cp.beta;
  for (const auto& a : cp.alpha_entries) p.alpha.emplace(a.pair, a.alpha);
  for (const auto& e : cp.eta_entries) p.eta.emplace(e.node, e.eta);
  return p;
}

inline nlohmann::ordered_json checkpoint_to_json(const Checkpoint& cp, const NodeDictionary& dict) {
  nlohmann::ordered_json j;
  j["lambda"] = cp.lambda;
  j["beta"] = cp.beta;
  j["gamma_lambda"] = cp.weights.gamma_lambda;
  j["gamma_beta"] = cp.weights.gamma_beta;
  j["n"] = cp.weights.n;
  j["m"] = cp.weights.m;
  j["centrality_kind"] = std::string(to_string(cp.centrality));
  j["window_size"] = cp.window_size;
  j["threshold"] = cp.threshold;
  j["t_thresh"] = cp.t_thresh;
  j["converged"] = cp.converged;
  j["iterations"] = cp.iterations;
  j["corpus_hash"] = cp.corpus_hash;
  j["input_hash"] = cp.input_hash;
  auto& alpha = j["alpha_entries"] = nlohmann::ordered_json::array();
  for (const auto& a : cp.alpha_entries)
    alpha.push_back(nlohmann::ordered_json::array({dict.label(a.pair.src), dict.label(a.pair.dst), a.alpha}));
  auto& eta = j["eta_entries"] = nlohmann::ordered_json::array();
  for (const auto& e : cp.eta_entries) eta.push_back(nlohmann::ordered_json::array({dict.label(e.node), e.eta}));
  return j;
}

inline std::string checkpoint_text(const Checkpoint& cp, const NodeDictionary& dict) {
  return checkpoint_to_json(cp, dict).dump(1) + "\n";
}

// Labels must already be known to `dict`.
inline Checkpoint checkpoint_from_json(const nlohmann::json& j, const NodeDictionary& dict) {
  auto node = [&](const nlohmann::json& v) {
    const auto label = v.get<std::string>();
    auto id = dict.find(label);
    if (!id) throw DataError("checkpoint refers to unknown node '" + label + "'");
    return *id;
  };
  try {
    Checkpoint cp;
    cp.lambda = j.at("lambda").get<double>();
    cp.beta = j.at("beta").get<double>();
    cp.weights.gamma_lambda = j.at("gamma_lambda").get<double>();
    cp.weights.gamma_beta = j.at("gamma_beta").get<double>();
    cp.weights.n = j.at("n").get<double>();
    cp.weights.m = j.at("m").get<double>();
    cp.centrality = parse_centrality_kind(j.at("centrality_kind").get<std::string>());
    cp.window_size = j.value("window_size", cp.window_size);
    cp.threshold = j.value("threshold", cp.threshold);
    cp.t_thresh = j.value("t_thresh", cp.t_thresh);
    cp.converged = j.value("converged", false);
    cp.iterations = j.value("iterations", std::size_t{0});
    cp.corpus_hash = j.at("corpus_hash").get<std::string>();
    cp.input_hash = j.value("input_hash", std::string());
    for (const auto& a : j.at("alpha_entries")) cp.alpha_entries.push_back({{node(a.at(0)), node(a.at(1))}, a.at(2).get<double>()});
    for (const auto& e : j.at("eta_entries")) cp.eta_entries.push_back({node(e.at(0)), e.at(1).get<double>()});
    if (cp.lambda < 0.0 || cp.beta < 0.0) throw ConfigError("checkpoint: lambda and beta must be non-negative");
    return cp;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("checkpoint: ") + e.what());
  }
}

inline Checkpoint read_checkpoint(const std::filesystem::path& path, const NodeDictionary& dict) {
  auto text = read_file(path);
  if (!text) throw ConfigError("cannot read checkpoint " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(*text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("checkpoint " + path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j, dict);
}

}  // namespace motifcascade
