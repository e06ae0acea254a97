#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "motifcascade/cascade.hpp"
#include "motifcascade/centrality.hpp"
#include "motifcascade/error.hpp"
#include "motifcascade/exposure.hpp"
#include "motifcascade/parallel.hpp"

namespace motifcascade {

inline constexpr double kLogFloor = 1e-300;

inline double guarded_log(double v) { return std::log(std::max(v, kLogFloor)); }

struct RayleighValues {
  double density;   // f = alpha * gap * exp(-alpha * gap^2 / 2)
  double survival;  // S = exp(-alpha * gap^2 / 2)
  double hazard;    // h = alpha * gap
};

inline RayleighValues rayleigh(double alpha, double gap) {
  if (!(alpha >= 0.0) || !(gap >= 0.0))
    throw DomainError("rayleigh: alpha and gap must be non-negative");
  const double survival = std::exp(-0.5 * alpha * gap * gap);
  const double hazard = alpha * gap;
  return {hazard * survival, survival, hazard};
}

// E = eta * exp(-(t_target - t_exposer)), times normalized per cascade.
inline double exposure_value(double eta, double t_target, double t_exposer) {
  if (!(eta >= 0.0)) throw DomainError("exposure: eta must be non-negative");
  if (t_target < t_exposer) throw DomainError("exposure: exposer activates after target");
  return eta * std::exp(-(t_target - t_exposer));
}

// Pairwise transmission rates A, exposure rates Z and the scaling controls.
// Entries absent from A or Z fall back to the centrality decomposition.
struct ModelParams {
  std::unordered_map<NodePair, double, NodePairHash> alpha;  // (j, i): j -> i
  std::unordered_map<NodeId, double> eta;
  double lambda = 1.0;
  double beta = 1.0;

  double alpha_for(NodePair p, const CentralityVector& x) const {
    auto it = alpha.find(p);
    return it != alpha.end() ? it->second : x[p.src] * x[p.dst] * lambda;
  }
  double eta_for(NodeId m, const CentralityVector& x) const {
    auto it = eta.find(m);
    return it != eta.end() ? it->second : x[m] * beta;
  }
};

struct NodeLikelihood {
  NodeId node;
  double log_hazard = 0.0;    // log h of the parent edge
  double log_survival = 0.0;  // sum over every earlier adopter, parent included
  double log_exposure = 0.0;  // sum over zeta
};

struct LikelihoodTerms {
  std::vector<NodeLikelihood> per_node;
  double log_hazard = 0.0;
  double log_survival = 0.0;
  double log_exposure = 0.0;
  double total = 0.0;
};

// Hazard-form cascade log-likelihood over normalized time.
inline LikelihoodTerms cascade_log_likelihood(const Cascade& c, const ExposureMap& exposures,
                                              const ModelParams& params, const CentralityVector& x) {
  LikelihoodTerms out;
  out.per_node.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto& a = c[i];
    if (!a.parent) continue;
    const double ti = c.normalized_time(i);
    NodeLikelihood n{a.node};
    const NodeId j = *a.parent;
    const double alpha_ji = params.alpha_for({j, a.node}, x);
    if (!(alpha_ji > 0.0))
      throw LikelihoodUndefined("cascade " + c.id() + ": alpha is zero on the realized edge into node " +
                                std::to_string(index_of(a.node)));
    n.log_hazard = guarded_log(rayleigh(alpha_ji, ti - c.normalized_time_of(j)).hazard);
    for (std::size_t k = 0; k < i; ++k) {
      const double gap = ti - c.normalized_time(k);
      n.log_survival += -0.5 * params.alpha_for({c[k].node, a.node}, x) * gap * gap;
    }
    if (auto it = exposures.find(a.node); it != exposures.end()) {
      for (NodeId m : it->second.members)
        n.log_exposure += guarded_log(exposure_value(params.eta_for(m, x), ti, c.normalized_time_of(m)));
    }
    out.log_hazard += n.log_hazard;
    out.log_survival += n.log_survival;
    out.log_exposure += n.log_exposure;
    out.per_node.push_back(n);
  }
  out.total = out.log_hazard + out.log_survival + out.log_exposure;
  return out;
}

struct ObjectiveWeights {
  double n = 5.0;
  double m = 5.0;
  double gamma_lambda = 0.01;
  double gamma_beta = 0.01;
};

struct ObjectiveValue {
  double G = 0.0;
  double G1 = 0.0;
  double G2 = 0.0;
  double G3 = 0.0;
};

// Unique realized (parent, child) pairs across the corpus, ascending.
inline std::vector<NodePair> corpus_parent_pairs(std::span<const Cascade> corpus) {
  std::vector<NodePair> pairs;
  for (const auto& c : corpus)
    for (const auto& a : c.activations())
      if (a.parent) pairs.push_back({*a.parent, a.node});
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

// Nodes occurring in any exposure set, ascending.
inline std::vector<NodeId> corpus_exposure_nodes(std::span<const ExposureMap> exposures) {
  std::vector<NodeId> nodes;
  for (const auto& map : exposures)
    for (const auto& [v, set] : map) nodes.insert(nodes.end(), set.members.begin(), set.members.end());
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

// Per-cascade negative log-likelihoods, summed with a fixed reduction tree.
inline double negative_log_likelihood(std::span<const Cascade> corpus,
                                      std::span<const ExposureMap> exposures,
                                      const ModelParams& params, const CentralityVector& x,
                                      std::size_t workers = 1) {
  if (exposures.size() != corpus.size())
    throw ConfigError("exposure maps must align with the corpus");
  std::vector<double> per(corpus.size());
  parallel_for(corpus.size(), workers, [&](std::size_t c) {
    per[c] = -cascade_log_likelihood(corpus[c], exposures[c], params, x).total;
  });
  return pairwise_sum(per);
}

// Data terms of the two Lasso blocks: (1/2P) * squared residual.
inline double lambda_residual(const ModelParams& p, const CentralityVector& x, double pair_count) {
  double s = 0.0;
  for (const auto& [pair, a] : p.alpha) {
    const double r = a - x[pair.src] * x[pair.dst] * p.lambda;
    s += r * r;
  }
  return s / (2.0 * pair_count);
}

inline double beta_residual(const ModelParams& p, const CentralityVector& x, double pair_count) {
  double s = 0.0;
  for (const auto& [m, e] : p.eta) {
    const double r = e - x[m] * p.beta;
    s += r * r;
  }
  return s / (2.0 * pair_count);
}

// G = G1 + n G2 + m G3.
inline ObjectiveValue objective_G(std::span<const Cascade> corpus, std::span<const ExposureMap> exposures,
                                  const ModelParams& params, const CentralityVector& x,
                                  const ObjectiveWeights& w, std::size_t workers = 1) {
  const auto pair_count = static_cast<double>(corpus_parent_pairs(corpus).size());
  if (pair_count == 0.0) throw ConfigError("objective needs at least one infection pair");
  ObjectiveValue v;
  v.G1 = negative_log_likelihood(corpus, exposures, params, x, workers);
  v.G2 = lambda_residual(params, x, pair_count) + w.gamma_lambda * std::abs(params.lambda);
  v.G3 = beta_residual(params, x, pair_count) + w.gamma_beta * std::abs(params.beta);
  v.G = v.G1 + w.n * v.G2 + w.m * v.G3;
  return v;
}

struct Gradient {
  std::unordered_map<NodePair, double, NodePairHash> alpha;
  std::unordered_map<NodeId, double> eta;
  double lambda = 0.0;  // right derivative at 0
  double beta = 0.0;
};

// Closed-form partials of G. lambda/beta pick up G1 terms wherever a pair or
// exposure node falls back to the decomposition.
inline Gradient gradients(std::span<const Cascade> corpus, std::span<const ExposureMap> exposures,
                          const ModelParams& params, const CentralityVector& x, const ObjectiveWeights& w) {
  const auto pair_count = static_cast<double>(corpus_parent_pairs(corpus).size());
  if (pair_count == 0.0) throw ConfigError("objective needs at least one infection pair");
  Gradient g;
  for (const auto& [p, a] : params.alpha) g.alpha[p] = 0.0;
  for (const auto& [m, e] : params.eta) g.eta[m] = 0.0;
  for (std::size_t ci = 0; ci < corpus.size(); ++ci) {
    const auto& c = corpus[ci];
    for (std::size_t i = 0; i < c.size(); ++i) {
      const auto& act = c[i];
      if (!act.parent) continue;
      const double ti = c.normalized_time(i);
      const NodePair parent_pair{*act.parent, act.node};
      if (auto it = params.alpha.find(parent_pair); it != params.alpha.end()) {
        if (!(it->second > 0.0)) throw DomainError("gradient: alpha is zero on a realized edge");
        g.alpha[parent_pair] -= 1.0 / it->second;
      } else {
        if (!(params.lambda > 0.0)) throw DomainError("gradient: lambda is zero on a realized edge");
        g.lambda -= 1.0 / params.lambda;
      }
      for (std::size_t k = 0; k < i; ++k) {
        const double gap = ti - c.normalized_time(k);
        const NodePair pk{c[k].node, act.node};
        if (params.alpha.count(pk))
          g.alpha[pk] += 0.5 * gap * gap;
        else
          g.lambda += 0.5 * x[pk.src] * x[pk.dst] * gap * gap;
      }
      if (auto it = exposures[ci].find(act.node); it != exposures[ci].end()) {
        for (NodeId m : it->second.members) {
          if (auto e = params.eta.find(m); e != params.eta.end()) {
            if (!(e->second > 0.0)) throw DomainError("gradient: eta is zero on an exposure node");
            g.eta[m] -= 1.0 / e->second;
          } else {
            if (!(params.beta > 0.0)) throw DomainError("gradient: beta is zero on an exposure node");
            g.beta -= 1.0 / params.beta;
          }
        }
      }
    }
  }
  double lambda_fit = 0.0;
  for (const auto& [p, a] : params.alpha) {
    const double q = x[p.src] * x[p.dst];
    const double r = a - q * params.lambda;
    g.alpha[p] += w.n * r / pair_count;
    lambda_fit += r * q;
  }
  g.lambda += w.n * (-lambda_fit / pair_count + w.gamma_lambda * (params.lambda < 0.0 ? -1.0 : 1.0));
  double beta_fit = 0.0;
  for (const auto& [m, e] : params.eta) {
    const double r = e - x[m] * params.beta;
    g.eta[m] += w.m * r / pair_count;
    beta_fit += r * x[m];
  }
  g.beta += w.m * (-beta_fit / pair_count + w.gamma_beta * (params.beta < 0.0 ? -1.0 : 1.0));
  return g;
}

}  // namespace motifcascade
