#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "motifcascade/error.hpp"
#include "motifcascade/survival.hpp"

namespace motifcascade {

// argmin over t >= 0 of a/2 t^2 - b t + gamma t.
inline double soft_threshold_scalar(double b, double a, double gamma) {
  if (!(a > 0.0)) throw DomainError("soft threshold: curvature must be positive");
  return std::max(0.0, (b - gamma) / a);
}

// Sufficient statistics of G1 over a fixed corpus and exposure assignment.
// Every (earlier adopter, adopter) pair of the corpus gets an alpha slot; every
// exposure member gets an eta slot.
//
//   G1 = sum_p [-hazard_count_p log a_p + survival_weight_p a_p]
//      + sum_m [-exposure_count_m log e_m] + constant
struct LikelihoodStatistics {
  std::vector<NodePair> pairs;
  std::vector<double> hazard_count;
  std::vector<double> survival_weight;  // sum of gap^2 / 2 over occurrences
  std::vector<double> pair_attribute;   // x_j * x_i
  std::vector<NodeId> exposure_nodes;
  std::vector<double> exposure_count;
  std::vector<double> node_attribute;   // x_m
  double constant = 0.0;
  double parent_pair_count = 0.0;       // P

  std::size_t realized_pairs() const {
    return static_cast<std::size_t>(
        std::count_if(hazard_count.begin(), hazard_count.end(), [](double h) { return h > 0.0; }));
  }
};

inline LikelihoodStatistics compile_statistics(std::span<const Cascade> corpus,
                                               std::span<const ExposureMap> exposures,
                                               const CentralityVector& x) {
  if (corpus.empty()) throw ConfigError("training corpus is empty");
  if (exposures.size() != corpus.size()) throw ConfigError("exposure maps must align with the corpus");
  struct Occurrence {
    NodePair pair;
    double hazard;
    double weight;
  };
  std::vector<Occurrence> occ;
  std::vector<NodeId> members;
  LikelihoodStatistics s;
  for (std::size_t ci = 0; ci < corpus.size(); ++ci) {
    const auto& c = corpus[ci];
    for (std::size_t i = 0; i < c.size(); ++i) {
      const auto& a = c[i];
      if (!a.parent) continue;
      const double ti = c.normalized_time(i);
      for (std::size_t k = 0; k < i; ++k) {
        const double gap = ti - c.normalized_time(k);
        const bool is_parent = c[k].node == *a.parent;
        occ.push_back({{c[k].node, a.node}, is_parent ? 1.0 : 0.0, 0.5 * gap * gap});
        if (is_parent) s.constant -= std::log(std::max(gap, kLogFloor));
      }
      if (auto it = exposures[ci].find(a.node); it != exposures[ci].end()) {
        for (NodeId m : it->second.members) {
          members.push_back(m);
          s.constant += ti - c.normalized_time_of(m);
        }
      }
    }
  }
  std::sort(occ.begin(), occ.end(), [](const Occurrence& a, const Occurrence& b) { return a.pair < b.pair; });
  for (std::size_t i = 0; i < occ.size();) {
    std::size_t j = i;
    double h = 0.0, w = 0.0;
    for (; j < occ.size() && occ[j].pair == occ[i].pair; ++j) {
      h += occ[j].hazard;
      w += occ[j].weight;
    }
    s.pairs.push_back(occ[i].pair);
    s.hazard_count.push_back(h);
    s.survival_weight.push_back(w);
    s.pair_attribute.push_back(x[occ[i].pair.src] * x[occ[i].pair.dst]);
    i = j;
  }
  std::sort(members.begin(), members.end());
  for (std::size_t i = 0; i < members.size();) {
    std::size_t j = i;
    while (j < members.size() && members[j] == members[i]) ++j;
    s.exposure_nodes.push_back(members[i]);
    s.exposure_count.push_back(static_cast<double>(j - i));
    s.node_attribute.push_back(x[members[i]]);
    i = j;
  }
  s.parent_pair_count = static_cast<double>(s.realized_pairs());
  if (s.parent_pair_count == 0.0) throw ConfigError("objective needs at least one infection pair");
  return s;
}

enum class InitRule { decomposition, random };

struct TrainConfig {
  ObjectiveWeights weights;
  std::size_t max_outer_iters = 200;
  double outer_tol = 1e-6;
  double positivity_floor = 1e-12;
  InitRule init = InitRule::decomposition;
  double initial_lambda = 1.0;
  double initial_beta = 1.0;
  std::uint64_t seed = 0;
};

struct TraceRow {
  std::size_t iter = 0;
  double G = 0.0, G1 = 0.0, G2 = 0.0, G3 = 0.0;
  double lambda = 0.0, beta = 0.0;
  double seconds = 0.0;
};

struct TrainTrace {
  std::vector<TraceRow> rows;
  double max_block_increase = 0.0;  // largest G increase seen across single block updates
  bool converged = false;
};

// `seconds` is wall-clock and therefore only written when asked for.
inline void write_trace_csv(std::ostream& out, const TrainTrace& trace, bool include_timing) {
  out << "iter,G,G1,G2,G3,lambda,beta,seconds\n";
  for (const auto& r : trace.rows)
    out << r.iter << ',' << format_double(r.G) << ',' << format_double(r.G1) << ','
        << format_double(r.G2) << ',' << format_double(r.G3) << ',' << format_double(r.lambda)
        << ',' << format_double(r.beta) << ',' << (include_timing ? format_double(r.seconds) : "0")
        << '\n';
}

// Block coordinate descent on the compiled objective.
class Trainer {
 public:
  Trainer(LikelihoodStatistics stats, TrainConfig cfg) : s_(std::move(stats)), cfg_(cfg) {
    const auto& w = cfg_.weights;
    if (cfg_.max_outer_iters < 1) throw ConfigError("max_outer_iters must be at least 1");
    if (!(cfg_.outer_tol > 0.0)) throw ConfigError("outer_tol must be positive");
    if (w.n < 0.0 || w.m < 0.0 || w.gamma_lambda < 0.0 || w.gamma_beta < 0.0)
      throw ConfigError("objective weights must be non-negative");
    // The exposure factor is not normalized in eta; without the G3 anchor the
    // eta block has no minimizer.
    if (!s_.exposure_nodes.empty() && !(w.m > 0.0))
      throw ConfigError("m must be positive when exposure nodes are present");
    alpha_.resize(s_.pairs.size());
    eta_.resize(s_.exposure_nodes.size());
    initialize();
  }

  const std::vector<double>& alpha() const noexcept { return alpha_; }
  const std::vector<double>& eta() const noexcept { return eta_; }
  double lambda() const noexcept { return lambda_; }
  double beta() const noexcept { return beta_; }
  const LikelihoodStatistics& statistics() const noexcept { return s_; }

  void set_state(std::vector<double> alpha, std::vector<double> eta, double lambda, double beta) {
    alpha_ = std::move(alpha);
    eta_ = std::move(eta);
    lambda_ = lambda;
    beta_ = beta;
  }

  ObjectiveValue evaluate() const {
    ObjectiveValue v;
    const double P = s_.parent_pair_count;
    double g1 = s_.constant, g2 = 0.0, g3 = 0.0;
    for (std::size_t p = 0; p < alpha_.size(); ++p) {
      if (s_.hazard_count[p] > 0.0) g1 -= s_.hazard_count[p] * guarded_log(alpha_[p]);
      g1 += s_.survival_weight[p] * alpha_[p];
      const double r = alpha_[p] - s_.pair_attribute[p] * lambda_;
      g2 += r * r;
    }
    for (std::size_t m = 0; m < eta_.size(); ++m) {
      g1 -= s_.exposure_count[m] * guarded_log(eta_[m]);
      const double r = eta_[m] - s_.node_attribute[m] * beta_;
      g3 += r * r;
    }
    v.G1 = g1;
    v.G2 = g2 / (2.0 * P) + cfg_.weights.gamma_lambda * std::abs(lambda_);
    v.G3 = g3 / (2.0 * P) + cfg_.weights.gamma_beta * std::abs(beta_);
    v.G = v.G1 + cfg_.weights.n * v.G2 + cfg_.weights.m * v.G3;
    check_finite(v);
    return v;
  }

  TrainTrace fit() {
    TrainTrace trace;
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    auto record = [&](std::size_t iter) {
      const auto v = evaluate();
      trace.rows.push_back({iter, v.G, v.G1, v.G2, v.G3, lambda_, beta_, elapsed()});
      return v.G;
    };
    double previous = record(0);
    for (std::size_t it = 1; it <= cfg_.max_outer_iters; ++it) {
      double before = previous;
      auto step = [&](auto&& block) {
        block();
        const double after = evaluate().G;
        trace.max_block_increase = std::max(trace.max_block_increase, after - before);
        before = after;
      };
      step([&] { update_alpha(); });
      step([&] { update_eta(); });
      step([&] { update_lambda(); });
      step([&] { update_beta(); });
      const double g = record(it);
      if (std::abs(previous - g) < cfg_.outer_tol * std::max(1.0, std::abs(g))) {
        trace.converged = true;
        break;
      }
      previous = g;
    }
    return trace;
  }

  ModelParams params() const {
    ModelParams p;
    p.lambda = lambda_;
    p.beta = beta_;
    p.alpha.reserve(alpha_.size());
    for (std::size_t i = 0; i < alpha_.size(); ++i) p.alpha.emplace(s_.pairs[i], alpha_[i]);
    for (std::size_t i = 0; i < eta_.size(); ++i) p.eta.emplace(s_.exposure_nodes[i], eta_[i]);
    return p;
  }

 private:
  void initialize() {
    lambda_ = cfg_.initial_lambda;
    beta_ = cfg_.initial_beta;
    std::mt19937_64 rng(cfg_.seed);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    if (cfg_.init == InitRule::random) {
      lambda_ = scale(rng);
      beta_ = scale(rng);
    }
    for (std::size_t p = 0; p < alpha_.size(); ++p) {
      alpha_[p] = s_.pair_attribute[p] * lambda_;
      if (cfg_.init == InitRule::random) alpha_[p] *= scale(rng);
      alpha_[p] = std::max(alpha_[p], cfg_.positivity_floor);
    }
    for (std::size_t m = 0; m < eta_.size(); ++m) {
      eta_[m] = s_.node_attribute[m] * beta_;
      if (cfg_.init == InitRule::random) eta_[m] *= scale(rng);
      eta_[m] = std::max(eta_[m], cfg_.positivity_floor);
    }
  }

  void check_finite(const ObjectiveValue& v) const {
    if (!std::isfinite(v.G1)) throw NumericalError("non-finite G1 (negative log-likelihood)");
    if (!std::isfinite(v.G2)) throw NumericalError("non-finite G2 (lambda residual)");
    if (!std::isfinite(v.G3)) throw NumericalError("non-finite G3 (beta residual)");
  }

  // Separable block: f(v) = sum_i [-count_i log v_i + linear_i v_i + c/2 (v_i - target_i)^2]
  // on v >= floor. Each coordinate is minimized exactly: the stationarity
  // condition is the quadratic c v^2 + (linear - c target) v - count = 0.
  struct Block {
    std::span<const double> count;
    std::span<const double> linear;
    std::vector<double> target;
    double curvature;  // c
  };

  double coordinate_minimizer(double h, double w, double c, double t) const {
    double v;
    if (c > 0.0) {
      const double b = w - c * t;
      if (h <= 0.0) {
        v = -b / c;
      } else {
        const double root = std::sqrt(b * b + 4.0 * c * h);
        v = b > 0.0 ? 2.0 * h / (b + root) : (root - b) / (2.0 * c);
      }
    } else {
      if (h > 0.0 && !(w > 0.0)) throw NumericalError("unbounded coordinate: no survival mass or anchor");
      v = h > 0.0 ? h / w : 0.0;
    }
    return std::max(v, cfg_.positivity_floor);
  }

  void solve_block(const Block& b, std::vector<double>& v) const {
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = coordinate_minimizer(b.count[i], b.linear[i], b.curvature, b.target[i]);
  }

  void update_alpha() {
    const double c = cfg_.weights.n / s_.parent_pair_count;
    Block b{s_.hazard_count, s_.survival_weight, {}, c};
    b.target.resize(alpha_.size());
    for (std::size_t p = 0; p < alpha_.size(); ++p) b.target[p] = s_.pair_attribute[p] * lambda_;
    solve_block(b, alpha_);
  }

  void update_eta() {
    const double c = cfg_.weights.m / s_.parent_pair_count;
    const std::vector<double> zero(eta_.size(), 0.0);
    Block b{s_.exposure_count, zero, {}, c};
    b.target.resize(eta_.size());
    for (std::size_t m = 0; m < eta_.size(); ++m) b.target[m] = s_.node_attribute[m] * beta_;
    solve_block(b, eta_);
  }

  // Exact scalar Lasso: n [ (1/2P) sum (alpha - q lambda)^2 + gamma |lambda| ].
  void update_lambda() {
    const double w = cfg_.weights.n;
    if (!(w > 0.0)) return;  // G independent of lambda
    double qq = 0.0, aq = 0.0;
    for (std::size_t p = 0; p < alpha_.size(); ++p) {
      qq += s_.pair_attribute[p] * s_.pair_attribute[p];
      aq += alpha_[p] * s_.pair_attribute[p];
    }
    const double P = s_.parent_pair_count;
    lambda_ = soft_threshold_scalar(w * aq / P, w * qq / P, w * cfg_.weights.gamma_lambda);
  }

  void update_beta() {
    const double w = cfg_.weights.m;
    if (!(w > 0.0) || eta_.empty()) {
      if (w > 0.0) beta_ = 0.0;  // only the l1 term remains
      return;
    }
    double xx = 0.0, ex = 0.0;
    for (std::size_t m = 0; m < eta_.size(); ++m) {
      xx += s_.node_attribute[m] * s_.node_attribute[m];
      ex += eta_[m] * s_.node_attribute[m];
    }
    const double P = s_.parent_pair_count;
    beta_ = soft_threshold_scalar(w * ex / P, w * xx / P, w * cfg_.weights.gamma_beta);
  }

  LikelihoodStatistics s_;
  TrainConfig cfg_;
  std::vector<double> alpha_;
  std::vector<double> eta_;
  double lambda_ = 1.0;
  double beta_ = 1.0;
};

struct FitResult {
  ModelParams params;
  TrainTrace trace;
};

inline FitResult fit(std::span<const Cascade> corpus, std::span<const ExposureMap> exposures,
                     const CentralityVector& x, const TrainConfig& cfg) {
  Trainer t(compile_statistics(corpus, exposures, x), cfg);
  auto trace = t.fit();
  return {t.params(), std::move(trace)};
}

}  // namespace motifcascade
