#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "test_support.hpp"

namespace mc = motifcascade;

namespace {

mc::SynthConfig small_config(std::uint64_t seed = 1) {
  mc::SynthConfig cfg;
  cfg.n_nodes = 300;
  cfg.n_cascades = 12;
  cfg.min_cascade_size = 60;
  cfg.seed = seed;
  return cfg;
}

// One-sample Kolmogorov-Smirnov statistic.
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

std::vector<double> two_node_gaps(mc::TransmissionKind kind, double lambda, const mc::CentralityVector& x) {
  auto g = mctest::graph_from(2, {{0, 1}});
  mc::SynthConfig cfg;
  cfg.true_lambda = lambda;
  cfg.transmission = kind;
  std::mt19937_64 rng(2024);
  std::vector<double> gaps;
  for (int i = 0; i < 10000; ++i) {
    auto acts = mc::simulate_cascade(g, x, mc::node_id(0), cfg, 2, rng);
    EXPECT_EQ(acts.size(), 2u);
    EXPECT_EQ(acts[1].parent, mc::node_id(0));
    gaps.push_back(acts[1].time - acts[0].time);
  }
  return gaps;
}

}  // namespace

TEST(Synth, RayleighGapsPassKolmogorovSmirnov) {
  mc::CentralityVector x{mc::CentralityKind::degree, {0.8, 0.5}};
  const double alpha = 1.5 * 0.8 * 0.5;
  auto gaps = two_node_gaps(mc::TransmissionKind::rayleigh, 1.5, x);
  EXPECT_LT(ks_statistic(gaps, [&](double d) { return 1.0 - std::exp(-0.5 * alpha * d * d); }), 0.05);
  // The exponential law is clearly rejected by the same sample.
  EXPECT_GT(ks_statistic(gaps, [&](double d) { return 1.0 - std::exp(-alpha * d); }), 0.05);
}

TEST(Synth, ExponentialGapsPassKolmogorovSmirnov) {
  mc::CentralityVector x{mc::CentralityKind::degree, {1.0, 0.3}};
  auto gaps = two_node_gaps(mc::TransmissionKind::exponential, 2.0, x);
  EXPECT_LT(ks_statistic(gaps, [](double d) { return 1.0 - std::exp(-0.6 * d); }), 0.05);
}

TEST(Synth, FixedSeedGivesIdenticalBytes) {
  auto a = mc::synthetic_dataset(small_config(4));
  auto b = mc::synthetic_dataset(small_config(4));
  EXPECT_EQ(mc::edges_text(a), mc::edges_text(b));
  EXPECT_EQ(mc::cascades_text(a.cascades, a.dict), mc::cascades_text(b.cascades, b.dict));
  auto c = mc::synthetic_dataset(small_config(5));
  EXPECT_NE(mc::cascades_text(a.cascades, a.dict), mc::cascades_text(c.cascades, c.dict));
}

TEST(Synth, ZeroRateStarvesTheGenerator) {
  auto cfg = small_config();
  cfg.true_lambda = 0.0;
  cfg.resample_budget = 2;
  try {
    mc::generate_synthetic(cfg);
    FAIL() << "expected GeneratorStarved";
  } catch (const mc::GeneratorStarved& e) {
    EXPECT_EQ(e.exit_code(), 3);
    EXPECT_NE(std::string(e.what()).find("largest rejected size 1"), std::string::npos) << e.what();
  }
}

TEST(Synth, CascadesRespectSizeBoundsAndHistory) {
  auto cfg = small_config(6);
  auto data = mc::generate_synthetic(cfg);
  ASSERT_EQ(data.cascades.size(), cfg.n_cascades);
  std::set<std::string> ids;
  for (const auto& c : data.cascades) {
    EXPECT_TRUE(ids.insert(c.id()).second);
    EXPECT_GE(c.size(), cfg.min_cascade_size);
    EXPECT_LE(c.size(), cfg.cascade_cap());
    std::set<mc::NodeId> seen;
    for (std::size_t i = 0; i < c.size(); ++i) {
      EXPECT_TRUE(seen.insert(c[i].node).second);
      if (!c[i].parent) {
        EXPECT_EQ(i, 0u);
        continue;
      }
      // The true parent is an earlier adopter and a historical in-neighbour.
      EXPECT_TRUE(seen.count(*c[i].parent));
      EXPECT_TRUE(data.graph.has_edge(*c[i].parent, c[i].node));
    }
  }
}

TEST(Synth, ScaleFreeTopologyIsSimpleAndHeavyTailed) {
  auto cfg = small_config(7);
  cfg.n_nodes = 2000;
  std::mt19937_64 rng(cfg.seed);
  auto edges = mc::scale_free_edges(cfg, rng);
  std::set<mc::NodePair> unique(edges.begin(), edges.end());
  EXPECT_EQ(unique.size(), edges.size());
  std::vector<std::size_t> degree(cfg.n_nodes, 0);
  for (const auto& e : edges) {
    EXPECT_NE(e.src, e.dst);
    ++degree[mc::index_of(e.src)];
    ++degree[mc::index_of(e.dst)];
  }
  for (auto d : degree) EXPECT_GT(d, 0u);
  const double mean = 2.0 * static_cast<double>(edges.size()) / static_cast<double>(cfg.n_nodes);
  EXPECT_GT(static_cast<double>(*std::max_element(degree.begin(), degree.end())), 10.0 * mean);
}

TEST(Synth, InvalidConfigsAreRejected) {
  auto cfg = small_config();
  cfg.min_cascade_size = 1;
  EXPECT_THROW(mc::generate_synthetic(cfg), mc::ConfigError);
  cfg = small_config();
  cfg.max_cascade_size = 10;
  EXPECT_THROW(mc::generate_synthetic(cfg), mc::ConfigError);
  cfg = small_config();
  cfg.reciprocity = 1.5;
  EXPECT_THROW(mc::generate_synthetic(cfg), mc::ConfigError);
  cfg = small_config();
  cfg.exposure_boost = 0.0;
  EXPECT_THROW(mc::generate_synthetic(cfg), mc::ConfigError);
}

TEST(Synth, ConfigJsonRoundTrip) {
  auto cfg = small_config(9);
  cfg.transmission = mc::TransmissionKind::exponential;
  cfg.true_beta = 3.5;
  auto j = mc::to_json_value(cfg);
  mc::SynthConfig back;
  mc::from_json(j, back);
  EXPECT_EQ(mc::to_json_value(back), j);
}
