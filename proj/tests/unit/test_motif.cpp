#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <map>
#include <random>
#include <set>

#include "test_support.hpp"

namespace mc = motifcascade;

namespace {

constexpr auto C = mc::EdgeType::cascade;
constexpr auto H = mc::EdgeType::historical;

mc::TemporalWindow window_of(std::size_t n, std::vector<mc::TypedEdge> edges) {
  mc::TemporalWindow w;
  for (std::uint32_t i = 0; i < n; ++i) (i < n / 2 ? w.prior_nodes : w.current_nodes).push_back(mc::node_id(i));
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  w.edges = std::move(edges);
  return w;
}

mc::TemporalWindow random_window(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<mc::TypedEdge> edges;
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b) {
      if (a == b) continue;
      if (coin(rng)) edges.push_back({mc::node_id(a), mc::node_id(b), C});
      if (coin(rng)) edges.push_back({mc::node_id(a), mc::node_id(b), H});
    }
  return window_of(n, std::move(edges));
}

using InstanceKey = std::pair<std::array<std::uint32_t, 3>, std::vector<mc::TypedEdge>>;

// Every triple, kept when at least two of its three vertex pairs are linked.
std::multiset<InstanceKey> all_triples(const mc::TemporalWindow& w) {
  auto nodes = w.nodes();
  std::sort(nodes.begin(), nodes.end());
  std::multiset<InstanceKey> out;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      for (std::size_t k = j + 1; k < nodes.size(); ++k) {
        const std::set<mc::NodeId> tri{nodes[i], nodes[j], nodes[k]};
        std::vector<mc::TypedEdge> induced;
        std::set<std::pair<mc::NodeId, mc::NodeId>> links;
        for (const auto& e : w.edges)
          if (tri.count(e.src) && tri.count(e.dst)) {
            induced.push_back(e);
            links.insert({std::min(e.src, e.dst), std::max(e.src, e.dst)});
          }
        if (links.size() < 2) continue;
        std::sort(induced.begin(), induced.end());
        out.insert({{mc::index_of(nodes[i]), mc::index_of(nodes[j]), mc::index_of(nodes[k])}, induced});
      }
  return out;
}

std::multiset<InstanceKey> enumerated(const mc::TemporalWindow& w) {
  std::multiset<InstanceKey> out;
  for (const auto& m : mc::enumerate_size3(w))
    out.insert({{mc::index_of(m.vertices[0]), mc::index_of(m.vertices[1]), mc::index_of(m.vertices[2])}, m.edges});
  return out;
}

}  // namespace

TEST(Enumerate, PathHasOneInstance) {
  auto w = window_of(4, {{mc::node_id(0), mc::node_id(1), C}, {mc::node_id(1), mc::node_id(2), C}});
  auto got = mc::enumerate_size3(w);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].edges.size(), 2u);
}

TEST(Enumerate, TriangleIsOneInducedInstance) {
  auto w = window_of(4, {{mc::node_id(0), mc::node_id(1), C},
                         {mc::node_id(1), mc::node_id(2), C},
                         {mc::node_id(0), mc::node_id(2), C}});
  auto got = mc::enumerate_size3(w);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0].edges.size(), 3u);
}

TEST(Enumerate, MatchesAllTriplesOnRandomWindows) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 4 + trial % 12;
    const double p = 0.03 + 0.02 * (trial % 6);
    auto w = random_window(n, p, rng);
    EXPECT_EQ(enumerated(w), all_triples(w)) << "trial " << trial;
  }
}

TEST(Enumerate, MatchesAllTriplesOnThirtyNodes) {
  std::mt19937_64 rng(2);
  auto w = random_window(30, 0.04, rng);
  EXPECT_EQ(enumerated(w), all_triples(w));
}

TEST(Canonical, IsomorphicPathsShareCode) {
  const std::vector<mc::LocalEdge> abc{{0, 1, C}, {1, 2, C}};
  const std::vector<mc::LocalEdge> zyx{{2, 0, C}, {0, 1, C}};
  EXPECT_EQ(mc::canonicalize_pattern(abc), mc::canonicalize_pattern(zyx));
}

TEST(Canonical, EdgeTypesAreDistinguished) {
  const std::vector<mc::LocalEdge> cascade{{0, 1, C}};
  const std::vector<mc::LocalEdge> historical{{0, 1, H}};
  EXPECT_NE(mc::canonicalize_pattern(cascade), mc::canonicalize_pattern(historical));
}

TEST(Canonical, AllRelabelingsAgree) {
  std::mt19937_64 rng(9);
  std::bernoulli_distribution coin(0.4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<mc::LocalEdge> edges;
    for (std::uint8_t a = 0; a < 3; ++a)
      for (std::uint8_t b = 0; b < 3; ++b) {
        if (a == b) continue;
        if (coin(rng)) edges.push_back({a, b, C});
        if (coin(rng)) edges.push_back({a, b, H});
      }
    const auto code = mc::canonicalize_pattern(edges);
    std::array<std::uint8_t, 3> perm{0, 1, 2};
    do {
      std::vector<mc::LocalEdge> relabeled;
      for (const auto& e : edges) relabeled.push_back({perm[e.src], perm[e.dst], e.type});
      EXPECT_EQ(mc::canonicalize_pattern(relabeled), code);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
}

TEST(Canonical, DistinctGraphsGetDistinctCodes) {
  // Non-isomorphic graphs never collide: codes of all 4096 typed graphs form
  // exactly as many classes as orbits under relabeling.
  std::map<std::uint16_t, std::set<std::uint16_t>> orbit_of_code;
  for (unsigned bits = 0; bits < 4096; ++bits) {
    std::vector<mc::LocalEdge> edges;
    const std::array<std::array<std::uint8_t, 2>, 6> pairs{{{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}}};
    for (int k = 0; k < 6; ++k) {
      const unsigned t = (bits >> (2 * k)) & 3u;
      if (t & 1u) edges.push_back({pairs[k][0], pairs[k][1], C});
      if (t & 2u) edges.push_back({pairs[k][0], pairs[k][1], H});
    }
    std::set<std::uint16_t> orbit;
    std::array<std::uint8_t, 3> perm{0, 1, 2};
    do {
      unsigned img = 0;
      for (int k = 0; k < 6; ++k) {
        const unsigned t = (bits >> (2 * k)) & 3u;
        int a = perm[pairs[k][0]], b = perm[pairs[k][1]];
        for (int j = 0; j < 6; ++j)
          if (pairs[j][0] == a && pairs[j][1] == b) img |= t << (2 * j);
      }
      orbit.insert(static_cast<std::uint16_t>(img));
    } while (std::next_permutation(perm.begin(), perm.end()));
    auto& seen = orbit_of_code[mc::canonicalize_pattern(edges).bits];
    if (seen.empty()) seen = orbit;
    EXPECT_EQ(seen, orbit);
  }
}

TEST(Canonical, RejectsVerticesBeyondThree) {
  const std::vector<mc::LocalEdge> bad{{0, 3, C}};
  EXPECT_THROW(mc::canonicalize_pattern(bad), mc::ConfigError);
}

TEST(Patterns, DefaultsAreSixConnectedWithParallelPair) {
  auto set = mc::default_patterns();
  EXPECT_EQ(set.size(), 6u);
  for (const auto& p : set.patterns()) {
    bool cascade = false, historical = false;
    for (const auto& e : p.edges)
      if (e.src == 0 && e.dst == 1) (e.type == C ? cascade : historical) = true;
    EXPECT_TRUE(cascade && historical) << p.name;
  }
}

TEST(Patterns, JsonRoundTripAndValidation) {
  auto doc = nlohmann::json::parse(R"([[[0,1,"cascade"],[1,2,"historical"]]])");
  auto set = mc::parse_patterns(doc);
  ASSERT_EQ(set.size(), 1u);
  EXPECT_EQ(mc::patterns_to_json(set), doc);
  EXPECT_THROW(mc::parse_patterns(nlohmann::json::parse(R"([[[0,1,"cascade"]]])")), mc::ConfigError);
  EXPECT_THROW(mc::parse_patterns(nlohmann::json::parse(R"([[[0,1,"friend"],[1,2,"cascade"]]])")), mc::ConfigError);
  EXPECT_THROW(mc::parse_patterns(nlohmann::json::parse(R"({"a":1})")), mc::ConfigError);
}
