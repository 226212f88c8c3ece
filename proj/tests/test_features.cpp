#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "nkmatch/error.hpp"
#include "nkmatch/features.hpp"
#include "nkmatch/perturbation.hpp"
#include "oracles.hpp"

using namespace nkmatch;

TEST_CASE("log binning boundaries") {
  BinningScheme s;
  CHECK(s.bins() == 16);
  CHECK(s.feature_dim() == 33);
  CHECK(s.bucket(0) == 0);
  CHECK(s.bucket(1) == 0);
  CHECK(s.bucket(2) == 1);
  CHECK(s.bucket(3) == 1);
  CHECK(s.bucket(4) == 2);
  CHECK(s.bucket(7) == 2);
  CHECK(s.bucket(8) == 3);
  CHECK(s.bucket((1u << 15) - 1) == 14);
  CHECK(s.bucket(1u << 15) == 15);
  CHECK(s.bucket(std::size_t{1} << 40) == 15);
  auto b = s.boundaries();
  CHECK(b.size() == 16);
  CHECK(b[0] == 0);
  CHECK(b[1] == 2);
  CHECK(b[15] == 32768);
  for (std::size_t d = 0; d < 5000; d += 7) CHECK(s.bucket(d) == oracle::bucket(d, 16));

  BinningScheme one(1);
  CHECK(one.bucket(1000) == 0);
  CHECK_THROWS_AS(BinningScheme(0), UsageError);
  CHECK_THROWS_AS(BinningScheme(64), UsageError);
}

TEST_CASE("diversity score closed forms") {
  std::vector<double> uniform(33, 2.5);
  CHECK(diversity_score(uniform) == doctest::Approx(1.0).epsilon(1e-12));
  std::vector<double> onehot(33, 0.0);
  onehot[7] = 4.0;
  CHECK(diversity_score(onehot) == 0.0);
  std::vector<double> zero(33, 0.0);
  CHECK(diversity_score(zero) == 0.0);
  // Two equal non-zero entries out of 33: log 2 / log 33.
  std::vector<double> two(33, 0.0);
  two[0] = 1;
  two[20] = 1;
  CHECK(diversity_score(two) == doctest::Approx(std::log(2.0) / std::log(33.0)));
  CHECK(diversity_score(two) == doctest::Approx(0.19824).epsilon(1e-4));
  CHECK_THROWS_AS(diversity_score(std::vector<double>{1.0}), UsageError);
}

TEST_CASE("diversity score matches an entropy oracle and stays in [0,1]") {
  std::mt19937 gen(11);
  std::uniform_int_distribution<int> count(0, 9);
  for (int t = 0; t < 2000; ++t) {
    std::vector<double> v(2 + t % 40);
    for (auto& x : v) x = count(gen) < 5 ? 0.0 : count(gen);
    const double ds = diversity_score(v);
    CHECK(ds >= 0.0);
    CHECK(ds <= 1.0);
    CHECK(ds == doctest::Approx(oracle::entropy_ratio(v)).epsilon(1e-12));
  }
}

TEST_CASE("star graph features") {
  // Hub 0 with 5 leaves; leaves see each other at distance 2.
  std::vector<Edge> e;
  for (NodeId i = 1; i <= 5; ++i) e.push_back({0, i});
  Graph star(6, e);
  BinningScheme s;
  auto hub = node_features(star, 0, s);
  CHECK(hub.nk0 == 5);
  CHECK(hub.nk1[0] == 5);
  for (auto c : hub.nk2) CHECK(c == 0);
  auto leaf = node_features(star, 1, s);
  CHECK(leaf.nk0 == 1);
  CHECK(leaf.nk1[2] == 1);  // hub degree 5 is in [4, 8)
  CHECK(leaf.nk2[0] == 4);
  CHECK(leaf.raw.size() == 33);
  CHECK(leaf.raw[0] == 1.0);
  CHECK(leaf.ds == doctest::Approx(oracle::entropy_ratio(leaf.raw)));
}

TEST_CASE("isolated node has zero features") {
  Graph g(3, {{1, 2}});
  auto f = node_features(g, 0, BinningScheme{});
  CHECK(f.nk0 == 0);
  CHECK(f.ds == 0.0);
  for (double x : f.raw) CHECK(x == 0.0);
}

TEST_CASE("nk1 and nk2 match brute-force binned multisets") {
  for (std::uint32_t seed = 0; seed < 20; ++seed) {
    auto g = oracle::er_graph(45, 0.04 + 0.02 * (seed % 8), 100 + seed);
    for (std::size_t bins : {1u, 3u, 16u}) {
      auto feats = extract_features(g, BinningScheme(bins));
      for (NodeId a = 0; a < g.node_count(); ++a) {
        CHECK(feats[a].nk0 == g.degree(a));
        CHECK(feats[a].nk1 == oracle::binned_multiset(g, oracle::frontier(g, a, 1), bins));
        CHECK(feats[a].nk2 == oracle::binned_multiset(g, oracle::frontier(g, a, 2), bins));
      }
    }
  }
}

TEST_CASE("parallel and serial extraction agree") {
  auto g = generate_synthetic(GraphModel::barabasi_albert, {.n = 800, .m = 4}, 9);
  BinningScheme s;
  auto p = extract_features(g, s);
  auto q = serial::extract_features(g, s);
  REQUIRE(p.size() == q.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    CHECK(p[i].raw == q[i].raw);
    CHECK(p[i].ds == q[i].ds);
  }
}

TEST_CASE("features are invariant under relabeling") {
  auto g = oracle::er_graph(60, 0.1, 5);
  std::vector<NodeId> perm(60);
  for (NodeId i = 0; i < 60; ++i) perm[i] = (i * 37 + 11) % 60;
  auto h = permute_nodes(g, perm);
  auto fg = extract_features(g, BinningScheme{});
  auto fh = extract_features(h, BinningScheme{});
  for (NodeId a = 0; a < 60; ++a) {
    CHECK(fg[a].raw == fh[perm[a]].raw);
    CHECK(fg[a].ds == fh[perm[a]].ds);
  }
}

TEST_CASE("feature csv layout") {
  Graph g(2, {{0, 1}}, {42, 43});
  auto f = extract_features(g, BinningScheme(2));
  std::ostringstream out;
  write_feature_csv(out, g, f);
  std::istringstream in(out.str());
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  CHECK(header == "node,nk0,nk1_0,nk1_1,nk2_0,nk2_1,ds");
  CHECK(row.rfind("42,1,1,0,0,0,", 0) == 0);
}
