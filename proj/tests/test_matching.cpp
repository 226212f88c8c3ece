#include <doctest.h>

#include <cmath>
#include <random>

#include "nkmatch/error.hpp"
#include "nkmatch/matching.hpp"
#include "nkmatch/perturbation.hpp"
#include "oracles.hpp"

using namespace nkmatch;

TEST_CASE("match state bookkeeping") {
  MatchState st(3, 4);
  CHECK(st.size() == 0);
  CHECK(st.unmatched(Side::anon) == 3);
  st.add(0, 2);
  CHECK(st.is_matched(Side::anon, 0));
  CHECK(st.is_matched(Side::aux, 2));
  CHECK_FALSE(st.is_matched(Side::aux, 0));
  CHECK(st.unmatched(Side::aux) == 3);
  CHECK_THROWS_AS(st.add(0, 1), InputError);
  CHECK_THROWS_AS(st.add(1, 2), InputError);
  CHECK_THROWS_AS(st.add(3, 0), InputError);
  CHECK(st.size() == 1);
  st.advance();
  CHECK(st.iteration() == 1);
}

TEST_CASE("popularity score is a Jaccard index") {
  // Node 0 neighbors {1,2,3}; matched anon nodes {1,4}.
  Graph g(5, {{0, 1}, {0, 2}, {0, 3}, {3, 4}});
  MatchState st(5, 5);
  CHECK(popularity_score(g, 0, st, Side::anon) == 0.0);
  st.add(1, 0);
  st.add(4, 1);
  CHECK(popularity_score(g, 0, st, Side::anon) == doctest::Approx(1.0 / 4.0));
  // Aux side matched set is {0,1}; node 2 has neighbor {0}.
  CHECK(popularity_score(g, 2, st, Side::aux) == doctest::Approx(1.0 / 2.0));
  Graph iso(5, {});
  CHECK(popularity_score(iso, 0, MatchState(5, 5), Side::anon) == 0.0);
  CHECK(structure_score(0.5, 0.25, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("group selection takes the top unmatched scores with id tie-break") {
  MatchState st(5, 4);
  st.add(1, 3);
  std::vector<double> sa{0.5, 0.9, 0.5, 0.7, 0.1};
  std::vector<double> su{0.2, 0.2, 0.8, 1.0};
  auto g = select_groups(sa, su, st, 3);
  CHECK(g.anon == std::vector<NodeId>{3, 0, 2});
  CHECK(g.aux == std::vector<NodeId>{2, 0, 1});
  auto all = select_groups(sa, su, st, 100);
  CHECK(all.anon.size() == 4);
  CHECK(all.aux.size() == 3);
  CHECK_THROWS_AS(select_groups(sa, su, st, 0), UsageError);
}

TEST_CASE("cosine similarity") {
  std::vector<double> a{1, 0}, b{1, 1}, z{0, 0};
  CHECK(cosine_similarity(a, b) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(cosine_similarity(a, a) == 1.0);
  CHECK(cosine_similarity(a, z) == 0.0);
  CHECK(cosine_similarity(z, z) == 0.0);
  CHECK_THROWS_AS(cosine_similarity(a, std::vector<double>{1, 2, 3}), UsageError);
  std::vector<double> big{3e200, 4e200}, small{3e-200, 4e-200};
  CHECK(cosine_similarity(big, big) == doctest::Approx(1.0));
  CHECK(cosine_similarity(small, small) == doctest::Approx(1.0));
}

TEST_CASE("similarity transform worked example") {
  std::vector<double> row{0.2, 0.4, 0.9};
  auto s = transform_similarity(row);
  // mean 0.5, population variance 0.26/3.
  const double var = 0.26 / 3.0;
  CHECK(s[0] == doctest::Approx(0.9 - 0.7 / var));
  CHECK(s[1] == doctest::Approx(0.9 - 0.5 / var));
  CHECK(s[0] == doctest::Approx(-7.177).epsilon(1e-3));
  CHECK(s[1] == doctest::Approx(-4.869).epsilon(1e-3));
  CHECK(s[2] == 0.9);
}

TEST_CASE("similarity transform edge cases") {
  std::vector<double> flat{0.3, 0.3, 0.3};
  CHECK(transform_similarity(flat) == flat);
  std::vector<double> tiny{0.5, 0.5 + 1e-6};
  CHECK(transform_similarity(tiny) == tiny);
  CHECK_THROWS_AS(transform_similarity(std::vector<double>{0.4}), UsageError);
}

TEST_CASE("similarity transform preserves row order") {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 300; ++t) {
    std::vector<double> row(3 + t % 50);
    for (auto& x : row) x = u(gen);
    auto s = transform_similarity(row);
    CHECK(oracle::argsort_desc(s) == oracle::argsort_desc(row));
    CHECK(*std::max_element(s.begin(), s.end()) == *std::max_element(row.begin(), row.end()));
  }
}

TEST_CASE("candidate block is row-major and matches the serial path") {
  auto g = generate_synthetic(GraphModel::barabasi_albert, {.n = 300, .m = 3}, 4);
  auto h = perturb(g, {0.1, 5});
  BinningScheme scheme;
  auto fa = extract_features(g, scheme);
  auto fu = extract_features(h, scheme);
  Groups groups;
  for (NodeId i = 0; i < 40; ++i) groups.anon.push_back(i * 7);
  for (NodeId i = 0; i < 30; ++i) groups.aux.push_back(i * 9 + 1);
  auto block = score_candidates(fa, fu, groups);
  auto ref = serial::score_candidates(fa, fu, groups);
  REQUIRE(block.size() == 40 * 30);
  for (std::size_t k = 0; k < block.size(); ++k) {
    CHECK(block[k].a == groups.anon[k / 30]);
    CHECK(block[k].b == groups.aux[k % 30]);
    CHECK(block[k].sim == cosine_similarity(fa[block[k].a].raw, fu[block[k].b].raw));
    CHECK(block[k].s_hat == block[k].s);
    CHECK(block[k].sim >= 0.0);
    CHECK(block[k].sim <= 1.0);
    CHECK(block[k].a == ref[k].a);
    CHECK(block[k].b == ref[k].b);
    CHECK(block[k].sim == ref[k].sim);
    CHECK(block[k].s == ref[k].s);
  }
}

TEST_CASE("single aux column keeps raw similarity") {
  Graph g(3, {{0, 1}, {1, 2}});
  auto f = extract_features(g, BinningScheme{});
  Groups groups{{0, 1}, {2}};
  auto block = score_candidates(f, f, groups);
  REQUIRE(block.size() == 2);
  for (const auto& p : block) CHECK(p.s == p.sim);
}
