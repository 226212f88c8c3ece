#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "nkmatch/error.hpp"
#include "nkmatch/perturbation.hpp"
#include "oracles.hpp"

using namespace nkmatch;

namespace {

std::size_t symmetric_difference(const Graph& a, const Graph& b) {
  auto ea = labeled_edges(a);
  auto eb = labeled_edges(b);
  std::vector<std::pair<Label, Label>> out;
  std::set_symmetric_difference(ea.begin(), ea.end(), eb.begin(), eb.end(), std::back_inserter(out));
  return out.size();
}

Graph complete(std::size_t n) {
  std::vector<Edge> e;
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = a + 1; b < n; ++b) e.push_back({a, b});
  return Graph(n, e);
}

}  // namespace

TEST_CASE("altered edge count rounds noise * M") {
  auto g = oracle::er_graph(30, 0.2, 1);
  const auto m = g.edge_count();
  CHECK(altered_edge_count(g, 0.0) == 0);
  CHECK(altered_edge_count(g, 1.0) == m);
  CHECK(altered_edge_count(g, 0.1) == static_cast<std::size_t>(std::llround(0.1 * m)));
  CHECK_THROWS_AS(altered_edge_count(g, -0.1), UsageError);
  CHECK_THROWS_AS(altered_edge_count(g, 1.5), UsageError);
}

TEST_CASE("perturbation keeps M and alters exactly 2r edges") {
  auto g = generate_synthetic(GraphModel::barabasi_albert, {.n = 200, .m = 3}, 2);
  for (double noise : {0.0, 0.05, 0.25, 0.6}) {
    const auto r = altered_edge_count(g, noise);
    auto h = perturb(g, {noise, 77});
    CHECK(h.node_count() == g.node_count());
    CHECK(h.labels() == g.labels());
    CHECK(h.edge_count() == g.edge_count());
    CHECK(symmetric_difference(g, h) == 2 * r);
  }
}

TEST_CASE("zero noise is the identity and seeds are reproducible") {
  auto g = oracle::er_graph(50, 0.1, 4);
  CHECK(labeled_edges(perturb(g, {0.0, 5})) == labeled_edges(g));
  CHECK(labeled_edges(perturb(g, {0.3, 5})) == labeled_edges(perturb(g, {0.3, 5})));
  CHECK(labeled_edges(perturb(g, {0.3, 5})) != labeled_edges(perturb(g, {0.3, 6})));
}

TEST_CASE("dense graphs use the enumeration path") {
  // 45 possible pairs, 40 present: insertion must enumerate the 5 absent.
  std::vector<Edge> e;
  for (NodeId a = 0; a < 10; ++a)
    for (NodeId b = a + 1; b < 10; ++b)
      if (!(a == 0 && b < 6)) e.push_back({a, b});
  Graph g(10, e);
  CHECK(g.edge_count() == 40);
  auto h = perturb(g, {0.1, 3});
  CHECK(h.edge_count() == 40);
  CHECK(symmetric_difference(g, h) == 8);
}

TEST_CASE("complete graph cannot absorb insertions") {
  auto k5 = complete(5);
  CHECK_THROWS_AS(perturb(k5, {0.2, 1}), InputError);
  CHECK(perturb(k5, {0.0, 1}).edge_count() == 10);
}

TEST_CASE("overlapping pair sizes") {
  auto g = oracle::er_graph(101, 0.05, 8);
  auto pair = generate_overlapping_pair(g, {0.6, 12});
  // shared = 61, remainder 40 split evenly.
  CHECK(pair.truth.size() == 61);
  CHECK(pair.first.node_count() == 81);
  CHECK(pair.second.node_count() == 81);
  for (const auto& [a, b] : pair.truth) {
    CHECK(a == b);
    CHECK(pair.first.find_label(a));
    CHECK(pair.second.find_label(b));
  }

  auto odd = generate_overlapping_pair(g, {0.5, 12});
  // shared = round(50.5) = 51, remainder 50.
  CHECK(odd.truth.size() == 51);
  CHECK(odd.first.node_count() + odd.second.node_count() == 51 * 2 + 50);
  auto g100 = oracle::er_graph(100, 0.05, 8);
  auto extra = generate_overlapping_pair(g100, {0.59, 1});
  // shared 59, remainder 41: the extra private node goes to first.
  CHECK(extra.first.node_count() == 59 + 21);
  CHECK(extra.second.node_count() == 59 + 20);

  auto full = generate_overlapping_pair(g, {1.0, 3});
  CHECK(labeled_edges(full.first) == labeled_edges(g));
  CHECK_THROWS_AS(generate_overlapping_pair(g, {0.0, 3}), UsageError);
}

TEST_CASE("overlap samples are induced subgraphs") {
  auto g = oracle::er_graph(80, 0.1, 21);
  auto pair = generate_overlapping_pair(g, {0.5, 4});
  for (const auto& [u, v] : labeled_edges(pair.first)) {
    CHECK(g.has_edge(*g.find_label(u), *g.find_label(v)));
  }
  for (const auto& [u, v] : labeled_edges(g)) {
    if (pair.first.find_label(u) && pair.first.find_label(v)) {
      CHECK(pair.first.has_edge(*pair.first.find_label(u), *pair.first.find_label(v)));
    }
  }
}

TEST_CASE("anonymize is a structure-preserving bijection") {
  auto g = relabel(oracle::er_graph(40, 0.15, 2), [] {
    std::vector<Label> l;
    for (int i = 0; i < 40; ++i) l.push_back(500 + 3 * i);
    return l;
  }());
  auto anon = anonymize(g, 99);
  CHECK(anon.graph.edge_count() == g.edge_count());
  CHECK_NOTHROW(check_bijection(anon.truth));
  CHECK(anon.truth.size() == 40);
  std::map<Label, Label> to_orig(anon.truth.begin(), anon.truth.end());
  for (const auto& [u, v] : labeled_edges(anon.graph)) {
    CHECK(g.has_edge(*g.find_label(to_orig[u]), *g.find_label(to_orig[v])));
  }
  for (NodeId a = 0; a < 40; ++a) CHECK(anon.graph.label(a) == a);
}

TEST_CASE("ground truth helpers") {
  CHECK_THROWS_AS(check_bijection({{1, 2}, {1, 3}}), InputError);
  CHECK_THROWS_AS(check_bijection({{1, 2}, {3, 2}}), InputError);
  auto c = compose({{0, 10}, {1, 11}, {2, 12}}, {{10, 100}, {12, 102}});
  CHECK(c == GroundTruth{{0, 100}, {2, 102}});

  auto path = std::filesystem::temp_directory_path() / "nkmatch_truth_test.tsv";
  {
    std::ofstream out(path);
    write_truth_tsv(out, {{3, 4}, {-5, 6}}, {"x"});
  }
  CHECK(read_truth_tsv(path) == GroundTruth{{3, 4}, {-5, 6}});
  {
    std::ofstream out(path);
    out << "1\n";
  }
  CHECK_THROWS_AS(read_truth_tsv(path), InputError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_truth_tsv("/nonexistent/truth.tsv"), InputError);
}

TEST_CASE("generators") {
  auto ba = generate_synthetic(GraphModel::barabasi_albert, {.n = 100, .m = 3}, 1);
  CHECK(ba.node_count() == 100);
  CHECK(ba.edge_count() == 294);  // 3 + 97*3
  CHECK(labeled_edges(ba) == labeled_edges(generate_synthetic(GraphModel::barabasi_albert, {.n = 100, .m = 3}, 1)));

  auto er1 = generate_synthetic(GraphModel::erdos_renyi, {.n = 10, .p = 1.0}, 1);
  CHECK(er1.edge_count() == 45);
  CHECK(generate_synthetic(GraphModel::erdos_renyi, {.n = 10, .p = 0.0}, 1).edge_count() == 0);
  // Mean edge count of G(200, 0.05) is 995 with sd about 30.
  auto er = generate_synthetic(GraphModel::erdos_renyi, {.n = 200, .p = 0.05}, 3);
  CHECK(er.edge_count() > 850);
  CHECK(er.edge_count() < 1150);

  auto ws0 = generate_synthetic(GraphModel::watts_strogatz, {.n = 20, .k = 4, .beta = 0.0}, 1);
  CHECK(ws0.edge_count() == 40);
  for (NodeId a = 0; a < 20; ++a) CHECK(ws0.degree(a) == 4);
  auto ws = generate_synthetic(GraphModel::watts_strogatz, {.n = 200, .k = 6, .beta = 0.3}, 1);
  CHECK(ws.edge_count() == 600);

  CHECK_THROWS_AS(generate_synthetic(GraphModel::barabasi_albert, {.n = 3, .m = 3}, 1), UsageError);
  CHECK_THROWS_AS(generate_synthetic(GraphModel::watts_strogatz, {.n = 20, .k = 3}, 1), UsageError);
  CHECK(parse_graph_model("ba") == GraphModel::barabasi_albert);
  CHECK(parse_graph_model("erdos-renyi") == GraphModel::erdos_renyi);
  CHECK_THROWS_AS(parse_graph_model("xyz"), UsageError);
  CHECK(parse_graph_model(to_string(GraphModel::watts_strogatz)) == GraphModel::watts_strogatz);
}
