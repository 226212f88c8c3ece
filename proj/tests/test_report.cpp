#include <doctest.h>

#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "nkmatch/error.hpp"
#include "nkmatch/perturbation.hpp"
#include "nkmatch/report.hpp"

using namespace nkmatch;

namespace {

AttackConfig quick() {
  AttackConfig cfg;
  cfg.n_group = 60;
  cfg.n_train = 200;
  cfg.prf_max_rounds = 3;
  cfg.seed = 17;
  return cfg;
}

std::string render(void (*writer)(std::ostream&, const RunReport&), const RunReport& r) {
  std::ostringstream out;
  writer(out, r);
  return out.str();
}

}  // namespace

TEST_CASE("provenance line") {
  auto line = provenance_line("a=1\n", 42);
  CHECK(std::regex_match(line, std::regex("nkmatch 0\\.1\\.0 config=[0-9a-f]{16} seed=42")));
  CHECK(line != provenance_line("a=2\n", 42));
}

TEST_CASE("instance construction") {
  auto base = generate_synthetic(GraphModel::barabasi_albert, {.n = 120, .m = 3}, 3);
  auto inst = make_instance(base, 0.1, std::nullopt, 5);
  CHECK(inst.anon.node_count() == 120);
  CHECK(inst.aux.edge_count() == base.edge_count());
  CHECK(inst.altered_anon == altered_edge_count(base, 0.1));
  CHECK(inst.truth.size() == 120);
  CHECK_NOTHROW(check_bijection(inst.truth));

  auto clean = make_instance(base, 0.0, std::nullopt, 5);
  // Noise-free: the truth maps anon edges exactly onto aux edges.
  std::map<Label, Label> t(clean.truth.begin(), clean.truth.end());
  std::set<std::pair<Label, Label>> mapped;
  for (auto [u, v] : labeled_edges(clean.anon)) mapped.insert(std::minmax(t[u], t[v]));
  auto aux_edges = labeled_edges(clean.aux);
  CHECK(std::set<std::pair<Label, Label>>(aux_edges.begin(), aux_edges.end()) == mapped);

  auto part = make_instance(base, 0.05, 0.5, 5);
  CHECK(part.truth.size() == 60);
  CHECK(part.anon.node_count() == 90);
}

TEST_CASE("sweep spec validation") {
  CHECK_THROWS_AS((SweepSpec{{}, 1, {}}).validate(), UsageError);
  CHECK_THROWS_AS((SweepSpec{{0.1, 1.2}, 1, {}}).validate(), UsageError);
  CHECK_THROWS_AS((SweepSpec{{0.1}, 0, {}}).validate(), UsageError);
  CHECK_THROWS_AS((SweepSpec{{0.1}, 1, 0.0}).validate(), UsageError);
  CHECK_NOTHROW((SweepSpec{{0.0, 1.0}, 2, 1.0}).validate());
}

TEST_CASE("sweep is reproducible and well-formed") {
  auto base = generate_synthetic(GraphModel::barabasi_albert, {.n = 120, .m = 3}, 3);
  SweepSpec spec{{0.0, 0.1}, 2, std::nullopt};
  std::size_t calls = 0;
  auto r1 = run_sweep(base, spec, quick(), [&](const SweepRun&) { ++calls; });
  auto r2 = run_sweep(base, spec, quick());
  CHECK(calls == 4);
  REQUIRE(r1.runs.size() == 4);
  CHECK(r1.summaries.size() == 2);
  CHECK(r1.runs[2].noise == 0.1);
  CHECK(r1.runs[3].repeat == 1);
  CHECK(r1.runs[0].run_seed != r1.runs[1].run_seed);
  CHECK(render(write_sweep_csv, r1) == render(write_sweep_csv, r2));
  CHECK(render(write_sweep_svg, r1) == render(write_sweep_svg, r2));

  const double m0 = (r1.runs[0].score.accuracy() + r1.runs[1].score.accuracy()) / 2;
  CHECK(r1.summaries[0].mean == doctest::Approx(m0));
  CHECK(r1.summaries[0].stddev >= 0.0);

  auto csv = render(write_sweep_csv, r1);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# nkmatch 0.1.0 config=", 0) == 0);
  std::getline(in, line);
  CHECK(line == "kind,noise,repeat,run_seed,accepted,correct,overlap,accuracy,stddev");
  std::size_t runs = 0, summaries = 0;
  while (std::getline(in, line)) {
    runs += line.rfind("run,", 0) == 0;
    summaries += line.rfind("summary,", 0) == 0;
  }
  CHECK(runs == 4);
  CHECK(summaries == 2);

  auto svg = render(write_sweep_svg, r1);
  CHECK(svg.rfind("<!-- nkmatch 0.1.0 config=", 0) == 0);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);

  auto other = quick();
  other.seed = 18;
  auto r3 = run_sweep(base, spec, other);
  CHECK(render(write_sweep_csv, r3) != render(write_sweep_csv, r1));
}

TEST_CASE("sweep errors propagate") {
  // K_5 has no room for insertions at noise 0.5.
  std::vector<Edge> e;
  for (NodeId a = 0; a < 5; ++a)
    for (NodeId b = a + 1; b < 5; ++b) e.push_back({a, b});
  Graph k5(5, e);
  CHECK_THROWS_AS(run_sweep(k5, {{0.5}, 1, {}}, quick()), InputError);
}
