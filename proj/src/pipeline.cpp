#include "nkmatch/pipeline.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "nkmatch/error.hpp"
#include "nkmatch/rng.hpp"

namespace nkmatch {

void AttackConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw UsageError(what);
  };
  require(std::isfinite(c) && c >= 0.0, "c must be a finite value >= 0");
  require(n_group >= 1, "n_group must be >= 1");
  require(n_train >= 1, "n_train must be >= 1");
  require(std::isfinite(alpha) && alpha >= 0.0, "alpha must be >= 0");
  require(bins >= 1 && bins <= 63, "bins must be in [1, 63]");
  require(prf_max_rounds >= 1, "prf max rounds must be >= 1");
  require(prf_stability >= 0.0 && prf_stability <= 1.0, "prf stability must lie in [0, 1]");
  require(std::isfinite(tau) && tau >= 0.0, "tau must be >= 0");
  require(svm_lambda > 0.0, "svm lambda must be > 0");
  require(svm_max_epochs >= 1, "svm epochs must be >= 1");
}

std::string AttackConfig::canonical() const {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "c=" << c << '\n'
      << "n_group=" << n_group << '\n'
      << "n_train=" << n_train << '\n'
      << "alpha=" << alpha << '\n'
      << "bins=" << bins << '\n'
      << "prf_max_rounds=" << prf_max_rounds << '\n'
      << "prf_stability=" << prf_stability << '\n'
      << "tau=" << tau << '\n'
      << "svm_lambda=" << svm_lambda << '\n'
      << "svm_max_epochs=" << svm_max_epochs << '\n'
      << "seed=" << seed << '\n';
  return out.str();
}

std::uint64_t config_hash(const AttackConfig& cfg) { return fnv1a64(cfg.canonical()); }

namespace {

std::vector<double> side_scores(const Graph& g, std::span<const NKFeature> features, const MatchState& state,
                                Side side, double c) {
  std::vector<double> scores(g.node_count());
  for (std::size_t a = 0; a < scores.size(); ++a) {
    const double ps = state.size() == 0 ? 0.0 : popularity_score(g, static_cast<NodeId>(a), state, side);
    scores[a] = structure_score(features[a].ds, ps, c);
  }
  return scores;
}

}  // namespace

AttackResult run_attack(const Graph& ga, const Graph& gu, const AttackConfig& cfg, const SeedPairs& seeds,
                        AttackObserver* observer) {
  cfg.validate();
  if (ga.node_count() == 0 || gu.node_count() == 0) throw InputError("attack needs two non-empty graphs");

  AttackResult result;
  result.config = cfg;
  MatchState state(ga.node_count(), gu.node_count());
  for (const auto& [a, b] : seeds) {
    state.add(a, b);
    result.mapping.push_back({a, b, ga.label(a), gu.label(b), 1.0, 0});
  }

  const BinningScheme scheme(cfg.bins);
  const auto fa = extract_features(ga, scheme);
  const auto fu = extract_features(gu, scheme);
  if (observer) observer->on_features(fa, fu);
  const PairFeaturizer featurizer(fa, fu);

  PrfConfig prf_cfg;
  prf_cfg.n_train = cfg.n_train;
  prf_cfg.alpha = cfg.alpha;
  prf_cfg.max_rounds = cfg.prf_max_rounds;
  prf_cfg.stability = cfg.prf_stability;
  prf_cfg.svm.lambda = cfg.svm_lambda;
  prf_cfg.svm.max_epochs = cfg.svm_max_epochs;

  while (state.unmatched(Side::anon) > 0 && state.unmatched(Side::aux) > 0) {
    const std::size_t iteration = state.iteration() + 1;
    const auto groups = select_groups(side_scores(ga, fa, state, Side::anon, cfg.c),
                                      side_scores(gu, fu, state, Side::aux, cfg.c), state, cfg.n_group);
    // A one-column block has no variance to rank by.
    if (groups.aux.size() < 2 || groups.anon.empty()) break;

    auto block = score_candidates(fa, fu, groups);
    prf_cfg.svm.seed = derive_seed(cfg.seed, {iteration});
    auto prf = prf_loop(block, featurizer, prf_cfg);
    if (observer) observer->on_iteration(iteration, groups, block, prf);

    IterationSummary summary{iteration, groups.anon.size(), groups.aux.size(), block.size(), prf.rounds, 0};
    for (const auto& p : prf.ranked) {
      if (p.dis <= 0.0 || p.s_hat < cfg.tau) continue;
      if (state.is_matched(Side::anon, p.a) || state.is_matched(Side::aux, p.b)) continue;
      state.add(p.a, p.b);
      result.mapping.push_back({p.a, p.b, ga.label(p.a), gu.label(p.b), p.s_hat, iteration});
      ++summary.accepted;
    }
    result.iterations.push_back(summary);
    state.advance();
    if (summary.accepted == 0) break;
  }
  return result;
}

Score score_mapping(const AttackResult& result, const GroundTruth& truth, const Graph& ga, const Graph& gu) {
  std::unordered_map<Label, Label> expected;
  Score score;
  for (const auto& [a, b] : truth) {
    if (ga.find_label(a) && gu.find_label(b)) {
      expected.emplace(a, b);
      ++score.overlap;
    }
  }
  score.accepted = result.mapping.size();
  for (const auto& m : result.mapping) {
    auto it = expected.find(m.anon_label);
    if (it != expected.end() && it->second == m.aux_label) ++score.correct;
  }
  return score;
}

SeedPairs seeds_from_labels(const GroundTruth& labels, const Graph& ga, const Graph& gu) {
  SeedPairs out;
  for (const auto& [a, b] : labels) {
    auto ia = ga.find_label(a);
    auto ib = gu.find_label(b);
    if (!ia) throw InputError("seed references unknown anon label " + std::to_string(a));
    if (!ib) throw InputError("seed references unknown aux label " + std::to_string(b));
    out.emplace_back(*ia, *ib);
  }
  return out;
}

void write_mapping_tsv(std::ostream& out, const AttackResult& result, const std::vector<std::string>& header) {
  for (const auto& h : header) out << "# " << h << '\n';
  out << "# anon_label\taux_label\tscore\n" << std::setprecision(17);
  for (const auto& m : result.mapping) out << m.anon_label << '\t' << m.aux_label << '\t' << m.score << '\n';
}

void write_iteration_csv(std::ostream& out, const AttackResult& result, const std::vector<std::string>& header) {
  for (const auto& h : header) out << "# " << h << '\n';
  out << "iter,group_a,group_u,pairs,prf_rounds,accepted\n";
  for (const auto& it : result.iterations) {
    out << it.iteration << ',' << it.group_a << ',' << it.group_u << ',' << it.pairs << ',' << it.prf_rounds << ','
        << it.accepted << '\n';
  }
}

}  // namespace nkmatch
