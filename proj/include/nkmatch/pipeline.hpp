#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nkmatch/features.hpp"
#include "nkmatch/graph.hpp"
#include "nkmatch/matching.hpp"
#include "nkmatch/perturbation.hpp"
#include "nkmatch/prf_svm.hpp"

namespace nkmatch {

struct AttackConfig {
  double c = 2.0;
  std::size_t n_group = 1000;
  std::size_t n_train = 1250;
  double alpha = 1.0;
  std::size_t bins = 16;
  std::size_t prf_max_rounds = 10;
  double prf_stability = 0.01;
  double tau = 0.0;
  double svm_lambda = 1e-3;
  std::size_t svm_max_epochs = 2000;
  std::uint64_t seed = 0;

  // Throws UsageError on out-of-range values.
  void validate() const;
  // "key=value" lines in a fixed order; the basis of config hashes.
  std::string canonical() const;
};

std::uint64_t config_hash(const AttackConfig& cfg);

struct AcceptedMatch {
  NodeId anon = 0;
  NodeId aux = 0;
  Label anon_label = 0;
  Label aux_label = 0;
  double score = 0.0;         // s_hat at acceptance; 1 for seeds
  std::size_t iteration = 0;  // 0 for seeds
  friend bool operator==(const AcceptedMatch&, const AcceptedMatch&) = default;
};

struct IterationSummary {
  std::size_t iteration = 0;
  std::size_t group_a = 0;
  std::size_t group_u = 0;
  std::size_t pairs = 0;
  std::size_t prf_rounds = 0;
  std::size_t accepted = 0;
  friend bool operator==(const IterationSummary&, const IterationSummary&) = default;
};

struct AttackResult {
  std::vector<AcceptedMatch> mapping;
  std::vector<IterationSummary> iterations;
  AttackConfig config;
};

// Hooks for debug dumps; default implementations do nothing.
class AttackObserver {
 public:
  virtual ~AttackObserver() = default;
  virtual void on_features(std::span<const NKFeature> /*anon*/, std::span<const NKFeature> /*aux*/) {}
  virtual void on_iteration(std::size_t /*iteration*/, const Groups& /*groups*/,
                            std::span<const CandidatePair> /*block*/, const PrfResult& /*prf*/) {}
};

using SeedPairs = std::vector<std::pair<NodeId, NodeId>>;

// Full attack: nK features and diversity scores once, then rounds of
// scoring, grouping, similarity ranking, PRF-SVM re-ranking and greedy
// one-to-one extraction until a round accepts nothing.
AttackResult run_attack(const Graph& ga, const Graph& gu, const AttackConfig& cfg, const SeedPairs& seeds = {},
                        AttackObserver* observer = nullptr);

struct Score {
  std::size_t correct = 0;
  std::size_t overlap = 0;  // |V_a ∩ V_u| under the ground truth
  std::size_t accepted = 0;
  double accuracy() const { return overlap == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(overlap); }
  double precision() const { return accepted == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(accepted); }
};

Score score_mapping(const AttackResult& result, const GroundTruth& truth, const Graph& ga, const Graph& gu);

// N_cor / |V_a ∩ V_u|; 0 for an empty overlap.
inline double accuracy(const AttackResult& result, const GroundTruth& truth, const Graph& ga, const Graph& gu) {
  return score_mapping(result, truth, ga, gu).accuracy();
}

// Seed pairs given in labels -> node ids; throws InputError on unknown labels.
SeedPairs seeds_from_labels(const GroundTruth& labels, const Graph& ga, const Graph& gu);

void write_mapping_tsv(std::ostream& out, const AttackResult& result, const std::vector<std::string>& header = {});
void write_iteration_csv(std::ostream& out, const AttackResult& result, const std::vector<std::string>& header = {});

}  // namespace nkmatch
