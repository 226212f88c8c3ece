#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "nkmatch/features.hpp"
#include "nkmatch/matching.hpp"

namespace nkmatch {

// Dense row-major sample matrix.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(std::size_t dim = 0) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t rows() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  std::span<double> append_row();

 private:
  std::size_t dim_;
  std::vector<double> data_;
};

struct LabeledData {
  FeatureMatrix x;
  std::vector<int> y;  // +1 matched, -1 unmatched
};

struct SvmHyper {
  double lambda = 1e-3;
  std::size_t max_epochs = 2000;
  // Stop once the duality gap falls below this fraction of the primal value.
  double gap_tolerance = 1e-6;
  std::uint64_t seed = 0;
};

// Linear decision function w.x + bias over raw (unstandardized) features.
struct SvmModel {
  std::vector<double> w;
  double bias = 0.0;
  SvmHyper hyper;
  // Primal objective (lambda/2)|w|^2 + mean hinge reached on the
  // standardized training problem, and the passes it took.
  double objective = 0.0;
  std::size_t epochs_run = 0;

  double decision(std::span<const double> x) const;
};

// Soft-margin linear SVM. Inputs are standardized per feature, the bias is a
// constant extra feature, and the dual is solved by coordinate ascent over a
// seeded random permutation each pass. Weights are mapped back to raw input
// space before returning. Throws UsageError on single-class or non-finite input.
SvmModel train_svm(const LabeledData& data, const SvmHyper& hyper);

// Text dump: dimension, bias, then one weight per line, 17 significant digits.
void write_model(std::ostream& out, const SvmModel& model);

// Pair representation consumed by the classifier:
// [ |p(a) - p(b)| (1+2B entries, p = simplex-normalized nK) | sim | |DS(a)-DS(b)| ].
class PairFeaturizer {
 public:
  PairFeaturizer(std::span<const NKFeature> anon, std::span<const NKFeature> aux);

  std::size_t dim() const { return dim_ + 2; }
  void fill(const CandidatePair& pair, std::span<double> out) const;
  std::vector<double> operator()(const CandidatePair& pair) const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> anon_p_, aux_p_;
  std::vector<double> anon_ds_, aux_ds_;
};

// Descending by `key`, ties by (a, b) ascending.
void sort_by_s(std::vector<CandidatePair>& pairs);
void sort_by_s_hat(std::vector<CandidatePair>& pairs);

struct TrainingSelection {
  std::vector<std::size_t> positives;  // indices into the ranked pair list
  std::vector<std::size_t> negatives;
};

// Top n_train of a ranked list labeled matched, bottom n_train unmatched;
// shrinks to floor(count/2) per side when the ends would overlap.
TrainingSelection build_training_set(std::size_t ranked_count, std::size_t n_train);
LabeledData materialize(const TrainingSelection& sel, std::span<const CandidatePair> ranked,
                        const PairFeaturizer& featurizer);

// Decision values for every pair, OpenMP-parallel.
std::vector<double> decision_values(const SvmModel& model, const PairFeaturizer& featurizer,
                                    std::span<const CandidatePair> pairs);

// conf = (|dis| - d_min) / (d_max - d_min) over the given set; 1 everywhere if
// the spread is below 1e-12.
std::vector<double> confidence(std::span<const double> dis);

// s_hat = s * conf^alpha (0^0 = 1), then sort by s_hat.
void rerank(std::vector<CandidatePair>& pairs, double alpha);

struct PrfConfig {
  std::size_t n_train = 1250;
  double alpha = 1.0;
  std::size_t max_rounds = 10;
  double stability = 0.01;  // fraction of pairs whose label may flip at convergence
  SvmHyper svm;
};

struct PrfResult {
  std::vector<CandidatePair> ranked;  // sorted by s_hat; dis > 0 marks matched
  std::size_t rounds = 0;
  SvmModel model;                     // last round
};

// Training sets come from the previous round's ranking (s on round one);
// s_hat always multiplies the original s.
PrfResult prf_loop(std::vector<CandidatePair> pairs, const PairFeaturizer& featurizer, const PrfConfig& cfg);

namespace serial {
std::vector<double> decision_values(const SvmModel& model, const PairFeaturizer& featurizer,
                                    std::span<const CandidatePair> pairs);
}

}  // namespace nkmatch
