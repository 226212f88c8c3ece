#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "nkmatch/features.hpp"
#include "nkmatch/graph.hpp"

namespace nkmatch {

enum class Side { anon, aux };

// Matched (anon, aux) pairs accepted so far, kept one-to-one.
class MatchState {
 public:
  MatchState(std::size_t anon_nodes, std::size_t aux_nodes);

  // Throws InputError if either endpoint is already matched or out of range.
  void add(NodeId anon, NodeId aux);

  bool is_matched(Side side, NodeId a) const;
  std::size_t size() const { return pairs_.size(); }
  std::size_t unmatched(Side side) const;
  const std::vector<std::pair<NodeId, NodeId>>& pairs() const { return pairs_; }

  std::size_t iteration() const { return iteration_; }
  void advance() { ++iteration_; }

 private:
  std::vector<std::pair<NodeId, NodeId>> pairs_;
  std::vector<char> anon_flags_;
  std::vector<char> aux_flags_;
  std::size_t iteration_ = 0;
};

// Jaccard similarity of N(a) and the state's matched nodes on `side`.
double popularity_score(const Graph& g, NodeId a, const MatchState& state, Side side);

inline double structure_score(double ds, double ps, double c) { return ds + c * ps; }

struct Groups {
  std::vector<NodeId> anon;
  std::vector<NodeId> aux;
};

// Top n_group unmatched nodes per side by score, ties by ascending id.
Groups select_groups(std::span<const double> anon_scores, std::span<const double> aux_scores,
                     const MatchState& state, std::size_t n_group);

// Cosine of the angle between va and vb; 0 when either is the zero vector.
double cosine_similarity(std::span<const double> va, std::span<const double> vb);

inline constexpr double kVarianceFloor = 1e-9;

// Spread amplification of one similarity row: mx - (mx - sim) / var, with the
// population variance. Rows with variance below kVarianceFloor pass through.
std::vector<double> transform_similarity(std::span<const double> row);

struct CandidatePair {
  NodeId a = 0;
  NodeId b = 0;
  double sim = 0.0;
  double s = 0.0;
  double conf = 1.0;
  double s_hat = 0.0;
  double dis = 0.0;  // classifier decision value; > 0 means matched
};

// Row-major |anon| x |aux| block of candidate pairs with sim and s filled in
// (s_hat initialised to s). OpenMP-parallel over rows.
std::vector<CandidatePair> score_candidates(std::span<const NKFeature> anon_features,
                                            std::span<const NKFeature> aux_features,
                                            const Groups& groups);

// Similarity matrix as CSV with anon labels as rows and aux labels as columns.
void write_similarity_csv(std::ostream& out, const Graph& ga, const Graph& gu, const Groups& groups,
                          std::span<const CandidatePair> block);

namespace serial {
std::vector<CandidatePair> score_candidates(std::span<const NKFeature> anon_features,
                                            std::span<const NKFeature> aux_features,
                                            const Groups& groups);
}

}  // namespace nkmatch
