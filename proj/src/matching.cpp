#include "nkmatch/matching.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <string>

#include "nkmatch/error.hpp"

namespace nkmatch {

MatchState::MatchState(std::size_t anon_nodes, std::size_t aux_nodes)
    : anon_flags_(anon_nodes, 0), aux_flags_(aux_nodes, 0) {}

void MatchState::add(NodeId anon, NodeId aux) {
  if (anon >= anon_flags_.size() || aux >= aux_flags_.size()) {
    throw InputError("matched pair (" + std::to_string(anon) + ", " + std::to_string(aux) +
                     ") references an unknown node");
  }
  if (anon_flags_[anon] || aux_flags_[aux]) {
    throw InputError("matched pair (" + std::to_string(anon) + ", " + std::to_string(aux) +
                     ") reuses an already matched node");
  }
  anon_flags_[anon] = 1;
  aux_flags_[aux] = 1;
  pairs_.emplace_back(anon, aux);
}

bool MatchState::is_matched(Side side, NodeId a) const {
  const auto& flags = side == Side::anon ? anon_flags_ : aux_flags_;
  if (a >= flags.size()) throw std::out_of_range("node id out of range");
  return flags[a] != 0;
}

std::size_t MatchState::unmatched(Side side) const {
  const auto& flags = side == Side::anon ? anon_flags_ : aux_flags_;
  return flags.size() - pairs_.size();
}

double popularity_score(const Graph& g, NodeId a, const MatchState& state, Side side) {
  const auto nb = g.neighbors(a);
  std::size_t shared = 0;
  for (NodeId b : nb) shared += state.is_matched(side, b) ? 1 : 0;
  const std::size_t unite = state.size() + nb.size() - shared;
  if (unite == 0) return 0.0;
  return static_cast<double>(shared) / static_cast<double>(unite);
}

namespace {

std::vector<NodeId> top_unmatched(std::span<const double> scores, const MatchState& state, Side side,
                                  std::size_t n_group) {
  std::vector<NodeId> pool;
  pool.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!state.is_matched(side, static_cast<NodeId>(i))) pool.push_back(static_cast<NodeId>(i));
  }
  const std::size_t take = std::min(n_group, pool.size());
  auto before = [&](NodeId x, NodeId y) {
    if (scores[x] != scores[y]) return scores[x] > scores[y];
    return x < y;
  };
  std::partial_sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take), pool.end(), before);
  pool.resize(take);
  return pool;
}

}  // namespace

Groups select_groups(std::span<const double> anon_scores, std::span<const double> aux_scores,
                     const MatchState& state, std::size_t n_group) {
  if (n_group < 1) throw UsageError("group size must be >= 1");
  return {top_unmatched(anon_scores, state, Side::anon, n_group),
          top_unmatched(aux_scores, state, Side::aux, n_group)};
}

constexpr double kTinyNorm = 1e-290;

double cosine_similarity(std::span<const double> va, std::span<const double> vb) {
  if (va.size() != vb.size()) throw UsageError("cosine similarity of vectors with different dimensions");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    dot += va[i] * vb[i];
    na += va[i] * va[i];
    nb += vb[i] * vb[i];
  }
  if (!std::isfinite(na) || !std::isfinite(nb) || na < kTinyNorm || nb < kTinyNorm) {
    // Squares left the normal range; rescale by the largest magnitudes.
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) {
      sa = std::max(sa, std::abs(va[i]));
      sb = std::max(sb, std::abs(vb[i]));
    }
    if (sa == 0.0 || sb == 0.0) return 0.0;
    dot = na = nb = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) {
      const double x = va[i] / sa, y = vb[i] / sb;
      dot += x * y;
      na += x * x;
      nb += y * y;
    }
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  // Rounding can push identical vectors a hair past 1.
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

std::vector<double> transform_similarity(std::span<const double> row) {
  if (row.size() < 2) throw UsageError("similarity transform needs a row of length >= 2");
  const double count = static_cast<double>(row.size());
  const double mx = *std::max_element(row.begin(), row.end());
  const double mean = std::accumulate(row.begin(), row.end(), 0.0) / count;
  double var = 0.0;
  for (double x : row) var += (x - mean) * (x - mean);
  var /= count;

  std::vector<double> out(row.begin(), row.end());
  if (var < kVarianceFloor) return out;
  for (double& x : out) x = mx - (mx - x) / var;
  return out;
}

std::vector<CandidatePair> score_candidates(std::span<const NKFeature> anon_features,
                                            std::span<const NKFeature> aux_features,
                                            const Groups& groups) {
  const std::size_t cols = groups.aux.size();
  const auto rows = static_cast<std::int64_t>(groups.anon.size());
  std::vector<CandidatePair> block(groups.anon.size() * cols);

#pragma omp parallel
  {
    std::vector<double> sims(cols);
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < rows; ++i) {
      const NodeId a = groups.anon[static_cast<std::size_t>(i)];
      for (std::size_t j = 0; j < cols; ++j) {
        sims[j] = cosine_similarity(anon_features[a].raw, aux_features[groups.aux[j]].raw);
      }
      const auto s = cols >= 2 ? transform_similarity(sims) : sims;
      CandidatePair* out = block.data() + static_cast<std::size_t>(i) * cols;
      for (std::size_t j = 0; j < cols; ++j) {
        out[j] = {a, groups.aux[j], sims[j], s[j], 1.0, s[j]};
      }
    }
  }
  return block;
}

void write_similarity_csv(std::ostream& out, const Graph& ga, const Graph& gu, const Groups& groups,
                          std::span<const CandidatePair> block) {
  const std::size_t cols = groups.aux.size();
  out << "anon\\aux";
  for (NodeId b : groups.aux) out << ',' << gu.label(b);
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < groups.anon.size(); ++i) {
    out << ga.label(groups.anon[i]);
    for (std::size_t j = 0; j < cols; ++j) out << ',' << block[i * cols + j].sim;
    out << '\n';
  }
}

}  // namespace nkmatch
