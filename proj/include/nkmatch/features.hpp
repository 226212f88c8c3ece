#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "nkmatch/graph.hpp"

namespace nkmatch {

// Logarithmic degree buckets: bucket i holds degrees in [2^i, 2^(i+1)), the
// last bucket is open-ended and degree 0 falls into bucket 0.
class BinningScheme {
 public:
  explicit BinningScheme(std::size_t bins = 16);

  std::size_t bins() const { return bins_; }
  std::size_t bucket(std::size_t degree) const;
  // Lower degree threshold of each bucket (0, 2, 4, 8, ...).
  std::vector<std::size_t> boundaries() const;
  // Length of the concatenated nK vector: 1 + 2B.
  std::size_t feature_dim() const { return 1 + 2 * bins_; }

 private:
  std::size_t bins_;
};

struct NKFeature {
  std::uint32_t nk0 = 0;
  std::vector<std::uint32_t> nk1;
  std::vector<std::uint32_t> nk2;
  std::vector<double> raw;  // [nk0 | nk1 | nk2]
  double ds = 0.0;
};

// Normalized Shannon entropy of raw / sum(raw), divided by log(dim).
// Zero vector scores 0. Throws UsageError when dim < 2.
double diversity_score(std::span<const double> raw);
inline double diversity_score(const NKFeature& f) { return diversity_score(f.raw); }

NKFeature node_features(const Graph& g, NodeId a, const BinningScheme& scheme);

// One entry per node, OpenMP-parallel over nodes. Output does not depend on
// the thread count.
std::vector<NKFeature> extract_features(const Graph& g, const BinningScheme& scheme);

// CSV: node,nk0,nk1_0..nk1_{B-1},nk2_0..nk2_{B-1},ds with original labels.
void write_feature_csv(std::ostream& out, const Graph& g, std::span<const NKFeature> features);

namespace serial {
std::vector<NKFeature> extract_features(const Graph& g, const BinningScheme& scheme);
}

}  // namespace nkmatch
