#include "nkmatch/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "nkmatch/error.hpp"

namespace nkmatch {

BinningScheme::BinningScheme(std::size_t bins) : bins_(bins) {
  if (bins < 1 || bins > 63) throw UsageError("bin count must be in [1, 63]");
}

std::size_t BinningScheme::bucket(std::size_t degree) const {
  if (degree <= 1) return 0;
  const auto b = static_cast<std::size_t>(std::bit_width(degree) - 1);
  return std::min(b, bins_ - 1);
}

std::vector<std::size_t> BinningScheme::boundaries() const {
  std::vector<std::size_t> out(bins_);
  out[0] = 0;
  for (std::size_t i = 1; i < bins_; ++i) out[i] = std::size_t{1} << i;
  return out;
}

double diversity_score(std::span<const double> raw) {
  if (raw.size() < 2) throw UsageError("diversity score needs a vector of dimension >= 2");
  double total = 0.0;
  for (double x : raw) total += x;
  if (total <= 0.0) return 0.0;

  double h = 0.0;
  for (double x : raw) {
    if (x > 0.0) {
      const double p = x / total;
      h -= p * std::log(p);
    }
  }
  const double ds = h / std::log(static_cast<double>(raw.size()));
  constexpr double kDrift = 1e-12;
  if (ds < 0.0 && ds > -kDrift) return 0.0;
  if (ds > 1.0 && ds < 1.0 + kDrift) return 1.0;
  return ds;
}

NKFeature node_features(const Graph& g, NodeId a, const BinningScheme& scheme) {
  const std::size_t bins = scheme.bins();
  NKFeature f;
  f.nk0 = static_cast<std::uint32_t>(g.degree(a));
  f.nk1.assign(bins, 0);
  f.nk2.assign(bins, 0);
  for (NodeId b : g.neighbors(a)) ++f.nk1[scheme.bucket(g.degree(b))];
  for (NodeId c : k_hop_frontier(g, a, 2)) ++f.nk2[scheme.bucket(g.degree(c))];

  f.raw.reserve(scheme.feature_dim());
  f.raw.push_back(f.nk0);
  f.raw.insert(f.raw.end(), f.nk1.begin(), f.nk1.end());
  f.raw.insert(f.raw.end(), f.nk2.begin(), f.nk2.end());
  f.ds = diversity_score(f.raw);
  return f;
}

std::vector<NKFeature> extract_features(const Graph& g, const BinningScheme& scheme) {
  const auto n = static_cast<std::int64_t>(g.node_count());
  const std::size_t bins = scheme.bins();
  std::vector<NKFeature> out(static_cast<std::size_t>(n));
#pragma omp parallel
  {
    // Per-thread visit marks: seen[x] == a + 1 once x is within 1 hop of a.
    std::vector<std::uint32_t> seen(static_cast<std::size_t>(n), 0);
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
      const auto a = static_cast<NodeId>(i);
      const auto mark = static_cast<std::uint32_t>(a + 1);
      auto& f = out[static_cast<std::size_t>(i)];
      f.nk0 = static_cast<std::uint32_t>(g.degree(a));
      f.nk1.assign(bins, 0);
      f.nk2.assign(bins, 0);
      seen[a] = mark;
      for (NodeId b : g.neighbors(a)) {
        seen[b] = mark;
        ++f.nk1[scheme.bucket(g.degree(b))];
      }
      for (NodeId b : g.neighbors(a)) {
        for (NodeId c : g.neighbors(b)) {
          if (seen[c] == mark) continue;
          seen[c] = mark;
          ++f.nk2[scheme.bucket(g.degree(c))];
        }
      }
      f.raw.reserve(scheme.feature_dim());
      f.raw.push_back(f.nk0);
      f.raw.insert(f.raw.end(), f.nk1.begin(), f.nk1.end());
      f.raw.insert(f.raw.end(), f.nk2.begin(), f.nk2.end());
      f.ds = diversity_score(f.raw);
    }
  }
  return out;
}

void write_feature_csv(std::ostream& out, const Graph& g, std::span<const NKFeature> features) {
  const std::size_t bins = features.empty() ? 0 : features.front().nk1.size();
  out << "node,nk0";
  for (std::size_t i = 0; i < bins; ++i) out << ",nk1_" << i;
  for (std::size_t i = 0; i < bins; ++i) out << ",nk2_" << i;
  out << ",ds\n";
  out << std::setprecision(17);
  for (std::size_t a = 0; a < features.size(); ++a) {
    const auto& f = features[a];
    out << g.label(static_cast<NodeId>(a)) << ',' << f.nk0;
    for (auto c : f.nk1) out << ',' << c;
    for (auto c : f.nk2) out << ',' << c;
    out << ',' << f.ds << '\n';
  }
}

}  // namespace nkmatch
