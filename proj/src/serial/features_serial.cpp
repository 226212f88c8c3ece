// Single-threaded reference for extract_features.
#include <cstdint>
#include <limits>

#include "nkmatch/features.hpp"

namespace nkmatch::serial {

std::vector<NKFeature> extract_features(const Graph& g, const BinningScheme& scheme) {
  const std::size_t n = g.node_count();
  const std::size_t bins = scheme.bins();
  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> stamp(n, kNone);  // node a that last visited it

  std::vector<NKFeature> out(n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto id = static_cast<NodeId>(a);
    auto& f = out[a];
    f.nk0 = static_cast<std::uint32_t>(g.degree(id));
    f.nk1.assign(bins, 0);
    f.nk2.assign(bins, 0);

    stamp[a] = static_cast<std::uint32_t>(a);
    for (NodeId b : g.neighbors(id)) {
      stamp[b] = static_cast<std::uint32_t>(a);
      ++f.nk1[scheme.bucket(g.degree(b))];
    }
    for (NodeId b : g.neighbors(id)) {
      for (NodeId c : g.neighbors(b)) {
        if (stamp[c] == a) continue;
        stamp[c] = static_cast<std::uint32_t>(a);
        ++f.nk2[scheme.bucket(g.degree(c))];
      }
    }

    f.raw.reserve(scheme.feature_dim());
    f.raw.push_back(f.nk0);
    f.raw.insert(f.raw.end(), f.nk1.begin(), f.nk1.end());
    f.raw.insert(f.raw.end(), f.nk2.begin(), f.nk2.end());
    f.ds = diversity_score(f.raw);
  }
  return out;
}

}  // namespace nkmatch::serial
