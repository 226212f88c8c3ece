#include "nkmatch/matching.hpp"

namespace nkmatch::serial {

std::vector<CandidatePair> score_candidates(std::span<const NKFeature> anon_features,
                                            std::span<const NKFeature> aux_features,
                                            const Groups& groups) {
  std::vector<CandidatePair> block;
  block.reserve(groups.anon.size() * groups.aux.size());
  std::vector<double> sims;
  for (NodeId a : groups.anon) {
    sims.clear();
    for (NodeId b : groups.aux) sims.push_back(cosine_similarity(anon_features[a].raw, aux_features[b].raw));
    const auto s = sims.size() >= 2 ? transform_similarity(sims) : sims;
    for (std::size_t j = 0; j < groups.aux.size(); ++j) {
      block.push_back({a, groups.aux[j], sims[j], s[j], 1.0, s[j]});
    }
  }
  return block;
}

}  // namespace nkmatch::serial
