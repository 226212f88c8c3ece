#include "nkmatch/prf_svm.hpp"

namespace nkmatch::serial {

std::vector<double> decision_values(const SvmModel& model, const PairFeaturizer& featurizer,
                                    std::span<const CandidatePair> pairs) {
  std::vector<double> dis;
  dis.reserve(pairs.size());
  for (const auto& p : pairs) dis.push_back(model.decision(featurizer(p)));
  return dis;
}

}  // namespace nkmatch::serial
