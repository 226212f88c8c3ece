#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "nkmatch/prf_svm.hpp"

namespace fixture {

// Two uniform disks of the given radius, `per_class` points each, labeled +1
// around (0,0) and -1 around (10,10).
inline nkmatch::LabeledData blobs(std::uint32_t seed, std::size_t per_class = 50, double radius = 1.0) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  nkmatch::LabeledData data{nkmatch::FeatureMatrix(2), {}};
  for (int cls = 0; cls < 2; ++cls) {
    const double cx = cls == 0 ? 0.0 : 10.0;
    for (std::size_t i = 0; i < per_class; ++i) {
      const double r = radius * std::sqrt(u(gen));
      const double t = 2.0 * M_PI * u(gen);
      auto row = data.x.append_row();
      row[0] = cx + r * std::cos(t);
      row[1] = cx + r * std::sin(t);
      data.y.push_back(cls == 0 ? 1 : -1);
    }
  }
  return data;
}

inline double training_accuracy(const nkmatch::SvmModel& model, const nkmatch::LabeledData& data) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < data.x.rows(); ++i) {
    const double d = model.decision(data.x.row(i));
    ok += (d > 0.0 ? 1 : -1) == data.y[i];
  }
  return static_cast<double>(ok) / static_cast<double>(data.x.rows());
}

}  // namespace fixture
