#include "nkmatch/prf_svm.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <string>

#include "nkmatch/error.hpp"
#include "nkmatch/rng.hpp"

namespace nkmatch {

std::span<double> FeatureMatrix::append_row() {
  data_.resize(data_.size() + dim_, 0.0);
  return row(rows() - 1);
}

double SvmModel::decision(std::span<const double> x) const {
  double v = bias;
  for (std::size_t j = 0; j < w.size(); ++j) v += w[j] * x[j];
  return v;
}

SvmModel train_svm(const LabeledData& data, const SvmHyper& hyper) {
  const std::size_t n = data.x.rows();
  const std::size_t d = data.x.dim();
  if (data.y.size() != n) throw UsageError("label count does not match sample count");
  if (!(hyper.lambda > 0.0)) throw UsageError("SVM regularization lambda must be positive");
  bool has_pos = false, has_neg = false;
  for (int label : data.y) {
    if (label == 1) has_pos = true;
    else if (label == -1) has_neg = true;
    else throw UsageError("SVM labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) throw UsageError("SVM training needs both classes");
  for (std::size_t i = 0; i < n; ++i) {
    for (double v : data.x.row(i)) {
      if (!std::isfinite(v)) throw UsageError("non-finite value in SVM training features");
    }
  }

  // Standardize; the trailing column is the constant bias feature.
  std::vector<double> mean(d, 0.0), scale(d, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = data.x.row(i);
    for (std::size_t j = 0; j < d; ++j) mean[j] += x[j];
  }
  for (auto& m : mean) m /= static_cast<double>(n);
  for (std::size_t j = 0; j < d; ++j) {
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = data.x.row(i)[j] - mean[j];
      var += c * c;
    }
    const double sd = std::sqrt(var / static_cast<double>(n));
    if (sd > 1e-12) scale[j] = sd;
  }
  const std::size_t da = d + 1;
  std::vector<double> z(n * da);
  std::vector<double> q(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = data.x.row(i);
    double* zi = z.data() + i * da;
    for (std::size_t j = 0; j < d; ++j) zi[j] = (x[j] - mean[j]) / scale[j];
    zi[d] = 1.0;
    for (std::size_t j = 0; j < da; ++j) q[i] += zi[j] * zi[j];
  }

  const double lambda_n = hyper.lambda * static_cast<double>(n);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> w(da, 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(hyper.seed);

  auto dot = [&](std::size_t i) {
    const double* zi = z.data() + i * da;
    double v = 0.0;
    for (std::size_t j = 0; j < da; ++j) v += w[j] * zi[j];
    return v;
  };
  auto primal = [&] {
    double reg = 0.0, loss = 0.0;
    for (double v : w) reg += v * v;
    for (std::size_t i = 0; i < n; ++i) loss += std::max(0.0, 1.0 - data.y[i] * dot(i));
    return 0.5 * hyper.lambda * reg + loss / static_cast<double>(n);
  };

  SvmModel model;
  model.hyper = hyper;
  double objective = primal();
  std::size_t epoch = 0;
  while (epoch < hyper.max_epochs) {
    ++epoch;
    rng.shuffle(order);
    for (std::size_t i : order) {
      const double y = data.y[i];
      const double grad = y * dot(i) - 1.0;
      const double next = std::clamp(alpha[i] - grad * lambda_n / q[i], 0.0, 1.0);
      const double step = next - alpha[i];
      if (step == 0.0) continue;
      alpha[i] = next;
      const double* zi = z.data() + i * da;
      const double c = step * y / lambda_n;
      for (std::size_t j = 0; j < da; ++j) w[j] += c * zi[j];
    }
    objective = primal();
    double reg = 0.0;
    for (double v : w) reg += v * v;
    const double dual =
        std::accumulate(alpha.begin(), alpha.end(), 0.0) / static_cast<double>(n) - 0.5 * hyper.lambda * reg;
    if (objective - dual <= hyper.gap_tolerance * std::abs(objective)) break;
  }
  model.objective = objective;
  model.epochs_run = epoch;

  model.w.resize(d);
  model.bias = w[d];
  for (std::size_t j = 0; j < d; ++j) {
    model.w[j] = w[j] / scale[j];
    model.bias -= model.w[j] * mean[j];
  }
  return model;
}

void write_model(std::ostream& out, const SvmModel& model) {
  out << std::setprecision(17);
  out << model.w.size() << '\n' << model.bias << '\n';
  for (double v : model.w) out << v << '\n';
}

PairFeaturizer::PairFeaturizer(std::span<const NKFeature> anon, std::span<const NKFeature> aux) {
  const auto pick_dim = [](std::span<const NKFeature> fs) { return fs.empty() ? 0 : fs.front().raw.size(); };
  dim_ = std::max(pick_dim(anon), pick_dim(aux));
  auto normalize = [this](std::span<const NKFeature> fs, std::vector<double>& p, std::vector<double>& ds) {
    p.assign(fs.size() * dim_, 0.0);
    ds.resize(fs.size());
    for (std::size_t i = 0; i < fs.size(); ++i) {
      if (fs[i].raw.size() != dim_) throw UsageError("feature vectors of different dimensions");
      const double total = std::accumulate(fs[i].raw.begin(), fs[i].raw.end(), 0.0);
      if (total > 0.0) {
        for (std::size_t j = 0; j < dim_; ++j) p[i * dim_ + j] = fs[i].raw[j] / total;
      }
      ds[i] = fs[i].ds;
    }
  };
  normalize(anon, anon_p_, anon_ds_);
  normalize(aux, aux_p_, aux_ds_);
}

void PairFeaturizer::fill(const CandidatePair& pair, std::span<double> out) const {
  const double* pa = anon_p_.data() + static_cast<std::size_t>(pair.a) * dim_;
  const double* pb = aux_p_.data() + static_cast<std::size_t>(pair.b) * dim_;
  for (std::size_t j = 0; j < dim_; ++j) out[j] = std::abs(pa[j] - pb[j]);
  out[dim_] = pair.sim;
  out[dim_ + 1] = std::abs(anon_ds_[pair.a] - aux_ds_[pair.b]);
}

std::vector<double> PairFeaturizer::operator()(const CandidatePair& pair) const {
  std::vector<double> out(dim());
  fill(pair, out);
  return out;
}

namespace {

template <auto Key>
void sort_pairs(std::vector<CandidatePair>& pairs) {
  std::sort(pairs.begin(), pairs.end(), [](const CandidatePair& x, const CandidatePair& y) {
    if (x.*Key != y.*Key) return x.*Key > y.*Key;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });
}

}  // namespace

void sort_by_s(std::vector<CandidatePair>& pairs) { sort_pairs<&CandidatePair::s>(pairs); }
void sort_by_s_hat(std::vector<CandidatePair>& pairs) { sort_pairs<&CandidatePair::s_hat>(pairs); }

TrainingSelection build_training_set(std::size_t ranked_count, std::size_t n_train) {
  if (ranked_count < 2) throw UsageError("training set needs at least 2 candidate pairs");
  if (n_train < 1) throw UsageError("n_train must be >= 1");
  const std::size_t take = std::min(n_train, ranked_count / 2);
  TrainingSelection sel;
  for (std::size_t i = 0; i < take; ++i) {
    sel.positives.push_back(i);
    sel.negatives.push_back(ranked_count - 1 - i);
  }
  return sel;
}

LabeledData materialize(const TrainingSelection& sel, std::span<const CandidatePair> ranked,
                        const PairFeaturizer& featurizer) {
  LabeledData data{FeatureMatrix(featurizer.dim()), {}};
  for (std::size_t i : sel.positives) {
    featurizer.fill(ranked[i], data.x.append_row());
    data.y.push_back(1);
  }
  for (std::size_t i : sel.negatives) {
    featurizer.fill(ranked[i], data.x.append_row());
    data.y.push_back(-1);
  }
  return data;
}

std::vector<double> decision_values(const SvmModel& model, const PairFeaturizer& featurizer,
                                    std::span<const CandidatePair> pairs) {
  const auto count = static_cast<std::int64_t>(pairs.size());
  std::vector<double> dis(pairs.size());
#pragma omp parallel
  {
    std::vector<double> buf(featurizer.dim());
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < count; ++i) {
      featurizer.fill(pairs[static_cast<std::size_t>(i)], buf);
      dis[static_cast<std::size_t>(i)] = model.decision(buf);
    }
  }
  return dis;
}

std::vector<double> confidence(std::span<const double> dis) {
  if (dis.empty()) throw UsageError("confidence needs at least one scored pair");
  double lo = std::abs(dis[0]), hi = lo;
  for (double v : dis) {
    lo = std::min(lo, std::abs(v));
    hi = std::max(hi, std::abs(v));
  }
  std::vector<double> conf(dis.size(), 1.0);
  const double span = hi - lo;
  if (span < 1e-12) return conf;
  for (std::size_t i = 0; i < dis.size(); ++i) {
    conf[i] = std::clamp((std::abs(dis[i]) - lo) / span, 0.0, 1.0);
  }
  return conf;
}

void rerank(std::vector<CandidatePair>& pairs, double alpha) {
  if (!(alpha >= 0.0)) throw UsageError("alpha must be >= 0");
  for (auto& p : pairs) p.s_hat = p.s * std::pow(p.conf, alpha);
  sort_by_s_hat(pairs);
}

namespace {

std::vector<std::uint64_t> positive_keys(std::span<const CandidatePair> pairs) {
  std::vector<std::uint64_t> keys;
  for (const auto& p : pairs) {
    if (p.dis > 0.0) keys.push_back((static_cast<std::uint64_t>(p.a) << 32) | p.b);
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::size_t symmetric_difference_size(const std::vector<std::uint64_t>& x, const std::vector<std::uint64_t>& y) {
  std::size_t common = 0;
  auto i = x.begin();
  auto j = y.begin();
  while (i != x.end() && j != y.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else {
      ++common;
      ++i;
      ++j;
    }
  }
  return x.size() + y.size() - 2 * common;
}

}  // namespace

PrfResult prf_loop(std::vector<CandidatePair> pairs, const PairFeaturizer& featurizer, const PrfConfig& cfg) {
  if (pairs.size() < 2) throw UsageError("PRF re-ranking needs at least 2 candidate pairs");
  if (cfg.max_rounds < 1) throw UsageError("PRF needs max_rounds >= 1");

  PrfResult result;
  for (auto& p : pairs) p.s_hat = p.s;
  sort_by_s(pairs);

  std::vector<std::uint64_t> previous;
  for (std::size_t round = 1; round <= cfg.max_rounds; ++round) {
    // `pairs` is ranked by the previous round's score at this point.
    const auto sel = build_training_set(pairs.size(), cfg.n_train);
    const auto data = materialize(sel, pairs, featurizer);
    SvmHyper hyper = cfg.svm;
    hyper.seed = derive_seed(cfg.svm.seed, {round});
    result.model = train_svm(data, hyper);

    const auto dis = decision_values(result.model, featurizer, pairs);
    const auto conf = confidence(dis);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      pairs[i].dis = dis[i];
      pairs[i].conf = conf[i];
    }
    rerank(pairs, cfg.alpha);

    result.rounds = round;
    auto keys = positive_keys(pairs);
    const bool stable =
        round > 1 && static_cast<double>(symmetric_difference_size(keys, previous)) <
                         cfg.stability * static_cast<double>(pairs.size());
    previous = std::move(keys);
    if (stable) break;
  }
  result.ranked = std::move(pairs);
  return result;
}

}  // namespace nkmatch
