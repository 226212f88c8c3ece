#include "nkmatch/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "nkmatch/error.hpp"
#include "nkmatch/rng.hpp"
#include "nkmatch/version.hpp"

namespace nkmatch {

std::string provenance_line(const std::string& config_text, std::uint64_t seed) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a64(config_text)));
  return std::string("nkmatch ") + kVersion + " config=" + hash + " seed=" + std::to_string(seed);
}

AttackInstance make_instance(const Graph& base, double noise, std::optional<double> overlap, std::uint64_t seed) {
  Graph anon_base = base;
  Graph aux_base = base;
  GroundTruth shared;
  if (overlap) {
    auto pair = generate_overlapping_pair(base, {*overlap, derive_seed(seed, {4})});
    anon_base = std::move(pair.first);
    aux_base = std::move(pair.second);
    shared = std::move(pair.truth);
  } else {
    for (Label l : base.labels()) shared.emplace_back(l, l);
  }

  AttackInstance inst;
  inst.altered_anon = altered_edge_count(anon_base, noise);
  inst.altered_aux = altered_edge_count(aux_base, noise);
  auto anon = anonymize(perturb(anon_base, {noise, derive_seed(seed, {1})}), derive_seed(seed, {3}));
  inst.aux = perturb(aux_base, {noise, derive_seed(seed, {2})});
  inst.anon = std::move(anon.graph);
  inst.truth = compose(anon.truth, shared);
  return inst;
}

void SweepSpec::validate() const {
  if (noise_levels.empty()) throw UsageError("sweep needs at least one noise level");
  for (double x : noise_levels) {
    if (!(x >= 0.0 && x <= 1.0)) throw UsageError("noise levels must lie in [0, 1]");
  }
  if (repeats < 1) throw UsageError("repeats must be >= 1");
  if (overlap && !(*overlap > 0.0 && *overlap <= 1.0)) throw UsageError("overlap must lie in (0, 1]");
}

RunReport run_sweep(const Graph& base, const SweepSpec& spec, const AttackConfig& cfg,
                    const std::function<void(const SweepRun&)>& progress) {
  spec.validate();
  cfg.validate();
  RunReport report{cfg, spec, cfg.seed, {}, {}};
  const std::size_t cells = spec.noise_levels.size() * spec.repeats;
  report.runs.resize(cells);
  std::vector<std::exception_ptr> errors(cells);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(cells); ++c) {
    const auto cell = static_cast<std::size_t>(c);
    auto& run = report.runs[cell];
    run.level = cell / spec.repeats;
    run.repeat = cell % spec.repeats;
    run.noise = spec.noise_levels[run.level];
    run.run_seed = derive_seed(cfg.seed, {run.level, run.repeat});
    try {
      const auto start = std::chrono::steady_clock::now();
      const auto inst = make_instance(base, run.noise, spec.overlap, run.run_seed);
      AttackConfig run_cfg = cfg;
      run_cfg.seed = derive_seed(run.run_seed, {5});
      const auto result = run_attack(inst.anon, inst.aux, run_cfg);
      run.score = score_mapping(result, inst.truth, inst.anon, inst.aux);
      run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    } catch (...) {
      errors[cell] = std::current_exception();
    }
    if (progress && !errors[cell]) {
#pragma omp critical(nkmatch_progress)
      progress(run);
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  for (std::size_t level = 0; level < spec.noise_levels.size(); ++level) {
    SweepSummary s{spec.noise_levels[level], 0.0, 0.0};
    for (std::size_t r = 0; r < spec.repeats; ++r) s.mean += report.runs[level * spec.repeats + r].score.accuracy();
    s.mean /= static_cast<double>(spec.repeats);
    if (spec.repeats > 1) {
      double ss = 0.0;
      for (std::size_t r = 0; r < spec.repeats; ++r) {
        const double d = report.runs[level * spec.repeats + r].score.accuracy() - s.mean;
        ss += d * d;
      }
      s.stddev = std::sqrt(ss / static_cast<double>(spec.repeats - 1));
    }
    report.summaries.push_back(s);
  }
  return report;
}

std::string sweep_config_text(const RunReport& report) {
  std::ostringstream out;
  out << std::setprecision(17) << report.config.canonical() << "noise=";
  for (std::size_t i = 0; i < report.spec.noise_levels.size(); ++i) {
    out << (i ? "," : "") << report.spec.noise_levels[i];
  }
  out << "\nrepeats=" << report.spec.repeats << '\n';
  if (report.spec.overlap) out << "overlap=" << *report.spec.overlap << '\n';
  return out.str();
}

void write_sweep_csv(std::ostream& out, const RunReport& report) {
  out << "# " << provenance_line(sweep_config_text(report), report.master_seed) << '\n';
  out << "kind,noise,repeat,run_seed,accepted,correct,overlap,accuracy,stddev\n";
  out << std::setprecision(17);
  for (const auto& r : report.runs) {
    out << "run," << r.noise << ',' << r.repeat << ',' << r.run_seed << ',' << r.score.accepted << ','
        << r.score.correct << ',' << r.score.overlap << ',' << r.score.accuracy() << ",\n";
  }
  for (const auto& s : report.summaries) {
    out << "summary," << s.noise << ",,,,,," << s.mean << ',' << s.stddev << '\n';
  }
}

void write_timing_csv(std::ostream& out, const RunReport& report) {
  out << "# " << provenance_line(sweep_config_text(report), report.master_seed) << '\n';
  out << "noise,repeat,wall_seconds\n" << std::setprecision(6);
  for (const auto& r : report.runs) out << r.noise << ',' << r.repeat << ',' << r.wall_seconds << '\n';
}

namespace {

std::string fmt(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

}  // namespace

void write_sweep_svg(std::ostream& out, const RunReport& report) {
  constexpr double kWidth = 640, kHeight = 400;
  constexpr double kLeft = 70, kRight = 20, kTop = 30, kBottom = 60;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double x_max = 0.0;
  for (const auto& s : report.summaries) x_max = std::max(x_max, s.noise);
  if (x_max <= 0.0) x_max = 1.0;
  auto px = [&](double noise) { return kLeft + plot_w * noise / x_max; };
  auto py = [&](double acc) { return kTop + plot_h * (1.0 - std::clamp(acc, 0.0, 1.0)); };

  out << "<!-- " << provenance_line(sweep_config_text(report), report.master_seed) << " -->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<g stroke=\"black\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
      << kTop + plot_h << "\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
      << "\"/>\n";
  out << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int i = 0; i <= 5; ++i) {
    const double acc = i / 5.0;
    out << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << fmt(py(acc), 2) << "\" x2=\"" << kLeft << "\" y2=\""
        << fmt(py(acc), 2) << "\" stroke=\"black\"/>";
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << fmt(py(acc) + 4, 2) << "\" text-anchor=\"end\">"
        << fmt(acc, 1) << "</text>\n";
  }
  for (const auto& s : report.summaries) {
    out << "<text x=\"" << fmt(px(s.noise), 2) << "\" y=\"" << kTop + plot_h + 16
        << "\" text-anchor=\"middle\">" << fmt(s.noise, 3) << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\">noise (r/M)</text>\n";
  out << "<text x=\"18\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << kTop + plot_h / 2 << ")\">accuracy</text>\n";
  out << "</g>\n";

  std::vector<SweepSummary> points = report.summaries;
  std::stable_sort(points.begin(), points.end(),
                   [](const SweepSummary& a, const SweepSummary& b) { return a.noise < b.noise; });
  out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < points.size(); ++i) {
    out << (i ? " " : "") << fmt(px(points[i].noise), 2) << ',' << fmt(py(points[i].mean), 2);
  }
  out << "\"/>\n<g stroke=\"#1f77b4\" fill=\"#1f77b4\">\n";
  for (const auto& s : points) {
    const double x = px(s.noise);
    out << "<line x1=\"" << fmt(x, 2) << "\" y1=\"" << fmt(py(s.mean - s.stddev), 2) << "\" x2=\"" << fmt(x, 2)
        << "\" y2=\"" << fmt(py(s.mean + s.stddev), 2) << "\"/>";
    out << "<circle cx=\"" << fmt(x, 2) << "\" cy=\"" << fmt(py(s.mean), 2) << "\" r=\"3\"/>\n";
  }
  out << "</g>\n</svg>\n";
}

}  // namespace nkmatch
