#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nkmatch/graph.hpp"
#include "nkmatch/perturbation.hpp"
#include "nkmatch/pipeline.hpp"

namespace nkmatch {

// "nkmatch <version> config=<hash> seed=<seed>", used as the first comment
// line of every output file.
std::string provenance_line(const std::string& config_text, std::uint64_t seed);

// One anonymized/auxiliary pair derived from a base graph. The anonymized
// side is perturbed then relabeled by a random permutation; the auxiliary
// side is perturbed independently and keeps the base labels.
struct AttackInstance {
  Graph anon;
  Graph aux;
  GroundTruth truth;
  std::size_t altered_anon = 0;
  std::size_t altered_aux = 0;
};

AttackInstance make_instance(const Graph& base, double noise, std::optional<double> overlap, std::uint64_t seed);

struct SweepSpec {
  std::vector<double> noise_levels;
  std::size_t repeats = 1;
  std::optional<double> overlap;

  void validate() const;
};

struct SweepRun {
  std::size_t level = 0;
  double noise = 0.0;
  std::size_t repeat = 0;
  std::uint64_t run_seed = 0;
  Score score;
  double wall_seconds = 0.0;
};

struct SweepSummary {
  double noise = 0.0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 with one repeat
};

struct RunReport {
  AttackConfig config;
  SweepSpec spec;
  std::uint64_t master_seed = 0;
  std::vector<SweepRun> runs;  // level-major, repeat-minor
  std::vector<SweepSummary> summaries;
};

// Runs every (level, repeat) cell; cells run in parallel and are reported in
// a fixed order. `progress` is called serially after each cell.
RunReport run_sweep(const Graph& base, const SweepSpec& spec, const AttackConfig& cfg,
                    const std::function<void(const SweepRun&)>& progress = {});

std::string sweep_config_text(const RunReport& report);

// kind,noise,repeat,run_seed,accepted,correct,overlap,accuracy,stddev
void write_sweep_csv(std::ostream& out, const RunReport& report);
// Wall-clock per run, kept out of the reproducible CSV.
void write_timing_csv(std::ostream& out, const RunReport& report);
// Mean accuracy against noise with stddev error bars.
void write_sweep_svg(std::ostream& out, const RunReport& report);

}  // namespace nkmatch
