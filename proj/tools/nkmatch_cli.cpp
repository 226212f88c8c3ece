// nkmatch: generate graphs, perturb them, run the structural de-anonymization
// attack and sweep accuracy over noise levels.
#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nkmatch/error.hpp"
#include "nkmatch/features.hpp"
#include "nkmatch/graph.hpp"
#include "nkmatch/perturbation.hpp"
#include "nkmatch/pipeline.hpp"
#include "nkmatch/report.hpp"
#include "nkmatch/version.hpp"

namespace fs = std::filesystem;
using namespace nkmatch;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kInput = 2, kInternal = 3 };

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("nkmatch");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("NKMATCH_LOG")) {
    const std::string level = env;
    if (level == "error") spdlog::set_level(spdlog::level::err);
    else if (level == "debug") spdlog::set_level(spdlog::level::debug);
    else if (level != "info") spdlog::warn("ignoring NKMATCH_LOG='{}' (expected error, info or debug)", level);
  }
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

Graph load_graph(const fs::path& path) {
  auto loaded = load_edge_list(path);
  spdlog::debug("{}: n={} M={} (dropped {} self-loops, {} duplicates)", path.string(), loaded.graph.node_count(),
                loaded.graph.edge_count(), loaded.self_loops_dropped, loaded.duplicates_dropped);
  if (loaded.self_loops_dropped + loaded.duplicates_dropped > 0) {
    spdlog::info("{}: dropped {} self-loops and {} duplicate edges", path.string(), loaded.self_loops_dropped,
                 loaded.duplicates_dropped);
  }
  return std::move(loaded.graph);
}

struct GenArgs {
  std::string model = "ba";
  GeneratorParams params;
  std::uint64_t seed = 1;
  fs::path out;

  std::string config_text() const {
    std::ostringstream s;
    s << std::setprecision(17) << "model=" << model << "\nn=" << params.n << "\np=" << params.p
      << "\nm=" << params.m << "\nk=" << params.k << "\nbeta=" << params.beta << '\n';
    return s.str();
  }
};

void add_generator_options(CLI::App* cmd, GenArgs& g, bool required) {
  auto* model = cmd->add_option("--model", g.model, "Graph model: er, ba or ws");
  auto* n = cmd->add_option("--n", g.params.n, "Node count");
  if (required) {
    model->required();
    n->required();
  }
  cmd->add_option("--p", g.params.p, "ER edge probability");
  cmd->add_option("--m", g.params.m, "BA edges per new node")->capture_default_str();
  cmd->add_option("--k", g.params.k, "WS ring degree (even)")->capture_default_str();
  cmd->add_option("--beta", g.params.beta, "WS rewiring probability")->capture_default_str();
}

void add_attack_options(CLI::App* cmd, AttackConfig& cfg) {
  cmd->add_option("--c", cfg.c, "Weight of the popularity score in the structure score")->capture_default_str();
  cmd->add_option("--n-group", cfg.n_group, "Nodes per side selected each iteration")->capture_default_str();
  cmd->add_option("--n-train", cfg.n_train, "Self-labeled pairs per class for the SVM")->capture_default_str();
  cmd->add_option("--alpha", cfg.alpha, "Exponent on the SVM confidence")->capture_default_str();
  cmd->add_option("--bins", cfg.bins, "Logarithmic degree buckets per histogram")->capture_default_str();
  cmd->add_option("--tau", cfg.tau, "Minimum re-ranked score for accepting a match")->capture_default_str();
  cmd->add_option("--prf-rounds", cfg.prf_max_rounds, "Maximum PRF-SVM rounds")->capture_default_str();
  cmd->add_option("--prf-stability", cfg.prf_stability, "PRF stopping threshold (fraction of pairs)")
      ->capture_default_str();
  cmd->add_option("--svm-lambda", cfg.svm_lambda, "SVM L2 regularization")->capture_default_str();
  cmd->add_option("--svm-epochs", cfg.svm_max_epochs, "SVM pass limit")->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
}

// Flat key=value lines ('#' comments). Keys are long option names without the
// leading dashes; underscores are accepted for dashes. Values only fill
// options that were not given on the command line.
void apply_config_file(CLI::App* cmd, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file '" + path.string() + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    auto trim = [](std::string v) {
      const auto b = v.find_first_not_of(" \t\r");
      const auto e = v.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : v.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    if (key == "config") throw UsageError("config files cannot include other config files");
    CLI::Option* opt = cmd->get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw UsageError(path.string() + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (opt->count() > 0) continue;
    opt->add_result(value);
    opt->run_callback();
  }
}

int cmd_gen(const GenArgs& g) {
  const auto model = parse_graph_model(g.model);
  const Graph graph = generate_synthetic(model, g.params, g.seed);
  auto out = open_output(g.out);
  write_edge_list(out, graph, {provenance_line(g.config_text(), g.seed),
                               "nodes=" + std::to_string(graph.node_count()) +
                                   " edges=" + std::to_string(graph.edge_count())});
  std::cout << "n=" << graph.node_count() << " M=" << graph.edge_count() << '\n';
  return kOk;
}

struct PerturbArgs {
  fs::path in;
  double noise = 0.0;
  std::optional<double> overlap;
  std::uint64_t seed = 1;
  fs::path out_dir = ".";
};

int cmd_perturb(const PerturbArgs& p) {
  const Graph base = load_graph(p.in);
  const auto inst = make_instance(base, p.noise, p.overlap, p.seed);
  std::ostringstream cfg;
  cfg << std::setprecision(17) << "input=" << p.in.string() << "\nnoise=" << p.noise;
  if (p.overlap) cfg << "\noverlap=" << *p.overlap;
  const auto header = provenance_line(cfg.str(), p.seed);

  fs::create_directories(p.out_dir);
  {
    auto out = open_output(p.out_dir / "anon.txt");
    write_edge_list(out, inst.anon, {header});
  }
  {
    auto out = open_output(p.out_dir / "aux.txt");
    write_edge_list(out, inst.aux, {header});
  }
  {
    auto out = open_output(p.out_dir / "truth.tsv");
    write_truth_tsv(out, inst.truth, {header});
  }
  std::cout << "anon: n=" << inst.anon.node_count() << " M=" << inst.anon.edge_count() << " r=" << inst.altered_anon
            << '\n'
            << "aux: n=" << inst.aux.node_count() << " M=" << inst.aux.edge_count() << " r=" << inst.altered_aux
            << '\n'
            << "truth rows=" << inst.truth.size() << '\n';
  return kOk;
}

class DumpObserver : public AttackObserver {
 public:
  DumpObserver(const Graph& ga, const Graph& gu, fs::path dir, std::string header)
      : ga_(ga), gu_(gu), dir_(std::move(dir)), header_(std::move(header)) {}

  void on_features(std::span<const NKFeature> anon, std::span<const NKFeature> aux) override {
    auto a = open_output(dir_ / "features_anon.csv");
    a << "# " << header_ << '\n';
    write_feature_csv(a, ga_, anon);
    auto u = open_output(dir_ / "features_aux.csv");
    u << "# " << header_ << '\n';
    write_feature_csv(u, gu_, aux);
  }

  void on_iteration(std::size_t iteration, const Groups& groups, std::span<const CandidatePair> block,
                    const PrfResult& prf) override {
    const std::string tag = std::to_string(iteration);
    auto sim = open_output(dir_ / ("similarity_iter" + tag + ".csv"));
    sim << "# " << header_ << '\n';
    write_similarity_csv(sim, ga_, gu_, groups, block);
    auto model = open_output(dir_ / ("model_iter" + tag + ".txt"));
    model << "# " << header_ << '\n';
    write_model(model, prf.model);
    spdlog::debug("iteration {}: groups {}x{}, {} PRF rounds, SVM objective {:.6g} after {} passes", iteration,
                  groups.anon.size(), groups.aux.size(), prf.rounds, prf.model.objective, prf.model.epochs_run);
  }

 private:
  const Graph& ga_;
  const Graph& gu_;
  fs::path dir_;
  std::string header_;
};

struct AttackArgs {
  fs::path anon, aux, truth, seeds;
  fs::path out_dir = ".";
  bool debug_dumps = false;
  AttackConfig cfg;
};

int cmd_attack(const AttackArgs& args) {
  args.cfg.validate();
  const Graph ga = load_graph(args.anon);
  const Graph gu = load_graph(args.aux);
  SeedPairs seeds;
  if (!args.seeds.empty()) seeds = seeds_from_labels(read_truth_tsv(args.seeds), ga, gu);

  const auto header = provenance_line(args.cfg.canonical(), args.cfg.seed);
  fs::create_directories(args.out_dir);
  std::optional<DumpObserver> dumps;
  if (args.debug_dumps) dumps.emplace(ga, gu, args.out_dir, header);

  const auto result = run_attack(ga, gu, args.cfg, seeds, dumps ? &*dumps : nullptr);
  for (const auto& it : result.iterations) {
    spdlog::info("iteration {}: groups {}x{}, {} pairs, {} PRF rounds, {} accepted", it.iteration, it.group_a,
                 it.group_u, it.pairs, it.prf_rounds, it.accepted);
  }
  {
    auto out = open_output(args.out_dir / "mapping.tsv");
    write_mapping_tsv(out, result, {header});
  }
  {
    auto out = open_output(args.out_dir / "iterations.csv");
    write_iteration_csv(out, result, {header});
  }
  std::cout << "matched " << result.mapping.size() << " pairs in " << result.iterations.size() << " iterations\n";
  if (!args.truth.empty()) {
    const auto score = score_mapping(result, read_truth_tsv(args.truth), ga, gu);
    std::cout << std::setprecision(6) << "accuracy=" << score.accuracy() << " (" << score.correct << "/"
              << score.overlap << ")\n"
              << "precision=" << score.precision() << " (" << score.correct << "/" << score.accepted << ")\n";
  }
  return kOk;
}

std::vector<double> parse_levels(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (tok.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || tok.find_first_not_of(" \t", used) != std::string::npos) {
      throw UsageError("bad noise level '" + tok + "'");
    }
    out.push_back(v);
  }
  return out;
}

struct SweepArgs {
  fs::path graph;
  GenArgs gen;
  std::string noise;
  std::size_t repeats = 1;
  std::optional<double> overlap;
  fs::path out_dir = ".";
  AttackConfig cfg;
};

int cmd_sweep(const SweepArgs& args) {
  SweepSpec spec{parse_levels(args.noise), args.repeats, args.overlap};
  spec.validate();
  args.cfg.validate();

  Graph base;
  if (!args.graph.empty()) {
    base = load_graph(args.graph);
  } else {
    if (args.gen.params.n == 0) throw UsageError("sweep needs --graph or a generator (--model, --n)");
    base = generate_synthetic(parse_graph_model(args.gen.model), args.gen.params, args.cfg.seed);
  }
  spdlog::info("sweep base graph: n={} M={}, {} levels x {} repeats", base.node_count(), base.edge_count(),
               spec.noise_levels.size(), spec.repeats);

  const auto report = run_sweep(base, spec, args.cfg, [](const SweepRun& run) {
    spdlog::info("noise={} repeat={} accuracy={:.4f} ({}/{}) in {:.2f}s", run.noise, run.repeat,
                 run.score.accuracy(), run.score.correct, run.score.overlap, run.wall_seconds);
  });

  fs::create_directories(args.out_dir);
  {
    auto out = open_output(args.out_dir / "sweep.csv");
    write_sweep_csv(out, report);
  }
  {
    auto out = open_output(args.out_dir / "sweep.svg");
    write_sweep_svg(out, report);
  }
  {
    auto out = open_output(args.out_dir / "sweep_timing.csv");
    write_timing_csv(out, report);
  }
  for (const auto& s : report.summaries) {
    std::cout << std::setprecision(6) << "noise=" << s.noise << " mean_accuracy=" << s.mean << " stddev=" << s.stddev
              << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Seed-free structural de-anonymization of graphs"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic graph as an edge list");
  add_generator_options(gen_cmd, gen, true);
  gen_cmd->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("-o,--out", gen.out, "Output edge-list path")->required();

  PerturbArgs perturb_args;
  auto* perturb_cmd = app.add_subcommand("perturb", "Make an anonymized/auxiliary pair with ground truth");
  perturb_cmd->add_option("--in,--graph", perturb_args.in, "Base edge list")->required();
  perturb_cmd->add_option("--noise", perturb_args.noise, "Fraction r/M of edges altered per side")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  perturb_cmd->add_option("--overlap", perturb_args.overlap, "Fraction of nodes shared by both sides")
      ->check(CLI::Range(0.0, 1.0));
  perturb_cmd->add_option("--seed", perturb_args.seed, "Master seed")->capture_default_str();
  perturb_cmd->add_option("--out-dir", perturb_args.out_dir, "Directory for anon.txt, aux.txt, truth.tsv")
      ->capture_default_str();

  AttackArgs attack_args;
  auto* attack_cmd = app.add_subcommand("attack", "De-anonymize --anon against --aux");
  attack_cmd->add_option("--anon", attack_args.anon, "Anonymized edge list")->required();
  attack_cmd->add_option("--aux", attack_args.aux, "Auxiliary edge list")->required();
  attack_cmd->add_option("--truth", attack_args.truth, "Ground truth TSV for scoring");
  attack_cmd->add_option("--seeds", attack_args.seeds, "Known (anon, aux) label pairs as TSV");
  attack_cmd->add_option("--out-dir", attack_args.out_dir, "Directory for mapping.tsv, iterations.csv")
      ->capture_default_str();
  attack_cmd->add_flag("--debug-dumps", attack_args.debug_dumps, "Write features, similarity matrices and models");
  add_attack_options(attack_cmd, attack_args.cfg);
  fs::path attack_config;
  attack_cmd->add_option("--config", attack_config, "Flat key=value file; command-line flags take precedence");

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Accuracy versus noise over repeated perturbations");
  sweep_cmd->add_option("--graph", sweep_args.graph, "Base edge list (otherwise generated)");
  add_generator_options(sweep_cmd, sweep_args.gen, false);
  sweep_cmd->add_option("--noise", sweep_args.noise, "Noise levels, comma separated")->required();
  sweep_cmd->add_option("--repeats", sweep_args.repeats, "Runs per noise level")->capture_default_str();
  sweep_cmd->add_option("--overlap", sweep_args.overlap, "Fraction of nodes shared by both sides");
  sweep_cmd->add_option("--out-dir", sweep_args.out_dir, "Directory for sweep.csv, sweep.svg")->capture_default_str();
  add_attack_options(sweep_cmd, sweep_args.cfg);
  fs::path sweep_config;
  sweep_cmd->add_option("--config", sweep_config, "Flat key=value file; command-line flags take precedence");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*attack_cmd && !attack_config.empty()) apply_config_file(attack_cmd, attack_config);
    if (*sweep_cmd && !sweep_config.empty()) apply_config_file(sweep_cmd, sweep_config);
    if (*gen_cmd) return cmd_gen(gen);
    if (*perturb_cmd) return cmd_perturb(perturb_args);
    if (*attack_cmd) return cmd_attack(attack_args);
    if (*sweep_cmd) return cmd_sweep(sweep_args);
  } catch (const CLI::ParseError& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const InputError& e) {
    spdlog::error("{}", e.what());
    return kInput;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return kInput;
  } catch (const std::exception& e) {
    spdlog::error("internal error: {}", e.what());
    return kInternal;
  }
  return kUsage;
}
