#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "estim/error.hpp"
#include "estim/harness/config.hpp"
#include "estim/harness/models.hpp"
#include "estim/harness/plotdata.hpp"
#include "estim/harness/results_io.hpp"
#include "estim/harness/runner.hpp"
#include "estim/simulators/dataset_csv.hpp"

namespace fs = std::filesystem;
using namespace estim;

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;
constexpr int kNotConverged = 4;

struct RunOptions {
  std::string preset;
  std::string config_file;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out;
  std::string bounds_rule;
  std::string scale = "small";
  bool no_samples = false;
  bool quiet = false;
};

harness::ExperimentConfig build_config(const RunOptions& o) {
  harness::ExperimentConfig cfg;
  if (!o.config_file.empty()) {
    cfg = harness::read_config(o.config_file);
    if (!o.preset.empty() && o.preset != cfg.preset) {
      throw Error(Errc::ConfigError, "preset '" + o.preset + "' differs from the config file's '" +
                                         cfg.preset + "'");
    }
  } else {
    if (o.preset.empty()) throw Error(Errc::ConfigError, "run needs a preset or --config");
    cfg = harness::preset_config(o.preset, o.scale);
  }
  std::vector<std::string> sets;
  if (o.seed_given) sets.push_back("seed=" + std::to_string(o.seed));
  if (!o.bounds_rule.empty()) sets.push_back("sequential.bounds_rule=\"" + o.bounds_rule + "\"");
  sets.insert(sets.end(), o.sets.begin(), o.sets.end());
  cfg = harness::apply_overrides(cfg, sets);
  harness::validate(cfg);
  return cfg;
}

void print_metrics(const std::vector<harness::MetricRow>& rows) {
  std::cout << "stage      parameter          estimate      n        bias          sd        rmse\n";
  for (const auto& r : rows) {
    char line[160];
    std::snprintf(line, sizeof line, "%-10s %-18s %-8s %6zu %11.5f %11.5f %11.5f\n", r.stage.c_str(),
                  r.parameter.c_str(), r.estimate.c_str(), r.n, r.value.bias, r.value.sd, r.value.rmse);
    std::cout << line;
  }
}

int cmd_run(const RunOptions& o) {
  const auto cfg = build_config(o);
  const fs::path out = o.out.empty() ? fs::path("results") / cfg.preset : fs::path(o.out);
  const auto bundle = harness::run_experiment(cfg);
  harness::write_bundle(bundle, out, !o.no_samples);

  std::size_t converged = 0, sequential = 0, failed = 0;
  for (const auto& r : bundle.replicates) {
    if (r.status == "converged") ++converged;
    if (r.status != "estimated") ++sequential;
    if (r.status == "failed") {
      ++failed;
      std::cerr << "replicate " << r.replicate << " failed: " << r.error << "\n";
    }
  }
  if (failed == bundle.replicates.size()) return kRuntimeError;
  if (!o.quiet) {
    std::cout << "preset " << cfg.preset << ", config " << bundle.config_hash << ", "
              << bundle.replicates.size() << " replicates";
    if (sequential) std::cout << ", " << converged << " converged, " << failed << " failed";
    std::cout << "\nresults in " << out.string() << "\n";
    print_metrics(bundle.metrics);
  }
  if (sequential && converged == 0) {
    std::cerr << "no replicate met the stopping rule within " << cfg.max_iterations << " iterations\n";
    return kNotConverged;
  }
  return kOk;
}

int cmd_metrics(const std::string& dir, bool check) {
  const auto table = harness::read_csv(fs::path(dir) / "estimates.csv");
  const auto rows = harness::metric_table(harness::read_estimates(fs::path(dir) / "estimates.csv"));
  const std::string text = harness::metrics_csv(table.config_hash, rows);
  if (check) {
    std::ifstream in(fs::path(dir) / "metrics.csv", std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    if (ss.str() != text) {
      std::cerr << "metrics.csv differs from the table recomputed from estimates.csv\n";
      return kRuntimeError;
    }
    std::cout << "metrics.csv matches the recomputed table\n";
    return kOk;
  }
  std::cout << text;
  return kOk;
}

int cmd_simulate(const std::string& preset, const std::string& scale, const std::vector<std::string>& sets,
                 const std::string& out) {
  auto cfg = harness::apply_overrides(harness::preset_config(preset, scale), sets);
  harness::validate(cfg);
  const auto truth = harness::transformed_truth(cfg);
  const RngStream root(cfg.seed);
  if (preset == "svol" || preset == "ar1-replication") {
    const std::size_t T = cfg.lengths.front();
    RngStream rng = root.derive(2);
    Tensor x = preset == "svol"
                   ? harness::SvolModel(T, cfg.truth.at("sigma"), cfg.svol_scaled).simulate_raw(truth, rng)
                   : harness::Ar1Model(T, tf::by_id(cfg.transforms[0])).simulate_raw(truth, rng);
    std::ofstream f(out, std::ios::binary);
    if (!f) throw Error(Errc::IoError, "cannot write " + out);
    f << "x\n";
    for (double v : x.values()) f << harness::format_double(v) << '\n';
    return kOk;
  }
  std::unique_ptr<seq::Model> model;
  if (preset == "gauss-var") model = std::make_unique<harness::GaussVarModel>(cfg.truth.at("mu"), cfg.J);
  if (preset == "gauss-meanvar") {
    model = std::make_unique<harness::GaussMeanVarModel>(cfg.J, tf::by_id(cfg.transforms[1]));
  }
  if (preset == "gauss-moments") {
    model = std::make_unique<harness::GaussMomentsModel>(cfg.J, cfg.transforms[1] == "log");
  }
  if (preset == "brown-resnick") {
    model = std::make_unique<harness::BrownResnickModel>(sim::Grid2D{cfg.grid, cfg.grid, cfg.spacing});
  }
  sim::DatasetMeta meta;
  meta.model = preset;
  for (const auto& [k, v] : cfg.truth) meta.params.emplace_back(k, v);
  meta.seed = cfg.seed;
  meta.shape = model->data_shape();
  std::vector<Tensor> reps;
  for (std::size_t i = 0; i < cfg.replicates; ++i) {
    RngStream rng = root.derive(2).derive(i);
    reps.push_back(model->simulate_raw(truth, rng));
  }
  sim::write_dataset_csv(out, meta, reps);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation-based neural parameter estimation"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: ESTIM_THREADS or all cores)");

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment preset and write its result files");
  run_cmd->add_option("preset", run.preset, "Preset id")
      ->check(CLI::IsMember(harness::preset_ids()));
  run_cmd->add_option("--config", run.config_file, "Start from a config JSON instead of a preset");
  run_cmd->add_option("--set", run.sets, "Override key=value (dotted path or alias); repeatable");
  run_cmd->add_option("--seed", run.seed, "Master seed")->each([&](const std::string&) { run.seed_given = true; });
  run_cmd->add_option("--out", run.out, "Output directory (default results/<preset>)");
  run_cmd->add_option("--bounds-rule", run.bounds_rule, "Bound update rule")
      ->check(CLI::IsMember({"basic", "literal"}));
  run_cmd->add_option("--scale", run.scale, "Preset scale")->check(CLI::IsMember({"smoke", "small", "paper"}));
  run_cmd->add_flag("--no-samples", run.no_samples, "Skip training.csv and bootstrap.csv");
  run_cmd->add_flag("--quiet", run.quiet, "Do not print the metric table");

  std::string metrics_dir;
  bool metrics_check = false;
  auto* metrics_cmd = app.add_subcommand("metrics", "Recompute the metric table from estimates.csv");
  metrics_cmd->add_option("dir", metrics_dir, "Result directory")->required();
  metrics_cmd->add_flag("--check", metrics_check, "Compare with the stored metrics.csv");

  std::string plot_dir;
  auto* plot_cmd = app.add_subcommand("plotdata", "Write tidy plot CSVs for a result directory");
  plot_cmd->add_option("dir", plot_dir, "Result directory")->required();

  std::string sim_preset, sim_scale = "small", sim_out;
  std::vector<std::string> sim_sets;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate observed data for a preset at its truth");
  sim_cmd->add_option("preset", sim_preset, "Preset id")->required()->check(CLI::IsMember(harness::preset_ids()));
  sim_cmd->add_option("--set", sim_sets, "Override key=value; repeatable");
  sim_cmd->add_option("--scale", sim_scale, "Preset scale")->check(CLI::IsMember({"smoke", "small", "paper"}));
  sim_cmd->add_option("--out", sim_out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  if (threads > 0) setenv("ESTIM_THREADS", std::to_string(threads).c_str(), 1);

  try {
    if (*run_cmd) return cmd_run(run);
    if (*metrics_cmd) return cmd_metrics(metrics_dir, metrics_check);
    if (*plot_cmd) {
      harness::emit_plotdata(plot_dir);
      return kOk;
    }
    if (*sim_cmd) return cmd_simulate(sim_preset, sim_scale, sim_sets, sim_out);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return e.code() == Errc::ConfigError ? kConfigError : kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}
