#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "estim/core_math/rng.hpp"
#include "estim/error.hpp"
#include "estim/harness/config.hpp"
#include "estim/harness/metrics.hpp"
#include "estim/harness/plotdata.hpp"
#include "estim/harness/results_io.hpp"
#include "estim/harness/runner.hpp"
#include "estim/sequential/bounds.hpp"
#include "estim/sequential/trace_io.hpp"

using namespace estim;
using namespace estim::harness;
namespace fs = std::filesystem;

namespace {

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an estim::Error";
  return Errc::InvalidArgument;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path tmp_dir(const std::string& name) {
  const fs::path dir = fs::path(ESTIM_TEST_TMP) / name;
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(Config, EveryPresetRoundTripsAndValidates) {
  for (const auto& id : preset_ids()) {
    for (const char* scale : {"smoke", "small", "paper"}) {
      const auto cfg = preset_config(id, scale);
      EXPECT_NO_THROW(validate(cfg)) << id << " " << scale;
      EXPECT_EQ(config_from_json(to_json(cfg)), cfg) << id;
    }
  }
}

TEST(Config, UnknownPresetOrKeyIsConfigError) {
  EXPECT_EQ(code_of([] { preset_config("nope"); }), Errc::ConfigError);
  EXPECT_EQ(code_of([] { preset_config("gauss-var", "huge"); }), Errc::ConfigError);
  auto text = to_json(preset_config("gauss-var"));
  text.insert(text.find('{') + 1, "\"surprise\":1,");
  EXPECT_EQ(code_of([&] { config_from_json(text); }), Errc::ConfigError);
  EXPECT_EQ(code_of([] { apply_overrides(preset_config("gauss-var"), {"sequential.nope=3"}); }),
            Errc::ConfigError);
}

TEST(Config, OverridesByAliasAndPath) {
  const auto base = preset_config("gauss-var");
  const auto cfg = apply_overrides(base, {"N=500", "sequential.B=300", "seed=9", "lr=0.002", "T=123"});
  EXPECT_EQ(cfg.N, 500u);
  EXPECT_EQ(cfg.B, 300u);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_DOUBLE_EQ(cfg.train.learning_rate, 0.002);
  EXPECT_EQ(cfg.lengths, (std::vector<std::size_t>{123}));
  EXPECT_EQ(code_of([&] { apply_overrides(base, {"N=\"many\""}); }), Errc::ConfigError);
}

TEST(Config, ValidationRejectsBadCombinations) {
  auto cfg = preset_config("gauss-var");
  cfg.gamma = 1.5;
  EXPECT_EQ(code_of([&] { validate(cfg); }), Errc::ConfigError);
  cfg = preset_config("brown-resnick");
  cfg.transforms = {"identity", "identity"};
  EXPECT_EQ(code_of([&] { validate(cfg); }), Errc::ConfigError);
  cfg = preset_config("svol");
  cfg.truth["nu"] = 1.5;
  EXPECT_EQ(code_of([&] { validate(cfg); }), Errc::ConfigError);
}

TEST(Config, HashTracksContent) {
  const auto a = preset_config("svol");
  auto b = a;
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
  b.seed += 1;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(Metrics, AllEqualTruth) {
  const auto m = metrics(Tensor::from_rows({{1.0}, {1.0}, {1.0}}), std::vector<double>{1.0});
  EXPECT_EQ(m[0].bias, 0.0);
  EXPECT_EQ(m[0].sd, 0.0);
  EXPECT_EQ(m[0].rmse, 0.0);
}

TEST(Metrics, TwoPointHandExample) {
  const auto m = metrics(Tensor::from_rows({{0.0}, {2.0}}), std::vector<double>{1.0});
  EXPECT_DOUBLE_EQ(m[0].bias, 0.0);
  EXPECT_DOUBLE_EQ(m[0].sd, std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(m[0].rmse, 1.0);
}

TEST(Metrics, RmseDecompositionIdentity) {
  RngStream rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t I = 2 + rng.uniform_index(30);
    Tensor e = Tensor::matrix(I, 2);
    for (auto& v : e.values()) v = rng.normal() * 3 + 1;
    const std::vector<double> truth{rng.normal(), rng.normal()};
    for (const auto& m : metrics(e, truth)) {
      EXPECT_NEAR(m.rmse * m.rmse, m.bias * m.bias + m.sd * m.sd * (I - 1.0) / I, 1e-10);
    }
  }
}

TEST(Metrics, SingleReplicateIsDegenerate) {
  EXPECT_EQ(code_of([] { metrics(Tensor::from_rows({{1.0}}), std::vector<double>{1.0}); }),
            Errc::DegenerateInput);
}

TEST(Metrics, TableHasLastStage) {
  std::vector<EstimateRow> rows;
  for (std::size_t i = 0; i < 3; ++i) {
    rows.push_back({i, "1", false, "p", 0.0, double(i), 0.0, 0.1, -1, 1});
    rows.push_back({i, "2", true, "p", 0.0, 2.0 * i, 0.0, 0.1, -1, 1});
  }
  const auto table = metric_table(rows);
  std::set<std::string> stages;
  for (const auto& r : table) stages.insert(r.stage);
  EXPECT_EQ(stages, (std::set<std::string>{"1", "2", "last"}));
  for (const auto& r : table) {
    if (r.stage == "last" && r.estimate == "fitted") EXPECT_DOUBLE_EQ(r.value.bias, 2.0);
  }
}

TEST(Format, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, 0.0}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Plot, EmptyInputGivesHeaderOnly) {
  const std::string csv = plot_csv("h", {});
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  EXPECT_EQ(lines, 2u);
}

TEST(Run, UnknownPresetFails) {
  EXPECT_EQ(code_of([] { run_experiment(preset_config("not-a-preset")); }), Errc::ConfigError);
}

TEST(Run, GaussVarSmokeWritesFilesAndIsDeterministic) {
  auto cfg = apply_overrides(preset_config("gauss-var", "smoke"), {"N=500", "B=500", "max-iter=3"});
  validate(cfg);
  const auto a = tmp_dir("run_a"), b = tmp_dir("run_b");
  const auto bundle = run_experiment(cfg);
  write_bundle(bundle, a);
  write_bundle(run_experiment(cfg), b);
  for (const char* f : {"config.json", "trace.ndjson", "timings.ndjson", "estimates.csv", "metrics.csv",
                        "replicates.csv", "training.csv", "bootstrap.csv"}) {
    EXPECT_TRUE(fs::exists(a / f)) << f;
  }
  for (const char* f : {"trace.ndjson", "estimates.csv", "metrics.csv", "training.csv", "bootstrap.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  EXPECT_EQ(read_config(a / "config.json"), cfg);
  EXPECT_EQ(metric_table(read_estimates(a / "estimates.csv")), bundle.metrics);

  emit_plotdata(a);
  const auto plot = read_csv(a / "plot_boxplot.csv");
  std::size_t expected = 0;
  for (const auto& s : bundle.stages) {
    expected += s.training_targets.size() + s.summary.B() + 2;
  }
  EXPECT_EQ(plot.rows.size(), expected);
  EXPECT_EQ(plot.config_hash, bundle.config_hash);
}

TEST(Run, TraceEndsWithStopRuleWhenConverged) {
  const auto cfg = preset_config("gauss-var", "smoke");
  const auto dir = tmp_dir("run_stop");
  const auto bundle = run_experiment(cfg);
  write_bundle(bundle, dir, false);
  const auto trace = seq::read_trace((dir / "trace.ndjson").string());
  for (const auto& r : bundle.replicates) {
    const seq::TraceRecord* last = nullptr;
    for (const auto& t : trace) {
      if (t.replicate == r.replicate) last = &t;
    }
    ASSERT_NE(last, nullptr);
    if (r.status != "converged") continue;
    EXPECT_TRUE(last->stopped);
    for (std::size_t p = 0; p < last->bias.size(); ++p) {
      EXPECT_LE(std::abs(last->bias[p]), cfg.gamma * last->sd[p]);
    }
  }
}

TEST(Run, SeriesPresetSmoke) {
  for (const char* id : {"svol", "ar1-replication"}) {
    const auto cfg = preset_config(id, "smoke");
    const auto bundle = run_experiment(cfg);
    EXPECT_EQ(bundle.replicates.size(), cfg.replicates);
    for (const auto& r : bundle.replicates) EXPECT_EQ(r.status, "estimated") << id << ": " << r.error;
    EXPECT_EQ(bundle.stages.size(), cfg.replicates * cfg.lengths.size());
  }
}
