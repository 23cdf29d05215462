#include "estim/harness/runner.hpp"

#include <chrono>
#include <cmath>
#include <memory>

#include "estim/core_math/parallel.hpp"
#include "estim/error.hpp"
#include "estim/harness/models.hpp"
#include "estim/neural/train.hpp"
#include "estim/sequential/bootstrap.hpp"
#include "estim/simulators/dataset_csv.hpp"
#include "estim/simulators/spatial.hpp"
#include "estim/transforms/transforms.hpp"

namespace estim::harness {

namespace {

bool is_gauss(const std::string& preset) {
  return preset == "gauss-var" || preset == "gauss-meanvar" || preset == "gauss-moments";
}

bool is_series(const std::string& preset) { return preset == "svol" || preset == "ar1-replication"; }

sim::Grid2D grid_of(const ExperimentConfig& cfg) { return {cfg.grid, cfg.grid, cfg.spacing}; }

std::unique_ptr<seq::Model> make_model(const ExperimentConfig& cfg) {
  const auto& p = cfg.preset;
  if (p == "gauss-var") return std::make_unique<GaussVarModel>(cfg.truth.at("mu"), cfg.J, cfg.sort_inputs);
  if (p == "gauss-meanvar") {
    return std::make_unique<GaussMeanVarModel>(cfg.J, tf::by_id(cfg.transforms[1]), cfg.sort_inputs);
  }
  if (p == "gauss-moments") {
    return std::make_unique<GaussMomentsModel>(cfg.J, cfg.transforms[1] == "log", cfg.sort_inputs);
  }
  if (p == "brown-resnick") return std::make_unique<BrownResnickModel>(grid_of(cfg));
  if (p == "svol") {
    return std::make_unique<SvolModel>(cfg.T_k, cfg.truth.at("sigma"), cfg.svol_scaled);
  }
  return std::make_unique<Ar1Model>(cfg.T_k, tf::by_id(cfg.transforms[0]));
}

// Gaussian presets start from a raw-scale box mapped through the transforms.
seq::ParamBounds gauss_box(const ExperimentConfig& cfg) {
  const double e = std::exp(1.0), em2 = std::exp(-2.0);
  if (cfg.preset == "gauss-var") return {{std::log(em2)}, {std::log(e)}};
  const auto& t = tf::by_id(cfg.transforms[1]);
  const double lo = cfg.preset == "gauss-moments" ? 0.25 + em2 : em2;
  const double hi = cfg.preset == "gauss-moments" ? 0.25 + e : e;
  return {{-0.5, t.apply(lo)}, {0.5, t.apply(hi)}};
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Observed datasets: simulated from the truth, or read from observed_csv.
Tensor observed_raw(const ExperimentConfig& cfg, const seq::Model& model,
                    std::span<const double> truth, RngStream rng) {
  if (cfg.observed_csv.empty()) return model.simulate_raw(truth, rng);
  auto ds = sim::read_dataset_csv(cfg.observed_csv);
  if (ds.replicates.empty()) throw Error(Errc::IoError, cfg.observed_csv + " holds no dataset");
  Tensor x = ds.replicates.front();
  const auto shape = model.data_shape();
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  if (x.size() != n) {
    throw Error(Errc::ShapeMismatch, cfg.observed_csv + " does not match the model's data shape");
  }
  return Tensor(shape, x.storage());
}

void run_sequential_preset(const ExperimentConfig& cfg, ResultBundle& out) {
  auto model = make_model(cfg);
  const RngStream root(cfg.seed);
  const std::size_t I = cfg.replicates;
  std::vector<ReplicateRecord> reps(I);
  std::vector<std::vector<StageRecord>> stages(I);

  parallel_for(I, [&](std::size_t i) {
    try {
      const RngStream rep = root.derive(1).derive(i);
      const Tensor raw = observed_raw(cfg, *model, out.truth, rep.derive(0));
      const Tensor x0 = model->featurize(raw);

      seq::SequentialConfig s;
      s.initial_bounds = cfg.bounds_lo.empty() ? default_bounds(cfg, raw)
                                               : seq::ParamBounds{cfg.bounds_lo, cfg.bounds_hi};
      s.network = network_for(cfg, model->data_shape());
      s.train = cfg.train;
      s.n_train = cfg.N;
      s.n_boot = cfg.B;
      s.gamma = cfg.gamma;
      s.max_iterations = cfg.max_iterations;
      s.growth = cfg.growth;
      s.growth_rate = cfg.growth_rate;
      s.replay = cfg.replay;
      s.replay_fraction = cfg.replay_fraction;
      s.rule = seq::bounds_rule_from_string(cfg.bounds_rule);
      s.warm_start = cfg.warm_start;
      s.keep_training_targets = true;

      RngStream seeder = rep.derive(1);
      const std::uint64_t run_seed = seeder.next_u64();
      auto res = seq::run_sequential(*model, x0, s, run_seed);

      ReplicateRecord& r = reps[i];
      r.replicate = i;
      r.run_seed = run_seed;
      r.status = res.status == seq::RunStatus::Converged ? "converged" : "not_converged";
      for (std::size_t k = 0; k < res.trace.size(); ++k) {
        auto& t = res.trace[k];
        StageRecord st;
        st.replicate = i;
        st.stage = std::to_string(t.iteration);
        st.final = k + 1 == res.trace.size();
        st.theta_hat = t.theta_hat;
        st.summary = t.summary;
        st.training_targets = std::move(t.training_targets);
        st.wall_seconds = t.wall_seconds;
        stages[i].push_back(std::move(st));
        t.training_targets = Tensor();
      }
      r.trace = std::move(res.trace);
    } catch (const Error& e) {
      if (e.code() == Errc::ConfigError || e.code() == Errc::IoError) {
        throw e.with_context("replicate " + std::to_string(i));
      }
      reps[i] = ReplicateRecord{};
      reps[i].replicate = i;
      reps[i].status = "failed";
      reps[i].error = e.what();
      stages[i].clear();
    }
  });

  out.replicates = std::move(reps);
  for (auto& s : stages) {
    for (auto& st : s) out.stages.push_back(std::move(st));
  }
}

void run_series_preset(const ExperimentConfig& cfg, ResultBundle& out) {
  auto model = make_model(cfg);
  const RngStream root(cfg.seed);
  const auto& t0 = tf::by_id(cfg.transforms[0]);

  ts::SeriesEstimator estimator;
  if (cfg.estimator == "mle") {
    estimator = [&t0](const Tensor& x) { return std::vector<double>{t0.apply(ts::ar1_mle(x.values()))}; };
  } else {
    const RngStream tr = root.derive(0);
    seq::ParamBounds box = cfg.bounds_lo.empty() ? default_bounds(cfg, Tensor())
                                                 : seq::ParamBounds{cfg.bounds_lo, cfg.bounds_hi};
    RngStream prior = tr.derive(0);
    TrainingSet data;
    data.targets = seq::sample_prior(box, cfg.N, prior);
    data.inputs = seq::simulate_rows(*model, data.targets, tr.derive(1));
    for (std::size_t n = 0; n < cfg.N; ++n) {
      data.ids.push_back(n);
      data.origin_iteration.push_back(0);
      data.replayed.push_back(0);
    }
    nn::TrainConfig tc = cfg.train;
    RngStream seeder = tr.derive(2);
    tc.seed = seeder.next_u64();
    out.shared_network = nn::train(network_for(cfg, model->data_shape()), data, tc);
    out.has_shared_network = true;
    const nn::TrainedNetwork* net = &out.shared_network;
    estimator = [net](const Tensor& x) { return seq::estimate(*net, x); };
  }

  ts::SeriesSimulator simulator;
  simulator.check_domain = [&model](std::span<const double> theta) { model->check_domain(theta); };
  if (cfg.preset == "svol") {
    const auto* m = static_cast<const SvolModel*>(model.get());
    simulator.simulate = [m](std::span<const double> th, std::size_t T, RngStream& rng) {
      return m->simulate_length(th, T, rng);
    };
  } else {
    const auto* m = static_cast<const Ar1Model*>(model.get());
    simulator.simulate = [m](std::span<const double> th, std::size_t T, RngStream& rng) {
      return m->simulate_length(th, T, rng);
    };
  }
  const auto mode = cfg.ts_bootstrap == "observed-length" ? ts::TsBootstrap::ObservedLength
                                                          : ts::TsBootstrap::TrainingLength;

  std::vector<std::size_t> lengths = cfg.lengths;
  Tensor observed;
  if (!cfg.observed_csv.empty()) {
    observed = sim::read_series_csv(cfg.observed_csv);
    lengths = {observed.size()};
  }

  const std::size_t I = cfg.replicates;
  std::vector<ReplicateRecord> reps(I);
  std::vector<std::vector<StageRecord>> stages(I);
  parallel_for(I, [&](std::size_t i) {
    try {
      const RngStream rep = root.derive(1).derive(i);
      reps[i].replicate = i;
      reps[i].status = "estimated";
      for (std::size_t j = 0; j < lengths.size(); ++j) {
        const auto start = std::chrono::steady_clock::now();
        const RngStream cell = rep.derive(j);
        Tensor x0 = observed;
        if (x0.empty()) {
          RngStream data = cell.derive(0);
          x0 = simulator.simulate(out.truth, lengths[j], data);
        }
        auto est = ts::estimate_any(x0, estimator, cfg.T_k, simulator, cfg.B, cell.derive(1),
                                    ts::Combine::Mean, mode);
        StageRecord st;
        st.replicate = i;
        st.stage = "T" + std::to_string(lengths[j]);
        st.theta_hat = est.theta_hat;
        st.summary = std::move(est.summary);
        st.plan = est.plan;
        st.wall_seconds = seconds_since(start);
        stages[i].push_back(std::move(st));
      }
    } catch (const Error& e) {
      throw e.with_context("replicate " + std::to_string(i));
    }
  });

  out.replicates = std::move(reps);
  for (auto& s : stages) {
    for (auto& st : s) out.stages.push_back(std::move(st));
  }
}

}  // namespace

std::vector<double> transformed_truth(const ExperimentConfig& cfg) {
  const auto& t = cfg.truth;
  const auto& p = cfg.preset;
  if (p == "gauss-var") return {std::log(t.at("sigma2"))};
  if (p == "gauss-meanvar") return {t.at("mu"), tf::by_id(cfg.transforms[1]).apply(t.at("sigma2"))};
  if (p == "gauss-moments") {
    const double second = t.at("mu") * t.at("mu") + t.at("sigma2");
    return {t.at("mu"), tf::by_id(cfg.transforms[1]).apply(second)};
  }
  if (p == "brown-resnick") return {tf::log().apply(t.at("lambda")), tf::logit2().apply(t.at("nu"))};
  if (p == "svol") return {tf::fisher().apply(t.at("rho")), tf::log_shift2().apply(t.at("nu"))};
  return {tf::by_id(cfg.transforms[0]).apply(t.at("rho"))};
}

seq::ParamBounds default_bounds(const ExperimentConfig& cfg, const Tensor& raw_x0) {
  if (is_gauss(cfg.preset)) return gauss_box(cfg);
  const double c = cfg.init_offset;
  if (cfg.preset == "brown-resnick") {
    const sim::Grid2D grid = grid_of(cfg);
    const auto fit = sim::fit_powexp(grid, std::span(&raw_x0, 1));
    const double centre = std::log(fit.alpha);
    return {{centre - c, tf::logit2().apply(0.1)}, {centre + c, tf::logit2().apply(1.9)}};
  }
  const auto truth = transformed_truth(cfg);
  seq::ParamBounds box;
  for (double v : truth) {
    box.lo.push_back(v - c);
    box.hi.push_back(v + c);
  }
  return box;
}

nn::NetworkSpec network_for(const ExperimentConfig& cfg, std::vector<std::size_t> input_shape) {
  nn::NetworkSpec spec;
  spec.input_shape = std::move(input_shape);
  spec.layers = cfg.layers;
  const std::size_t P = transformed_truth(cfg).size();
  spec.layers.push_back(nn::LayerSpec::dense(P));
  spec.output_dim = P;
  return spec;
}

ResultBundle run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  ResultBundle out;
  out.config = cfg;
  out.config_hash = config_hash(cfg);
  out.truth = transformed_truth(cfg);
  out.param_names = make_model(cfg)->param_names();
  if (is_series(cfg.preset)) {
    run_series_preset(cfg, out);
  } else {
    run_sequential_preset(cfg, out);
  }
  out.metrics = metric_table(estimate_rows(out));
  return out;
}

std::vector<EstimateRow> estimate_rows(const ResultBundle& bundle) {
  std::vector<EstimateRow> rows;
  for (const auto& st : bundle.stages) {
    for (std::size_t p = 0; p < bundle.truth.size(); ++p) {
      rows.push_back({st.replicate, st.stage, st.final, bundle.param_names[p], bundle.truth[p],
                      st.theta_hat[p], st.summary.median[p], st.summary.sd[p], st.summary.lo[p],
                      st.summary.hi[p]});
    }
  }
  return rows;
}

}  // namespace estim::harness
