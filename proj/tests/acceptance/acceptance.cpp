#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "estim/core_math/parallel.hpp"
#include "estim/core_math/rng.hpp"
#include "estim/core_math/stats.hpp"
#include "estim/error.hpp"
#include "estim/harness/config.hpp"
#include "estim/harness/models.hpp"
#include "estim/harness/results_io.hpp"
#include "estim/harness/runner.hpp"
#include "estim/sequential/bootstrap.hpp"
#include "estim/sequential/bounds.hpp"
#include "estim/simulators/spatial.hpp"
#include "estim/ts_replicate/replicate.hpp"
#include "gradcheck.hpp"

using namespace estim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

harness::ExperimentConfig configured(const std::string& preset, const std::string& scale,
                                     const std::vector<std::string>& sets) {
  auto cfg = harness::apply_overrides(harness::preset_config(preset, scale), sets);
  harness::validate(cfg);
  return cfg;
}

// Observed data of replicate i, drawn from the same stream as the runner.
Tensor observed_iid(const harness::ExperimentConfig& cfg, const seq::Model& model, std::size_t i) {
  const auto truth = harness::transformed_truth(cfg);
  RngStream rng = RngStream(cfg.seed).derive(1).derive(i).derive(0);
  return model.simulate_raw(truth, rng);
}

const harness::StageRecord* final_stage(const harness::ResultBundle& b, std::size_t i) {
  const harness::StageRecord* out = nullptr;
  for (const auto& s : b.stages) {
    if (s.replicate == i && s.final) out = &s;
  }
  return out;
}

Outcome gradients() {
  std::size_t checked = 0, failed = 0;
  double worst = 0.0;
  for (const auto& c : gradcheck::gradient_cases()) {
    if (nn::parameter_count(nn::initialize(c.spec, 0)) > 1000) {
      return {false, c.name + " case exceeds 1000 weights"};
    }
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const auto r = gradcheck::gradient_check(c.spec, seed);
      checked += r.checked;
      failed += r.failed;
      worst = std::max(worst, r.worst);
    }
  }
  return {failed == 0, fmt("%zu entries over 5 layer kinds, %zu outside 1e-4, worst relative error %.2e",
                           checked, failed, worst)};
}

Outcome gaussian_convergence() {
  const auto cfg = configured("gauss-var", "small",
                              {"J=20", "N=2000", "B=2000", "gamma=0.3", "replicates=20", "max-iter=20"});
  const auto bundle = harness::run_experiment(cfg);
  const harness::GaussVarModel model(cfg.truth.at("mu"), cfg.J);
  std::size_t good = 0, quick = 0;
  std::vector<double> iters;
  for (const auto& r : bundle.replicates) {
    const auto* s = final_stage(bundle, r.replicate);
    if (r.status == "failed" || !s) continue;
    const double mle = model.mle(observed_iid(cfg, model, r.replicate))[0];
    if (std::abs(s->theta_hat[0] - mle) < 0.5 * s->summary.sd[0]) ++good;
    if (r.status == "converged" && r.trace.size() <= 10) ++quick;
    iters.push_back(double(r.trace.size()));
  }
  const double n = double(cfg.replicates);
  const double good_rate = good / n, quick_rate = quick / n;
  return {good_rate >= 0.8 && quick_rate >= 0.9,
          fmt("%zu seeds: |fitted - MLE| < 0.5 sd in %.0f%% (need 80%%), stopped within 10 iterations in "
              "%.0f%% (need 90%%), median iterations %.0f",
              cfg.replicates, 100 * good_rate, 100 * quick_rate, iters.empty() ? 0.0 : median(iters))};
}

Outcome coverage() {
  const auto cfg = configured("gauss-var", "small",
                              {"replicates=200", "N=1000", "B=1000", "max-iter=10", "seed=3"});
  const auto bundle = harness::run_experiment(cfg);
  const double truth = bundle.truth[0];
  std::size_t covered = 0, n = 0;
  for (const auto& r : bundle.replicates) {
    const auto* s = final_stage(bundle, r.replicate);
    if (r.status == "failed" || !s) continue;
    ++n;
    if (s->summary.lo[0] <= truth && truth <= s->summary.hi[0]) ++covered;
  }
  const double rate = n ? double(covered) / double(cfg.replicates) : 0.0;
  return {rate >= 0.88 && rate <= 0.99,
          fmt("%zu replicates (N=B=1000): truth inside the final 95%% bootstrap interval in %.3f "
              "(need [0.88, 0.99])",
              cfg.replicates, rate)};
}

// Final-iteration fitted (m1, log m2) per successful replicate.
std::map<std::size_t, std::array<double, 2>> moment_estimates(const harness::ResultBundle& b, bool log_scale) {
  std::map<std::size_t, std::array<double, 2>> out;
  for (const auto& r : b.replicates) {
    const auto* s = final_stage(b, r.replicate);
    if (r.status == "failed" || !s) continue;
    const double m2 = log_scale ? s->theta_hat[1] : (s->theta_hat[1] > 0 ? std::log(s->theta_hat[1]) : NAN);
    out[r.replicate] = {s->theta_hat[0], m2};
  }
  return out;
}

Outcome transformation_benefit() {
  const std::vector<std::string> common{"replicates=20", "N=2000", "B=2000", "max-iter=20", "seed=4"};
  auto with = common, raw = common;
  with.push_back("transforms=[\"identity\",\"log\"]");
  raw.push_back("transforms=[\"identity\",\"identity\"]");
  const auto cfg_t = configured("gauss-moments", "small", with);
  const auto cfg_r = configured("gauss-moments", "small", raw);
  const auto bt = harness::run_experiment(cfg_t);
  const auto br = harness::run_experiment(cfg_r);
  const auto et = moment_estimates(bt, true);
  const auto er = moment_estimates(br, false);
  const auto truth = tf::moment_map(cfg_t.truth.at("mu"), cfg_t.truth.at("sigma2"));
  auto rmse = [&](const std::map<std::size_t, std::array<double, 2>>& e, int p) -> double {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& [i, v] : e) {
      if (!std::isfinite(v[p])) return INFINITY;
      s += (v[p] - truth[p]) * (v[p] - truth[p]);
      ++n;
    }
    return n ? std::sqrt(s / double(n)) : INFINITY;
  };
  const double t1 = rmse(et, 0), t2 = rmse(et, 1), r1 = rmse(er, 0), r2 = rmse(er, 1);
  // Second moment on its raw scale, for reference only.
  auto raw_m2 = [&](const std::map<std::size_t, std::array<double, 2>>& e) {
    double s = 0.0;
    for (const auto& [i, v] : e) s += std::pow(std::exp(v[1]) - std::exp(truth[1]), 2);
    return e.empty() ? INFINITY : std::sqrt(s / double(e.size()));
  };
  return {t1 < r1 && t2 < r2,
          fmt("final RMSE on the (m1, log m2) scale: transformed (%.4f, %.4f) over %zu seeds, raw (%.4f, %.4f) "
              "over %zu seeds; raw-scale m2 RMSE %.4f vs %.4f",
              t1, t2, et.size(), r1, r2, er.size(), raw_m2(et), raw_m2(er))};
}

Outcome brown_resnick_validity() {
  const sim::Grid2D grid{16, 16, 1.0};
  const sim::BrownResnickSimulator br({6.2, 1.0}, grid);
  const std::size_t R = 10000, site = 8 * 16 + 8;
  std::vector<double> single(R), maxima(R);
  const RngStream root(5);
  parallel_for(R, [&](std::size_t r) {
    RngStream a = root.derive(0).derive(r);
    single[r] = br.sample(a)[site];
    RngStream b = root.derive(1).derive(r);
    double m = 0.0;
    for (int k = 0; k < 5; ++k) m = std::max(m, br.sample(b)[site]);
    maxima[r] = m / 5.0;
  });
  const auto frechet = [](double x) { return x <= 0.0 ? 0.0 : std::exp(-1.0 / x); };
  const auto ks1 = ks_test(single, frechet);
  const auto ks2 = ks_test(maxima, frechet);
  // Two-sample KS of the rescaled maxima against the single realisations.
  std::vector<double> a = single, b = maxima;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  for (std::size_t i = 0, j = 0; i < a.size() && j < b.size();) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / double(a.size()) - double(j) / double(b.size())));
  }
  const double ne = double(a.size()) * double(b.size()) / double(a.size() + b.size());
  const KsResult ks3{d, kolmogorov_survival(std::sqrt(ne) * d)};
  const bool ok = ks1.p_value > 0.01 && ks2.p_value > 0.01 && ks3.p_value > 0.01 && br.budget_hits() == 0;
  return {ok, fmt("16x16, 10^4 replicates at one site: Frechet KS p = %.3f; max of 5 / 5 vs Frechet p = %.3f, "
                  "vs single realisations p = %.3f; truncated draws %zu",
                  ks1.p_value, ks2.p_value, ks3.p_value, br.budget_hits())};
}

Outcome brown_resnick_sequential() {
  const auto cfg = configured("brown-resnick", "small", {"grid=16", "N=1500", "replicates=20"});
  const auto bundle = harness::run_experiment(cfg);
  std::map<std::pair<std::string, std::string>, harness::Metric> m;
  for (const auto& row : bundle.metrics) {
    if (row.estimate == "fitted") m[{row.stage, row.parameter}] = row.value;
  }
  bool ok = true;
  std::string detail;
  std::size_t failed = 0;
  for (const auto& r : bundle.replicates) failed += r.status == "failed";
  for (const auto& p : bundle.param_names) {
    if (!m.count({"1", p}) || !m.count({"last", p})) {
      ok = false;
      detail += p + ": missing stage; ";
      continue;
    }
    const auto& a = m[{"1", p}];
    const auto& b = m[{"last", p}];
    ok = ok && std::abs(b.bias) < std::abs(a.bias) && b.sd < a.sd && b.rmse < a.rmse;
    detail += fmt("%s |bias| %.3f->%.3f sd %.3f->%.3f rmse %.3f->%.3f; ", p.c_str(), std::abs(a.bias),
                  std::abs(b.bias), a.sd, b.sd, a.rmse, b.rmse);
  }
  detail += fmt("%zu failed replicates", failed);
  return {ok, detail};
}

Outcome replication_estimator() {
  const auto cfg = configured("ar1-replication", "small",
                              {"replicates=200", "T_k=1000", "lengths=[200]", "model.truth.rho=0.9", "estimator=\"mle\""});
  const auto bundle = harness::run_experiment(cfg);
  const harness::Ar1Model model(cfg.T_k, tf::by_id(cfg.transforms[0]));
  const auto truth = harness::transformed_truth(cfg);
  std::vector<double> gap, sds;
  for (const auto& s : bundle.stages) {
    RngStream data = RngStream(cfg.seed).derive(1).derive(s.replicate).derive(0).derive(0);
    const Tensor x0 = model.simulate_length(truth, 200, data);
    gap.push_back(std::abs(s.theta_hat[0] - ts::ar1_mle(x0.values())));
    sds.push_back(s.summary.sd[0]);
  }
  const double target = std::sqrt((1 - 0.81) / 200.0);
  const double mg = gap.empty() ? INFINITY : mean(gap);
  const double ms = sds.empty() ? 0.0 : mean(sds);
  const double rel = std::abs(ms / target - 1.0);
  return {gap.size() == 200 && mg < 0.02 && rel <= 0.15,
          fmt("%zu seeds: mean |MLE(replicated) - MLE(original)| = %.4f (need < 0.02); rescaled bootstrap sd "
              "%.4f vs %.4f, off by %.1f%% (need <= 15%%)",
              gap.size(), mg, ms, target, 100 * rel)};
}

Outcome svol_lengths() {
  const auto cfg = configured("svol", "small",
                              {"T_k=1000", "N=2000", "B=1000", "lengths=[250,500,1000]", "replicates=10"});
  const auto bundle = harness::run_experiment(cfg);
  const auto& truth = bundle.truth;
  std::map<std::string, std::vector<std::vector<double>>> sd;  // stage -> per-param sds
  std::vector<std::size_t> covered(truth.size(), 0);
  std::size_t cells = 0;
  for (const auto& s : bundle.stages) {
    auto& v = sd[s.stage];
    v.resize(truth.size());
    for (std::size_t p = 0; p < truth.size(); ++p) {
      v[p].push_back(s.summary.sd[p]);
      if (s.summary.lo[p] <= truth[p] && truth[p] <= s.summary.hi[p]) ++covered[p];
    }
    ++cells;
  }
  bool ok = cells == cfg.replicates * cfg.lengths.size();
  std::string detail = fmt("truth (%.4f, %.4f); median sd by T:", truth[0], truth[1]);
  std::vector<double> prev(truth.size(), INFINITY);
  for (std::size_t T : cfg.lengths) {
    auto& v = sd["T" + std::to_string(T)];
    detail += fmt(" T=%zu", T);
    for (std::size_t p = 0; p < truth.size(); ++p) {
      const double m = v.size() == truth.size() ? median(v[p]) : NAN;
      ok = ok && m < prev[p];
      prev[p] = m;
      detail += fmt(" %.4f", m);
    }
  }
  for (std::size_t p = 0; p < truth.size(); ++p) {
    const double rate = cells ? double(covered[p]) / double(cells) : 0.0;
    ok = ok && rate >= 0.8;
    detail += fmt("; coverage %s %.2f", bundle.param_names[p].c_str(), rate);
  }
  return {ok, detail + " (need >= 0.80)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const fs::path base = fs::path(ESTIM_TEST_TMP) / "determinism";
  std::size_t same = 0;
  std::string diffs;
  for (const auto& id : harness::preset_ids()) {
    const auto cfg = configured(id, "smoke", {"seed=11"});
    std::string text[2][2];
    for (int run = 0; run < 2; ++run) {
      // The second run is single-threaded, so scheduling cannot leak into results.
      if (run == 1) setenv("ESTIM_THREADS", "1", 1);
      const fs::path dir = base / (id + "_" + std::to_string(run));
      fs::remove_all(dir);
      harness::write_bundle(harness::run_experiment(cfg), dir, false);
      text[run][0] = slurp(dir / "metrics.csv");
      text[run][1] = slurp(dir / "trace.ndjson");
      unsetenv("ESTIM_THREADS");
    }
    if (text[0][0] == text[1][0] && text[0][1] == text[1][1] && !text[0][1].empty()) {
      ++same;
    } else {
      diffs += " " + id;
    }
  }
  const std::size_t n = harness::preset_ids().size();
  return {same == n, fmt("%zu of %zu presets byte-identical in metrics.csv and trace.ndjson", same, n) +
                         (diffs.empty() ? "" : "; differ:" + diffs)};
}

Outcome bound_oracle() {
  const std::vector<double> theta{1.0};
  const auto s = seq::summarize_bootstrap(theta, Tensor::from_rows({{0.5}, {1.0}, {1.5}}));
  const auto basic = seq::update_bounds(theta, s, seq::BoundsRule::Basic);
  const auto literal = seq::update_bounds(theta, s, seq::BoundsRule::Literal);
  // Hand values: 1 + Q_0.025({-0.5, 0, 0.5}) = 1 - 0.475, 1 + Q_0.975 = 1 + 0.475;
  // literal collapses to (1.45, 1.475), which excludes the centre 1, so the
  // guard recentres to 1 -+ S with S = 0.5.
  const bool ok = basic.bounds.lo[0] == 1.0 - 0.475 && basic.bounds.hi[0] == 1.0 + 0.475 &&
                  !basic.widened[0] && literal.bounds.lo[0] == 0.5 && literal.bounds.hi[0] == 1.5 &&
                  literal.widened[0];
  return {ok, fmt("basic (%.17g, %.17g), literal after guard (%.17g, %.17g)", basic.bounds.lo[0],
                  basic.bounds.hi[0], literal.bounds.lo[0], literal.bounds.hi[0])};
}

struct Criterion {
  const char* name;
  Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  const Criterion all[] = {
      {"gradient correctness", gradients},
      {"gaussian single-parameter convergence", gaussian_convergence},
      {"coverage calibration", coverage},
      {"transformation benefit", transformation_benefit},
      {"brown-resnick simulator validity", brown_resnick_validity},
      {"brown-resnick sequential improvement", brown_resnick_sequential},
      {"replication estimator", replication_estimator},
      {"svol multi-length behaviour", svol_lengths},
      {"determinism", determinism},
      {"bound-update oracle", bound_oracle},
  };
  int only = 0;
  for (int a = 1; a < argc; ++a) {
    const std::string arg = argv[a];
    if (arg == "--only" && a + 1 < argc) {
      only = std::atoi(argv[++a]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > 10) {
    std::fprintf(stderr, "criterion must be 1..10\n");
    return 2;
  }
  int failures = 0;
  for (int k = 1; k <= 10; ++k) {
    if (only && k != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[k - 1].run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d %-40s %s  [%.1fs] %s\n", k, all[k - 1].name, o.pass ? "PASS" : "FAIL", secs,
                o.detail.c_str());
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures ? 1 : 0;
}
