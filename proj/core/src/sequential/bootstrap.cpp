#include "estim/sequential/bootstrap.hpp"

#include <algorithm>
#include <sstream>

#include "estim/core_math/parallel.hpp"
#include "estim/core_math/stats.hpp"
#include "estim/error.hpp"

namespace estim::seq {

Sampler Model::bind(std::span<const double> theta) const {
  std::vector<double> t(theta.begin(), theta.end());
  return [this, t](RngStream& rng) { return simulate(t, rng); };
}

BootstrapSummary summarize_bootstrap(std::span<const double> theta_hat, Tensor samples,
                                     double alpha_lo, double alpha_hi, double rescale) {
  if (samples.rank() != 2 || samples.dim(0) < 2) {
    throw Error(Errc::EmptySample, "bootstrap summary needs a B x P sample matrix with B >= 2");
  }
  const std::size_t B = samples.dim(0);
  const std::size_t P = samples.dim(1);
  if (theta_hat.size() != P) throw Error(Errc::ShapeMismatch, "theta_hat length differs from P");
  if (!(alpha_lo < alpha_hi)) throw Error(Errc::InvalidArgument, "interval levels out of order");
  BootstrapSummary s;
  s.theta_hat.assign(theta_hat.begin(), theta_hat.end());
  s.alpha_lo = alpha_lo;
  s.alpha_hi = alpha_hi;
  s.rescale = rescale;
  std::vector<double> col(B);
  for (std::size_t p = 0; p < P; ++p) {
    for (std::size_t b = 0; b < B; ++b) col[b] = samples(b, p);
    const double sd = sample_sd(col);
    std::sort(col.begin(), col.end());
    const double med = quantile_sorted(col, 0.5);
    double lo = quantile_sorted(col, alpha_lo);
    double hi = quantile_sorted(col, alpha_hi);
    if (rescale != 1.0) {
      lo = med + rescale * (lo - med);
      hi = med + rescale * (hi - med);
    }
    s.median.push_back(med);
    s.sd.push_back(rescale * sd);
    s.bias.push_back(theta_hat[p] - med);
    s.lo.push_back(lo);
    s.hi.push_back(hi);
  }
  s.samples = std::move(samples);
  return s;
}

std::vector<double> estimate(const nn::TrainedNetwork& net, const Tensor& x0) {
  if (x0.shape() != net.spec.input_shape) {
    std::ostringstream os;
    os << "observed data has " << x0.size() << " values in rank " << x0.rank()
       << ", network expects rank " << net.spec.input_shape.size() << " input";
    throw Error(Errc::ShapeMismatch, os.str());
  }
  return nn::predict_one(net, x0.values());
}

BootstrapSummary bootstrap_with(const Estimator& estimator, const Sampler& sampler,
                                std::span<const double> theta_hat, std::size_t B,
                                const RngStream& rng, double rescale, double alpha_lo,
                                double alpha_hi) {
  if (B < 2) throw Error(Errc::EmptySample, "bootstrap needs B >= 2");
  const std::size_t P = theta_hat.size();
  Tensor samples = Tensor::matrix(B, P);
  parallel_for(B, [&](std::size_t b) {
    RngStream r = rng.derive(b);
    const auto est = estimator(sampler(r));
    if (est.size() != P) throw Error(Errc::ShapeMismatch, "estimator output length differs from P");
    std::copy(est.begin(), est.end(), samples.row(b).begin());
  });
  return summarize_bootstrap(theta_hat, std::move(samples), alpha_lo, alpha_hi, rescale);
}

BootstrapSummary bootstrap_uncertainty(const nn::TrainedNetwork& net, const Model& model,
                                       std::span<const double> theta_hat, std::size_t B,
                                       const RngStream& rng) {
  model.check_domain(theta_hat);
  const Sampler sampler = model.bind(theta_hat);
  return bootstrap_with([&net](const Tensor& x) { return nn::predict_one(net, x.values()); },
                        sampler, theta_hat, B, rng);
}

Tensor simulate_rows(const Model& model, const Tensor& thetas, const RngStream& rng) {
  const std::size_t N = thetas.dim(0);
  auto shape = model.data_shape();
  const std::size_t width = shape_product(shape);
  shape.insert(shape.begin(), N);
  Tensor out(shape);
  parallel_for(N, [&](std::size_t n) {
    RngStream r = rng.derive(n);
    const Tensor x = model.simulate(thetas.row(n), r);
    if (x.size() != width) throw Error(Errc::ShapeMismatch, "simulated record has wrong size");
    std::copy_n(x.data(), width, out.data() + n * width);
  });
  return out;
}

}  // namespace estim::seq
