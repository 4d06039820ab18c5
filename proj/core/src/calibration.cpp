#include <cmath>
#include <numbers>

#include "bagcv/amse.hpp"
#include "bagcv/cv.hpp"
#include "bagcv/error.hpp"
#include "bagcv/parallel.hpp"
#include "bagcv/quadrature.hpp"
#include "bagcv/rng.hpp"

namespace bagcv {

namespace {

double sample_variance(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

}  // namespace

double rv_asymptotic_reference() {
  // rho(u) = phi_sqrt2(u) (1 - u^2/2) - 2 phi(u) (1 - u^2)
  const auto rho = [](double u) {
    const double u2 = u * u;
    return kernel_selfconv(u) * (1.0 - 0.5 * u2) - 2.0 * kernel_eval(u) * (1.0 - u2);
  };
  const double r_rho = integrate([&](double u) { return rho(u) * rho(u); }, -40.0, 40.0).value;
  return 0.25 * r_rho;
}

RvCalibration calibrate_rv_report(std::uint64_t seed, std::size_t replicates, unsigned threads) {
  if (replicates < 2) throw DomainError("calibrate_rv: need at least two replicates");
  const GaussianMixture normal = preset(Preset::std_normal);
  const DensityFunctionals fn = functionals_mixture(normal);
  const double a_per_rv = a_constant(fn, gaussian_constants(1.0));

  RvCalibration rep;
  rep.seed = seed;
  rep.replicates = replicates;
  rep.sizes = {1000, 2000};
  for (std::size_t m : rep.sizes) {
    const double h0 = h_mise(normal, m);
    const std::uint64_t level_seed = derive_seed(seed, m);
    std::vector<double> ratio(replicates);
    parallel_for(replicates, threads, [&](std::size_t i) {
      const Sample x = mixture_sample(normal, m, derive_seed(level_seed, i));
      ratio[i] = cv_minimize(x).h_opt / h0;
    });
    const double a_hat = sample_variance(ratio) * std::pow(static_cast<double>(m), 0.2);
    rep.a_hat.push_back(a_hat);
    rep.r_v_by_size.push_back(a_hat / a_per_rv);
  }
  rep.r_v = 0.5 * (rep.r_v_by_size[0] + rep.r_v_by_size[1]);
  rep.disagreement =
      std::abs(rep.a_hat[0] - rep.a_hat[1]) / (0.5 * (rep.a_hat[0] + rep.a_hat[1]));
  rep.consistent = rep.disagreement <= 0.25;

  const KernelConstants kc = gaussian_constants(rep.r_v);
  rep.d1_m0 = amse_model(functionals_mixture(preset(Preset::D1)), kc, 100000, 500).m_hat;
  rep.claw_m0 = amse_model(functionals_mixture(preset(Preset::D2_claw)), kc, 100000, 500).m_hat;
  rep.d1_within_10pct =
      std::abs(static_cast<double>(rep.d1_m0) - d1_m0_target) <= 0.1 * d1_m0_target;
  rep.r_v_asymptotic = rv_asymptotic_reference();
  return rep;
}

double calibrate_rv(std::uint64_t seed, std::size_t replicates, unsigned threads) {
  if (replicates < 500) throw DomainError("calibrate_rv: need at least 500 replicates");
  const RvCalibration rep = calibrate_rv_report(seed, replicates, threads);
  if (!rep.consistent) {
    throw NumericalError("calibrate_rv: estimates at n=1000 and n=2000 disagree by " +
                         std::to_string(100.0 * rep.disagreement) + "%");
  }
  return rep.r_v;
}

}  // namespace bagcv
