#include "hypo/kalman.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hypo {

FhnGaussianScheme fhn_scheme_coeffs(double delta, double x, const Vec<double, 4>& th, int p, double s) {
  if (p != 2 && p != 3) throw UnsupportedOrder("fhn_scheme_coeffs: p=" + std::to_string(p) + " (supported: 2, 3)");
  if (!(delta > 0.0)) throw Error("fhn_scheme_coeffs: step must be positive");
  const double eps = th[0], gam = th[1], alpha = th[2], sig = th[3];
  const double d = delta, d2 = d * d, d3 = d2 * d;
  const double drift = x - x * x * x - s;
  const double slope = 1.0 - 3.0 * x * x;

  FhnGaussianScheme out;
  out.a[0] = x + d / eps * drift + d2 / (2.0 * eps * eps) * slope * drift - d2 / (2.0 * eps) * (gam * x + alpha);
  out.a[1] = (gam * x + alpha) * d;
  out.b[0] = -d / eps + (-slope + eps) * d2 / (2.0 * eps * eps);
  out.b[1] = 1.0 - d;

  const double s2 = sig * sig;
  out.sigma(0, 0) = d3 / 3.0 * s2 / (eps * eps);
  out.sigma(0, 1) = -d2 / 2.0 * s2 / eps;
  out.sigma(1, 0) = out.sigma(0, 1);
  out.sigma(1, 1) = d * s2;

  out.l1 = -sig / eps;
  out.l2 = sig / (eps * eps) * (-slope + eps);
  out.l3 = -sig;
  if (p == 3) {
    const double off = d3 * (sig * out.l2 / 6.0 + out.l1 * out.l3 / 3.0);
    out.sigma(0, 0) += d2 * d2 / 4.0 * out.l1 * out.l2;
    out.sigma(0, 1) += off;
    out.sigma(1, 0) += off;
    out.sigma(1, 1) += d2 * sig * out.l3;
  }
  return out;
}

FilterState kf_update(const FilterState& st, double x_prev, double x_new, double delta, const Vec<double, 4>& th,
                      int p, double s) {
  const auto sc = fhn_scheme_coeffs(delta, x_prev, th, p, s);
  const Vec<double, 2> mu = sc.a + sc.b * st.m;
  const Mat<double, 2, 2> lam = sc.sigma + sc.b * st.q * sc.b.transpose();
  const double lxx = lam(0, 0), lyx = lam(1, 0), lyy = lam(1, 1);
  if (!(lxx > 0.0))
    throw NotPositiveDefinite("kf_update: predictive variance of X is " + std::to_string(lxx), lxx);
  FilterState out;
  const double innov = x_new - mu[0];
  out.m = mu[1] + lyx / lxx * innov;
  out.q = lyy - lyx * lyx / lxx;
  // round-off can push an exact zero slightly negative
  if (out.q < 0.0) {
    if (out.q < -1e-12 * (std::abs(lyy) + 1e-300))
      throw NotPositiveDefinite("kf_update: negative filtering variance " + std::to_string(out.q), out.q);
    out.q = 0.0;
  }
  out.loglik = st.loglik - 0.5 * (std::log(2.0 * std::numbers::pi * lxx) + innov * innov / lxx);
  return out;
}

double marginal_loglik(std::span<const double> obs_x, const Vec<double, 4>& th, double delta, int p,
                       const KalmanPrior& prior, double s) {
  if (obs_x.size() < 2) throw Error("marginal_loglik: need at least two observations");
  if (!(prior.q0 >= 0.0)) throw ConfigError("kalman prior variance must be non-negative");
  FilterState st{prior.m0, prior.q0, 0.0};
  for (std::size_t k = 1; k < obs_x.size(); ++k) st = kf_update(st, obs_x[k - 1], obs_x[k], delta, th, p, s);
  return st.loglik;
}

}  // namespace hypo
