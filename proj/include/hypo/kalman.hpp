#pragma once

#include <span>

#include "hypo/types.hpp"

namespace hypo {

// One-step conditionally Gaussian scheme of the FitzHugh-Nagumo model, linear in the hidden Y:
// Z' = a(D, x) + b(D, x) Y + N(0, Sigma_p(D, x)).
struct FhnGaussianScheme {
  Vec<double, 2> a;
  Vec<double, 2> b;
  Mat<double, 2, 2> sigma;
  double l1 = 0.0, l2 = 0.0, l3 = 0.0;
};

// theta = (eps, gamma, alpha, sigma); p in {2, 3}.
FhnGaussianScheme fhn_scheme_coeffs(double delta, double x, const Vec<double, 4>& th, int p, double s = 0.01);

struct FilterState {
  double m = 0.0;  // E[Y_k | X_0..k]
  double q = 1.0;  // Var[Y_k | X_0..k]
  double loglik = 0.0;
};

struct KalmanPrior {
  double m0 = 0.0;
  double q0 = 1.0;
};

FilterState kf_update(const FilterState& st, double x_prev, double x_new, double delta, const Vec<double, 4>& th,
                      int p, double s = 0.01);

// log f_{p,n} without the theta-free density of X_0.
double marginal_loglik(std::span<const double> obs_x, const Vec<double, 4>& th, double delta, int p,
                       const KalmanPrior& prior = {}, double s = 0.01);

}  // namespace hypo
