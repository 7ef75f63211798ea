#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hypo/kalman.hpp"
#include "hypo/moments.hpp"
#include "hypo/simulate.hpp"

namespace hypo {

struct MomentEstimate {
  VectorXd mean;
  MatrixXd cov;
  MatrixXd second;  // E[m m^T]
  VectorXd mean_se;
  MatrixXd second_se;
  long n_draws = 0;
};

struct McOptions {
  long n_draws = 100000;  // even: draws come in antithetic pairs
  int substeps = 100;
  std::uint64_t seed = 1;
  bool whiten = true;  // rescale the Gaussian inputs to exact empirical second moments
};

namespace detail {

// Lower Cholesky factor of the empirical second moment of the first n_pairs standard normal
// q-vectors of the stream (seed). Cached per (seed, n_pairs, q).
const MatrixXd& whitening_factor(std::uint64_t seed, long n_pairs, int q);

inline constexpr long kMcChunk = 512;

// n x q block of standard normals for chunk c of the stream.
RowMatrixXd normal_chunk(std::uint64_t seed, long chunk, long rows, int q);

// Lower Cholesky factor of the covariance of (I_0, I_1, I_2) / (h^{1/2}, h^{3/2}, h^{5/2}),
// I_k = int_0^h (h - s)^k / k! dW_s.
const Mat<double, 3, 3>& iterated_integral_factor();

}  // namespace detail

// End states of n_draws one-step transitions from x over delta. Each transition takes `substeps`
// locally linearized steps (drift Jacobian and Ito correction by central differences of the raw drift),
// with Brownian input expanded in the iterated integrals I_0..I_2.
template <HypoModel M>
RowMatrixXd mc_transition_samples(const M& m, const Vec<double, M::kN>& x, const Vec<double, M::kP>& th,
                                  double delta, const McOptions& opt) {
  constexpr int N = M::kN, D = M::kD;
  using V = Vec<double, N>;
  using Mn = Mat<double, N, N>;
  if (opt.n_draws < 2 || opt.n_draws % 2 != 0) throw Error("mc_transition_samples: n_draws must be even and >= 2");
  if (opt.substeps < 1) throw Error("mc_transition_samples: substeps must be positive");
  if (!(delta > 0.0)) throw Error("mc_transition_samples: step must be positive");
  const int q = opt.substeps * D * 3;
  const long pairs = opt.n_draws / 2;
  const double h = delta / opt.substeps;
  const double sh[3] = {std::sqrt(h), h * std::sqrt(h), h * h * std::sqrt(h)};
  const auto& c3 = detail::iterated_integral_factor();
  const MatrixXd* wl = opt.whiten ? &detail::whitening_factor(opt.seed, pairs, q) : nullptr;

  auto step = [&](const V& y, const double* xi, double sign) -> V {
    const V mu = m.drift(y, th);
    const Mat<double, N, D> a = m.diffusion(y, th);
    Mn jac;
    for (int j = 0; j < N; ++j) {
      const double e = 1e-6 * (1.0 + std::abs(y[j]));
      V yp = y, ym = y;
      yp[j] += e;
      ym[j] -= e;
      jac.col(j) = (m.drift(yp, th) - m.drift(ym, th)) / (2.0 * e);
    }
    V ito = V::Zero();
    for (int k = 0; k < D; ++k) {
      const V ak = a.col(k);
      const double an = ak.norm();
      if (an == 0.0) continue;
      const double e = 1e-4 * (1.0 + y.norm()) / an;
      ito += 0.5 * (m.drift(V(y + e * ak), th) - 2.0 * mu + m.drift(V(y - e * ak), th)) / (e * e);
    }
    // phi_1 = sum (Jh)^k h / (k+1)!, phi_2 = sum (Jh)^k h^2 / (k+2)!
    const Mn jh = jac * h;
    Mn term = Mn::Identity();
    Mn phi1 = Mn::Zero(), phi2 = Mn::Zero();
    double f1 = 1.0, f2 = 2.0;
    for (int k = 0; k < 8; ++k) {
      phi1 += term / f1;
      phi2 += term / f2;
      term = (term * jh).eval();
      f1 *= (k + 2);
      f2 *= (k + 3);
    }
    V out = y + h * (phi1 * mu) + h * h * (phi2 * ito);
    for (int k = 0; k < D; ++k) {
      const double* z = xi + 3 * k;
      const double i0 = sign * sh[0] * (c3(0, 0) * z[0]);
      const double i1 = sign * sh[1] * (c3(1, 0) * z[0] + c3(1, 1) * z[1]);
      const double i2 = sign * sh[2] * (c3(2, 0) * z[0] + c3(2, 1) * z[1] + c3(2, 2) * z[2]);
      const V ak = a.col(k);
      const V jak = jac * ak;
      out += i0 * ak + i1 * jak + i2 * (jac * jak);
    }
    return out;
  };

  RowMatrixXd out(opt.n_draws, N);
  const long chunks = (pairs + detail::kMcChunk - 1) / detail::kMcChunk;
  for (long c = 0; c < chunks; ++c) {
    const long rows = std::min(detail::kMcChunk, pairs - c * detail::kMcChunk);
    RowMatrixXd z = detail::normal_chunk(opt.seed, c, rows, q);
    if (wl) z = wl->triangularView<Eigen::Lower>().solve(z.transpose()).transpose();
    for (long r = 0; r < rows; ++r) {
      for (int sgn = 0; sgn < 2; ++sgn) {
        V y = x;
        for (int s = 0; s < opt.substeps; ++s) y = step(y, z.row(r).data() + s * D * 3, sgn ? -1.0 : 1.0);
        if (!(y.cwiseAbs().maxCoeff() <= 1e8)) throw SimulationError("mc_transition_samples: path exploded");
        out.row(2 * (c * detail::kMcChunk + r) + sgn) = y.transpose();
      }
    }
  }
  return out;
}

// Moments of the standardized residual m over a set of one-step end states.
template <HypoModel M>
MomentEstimate moments_from_samples(const M& m, const ContrastConfig& cfg, const Vec<double, M::kN>& x,
                                    const Vec<double, M::kP>& th, double delta, const RowMatrixXd& samples) {
  constexpr int N = M::kN;
  const long n = samples.rows();
  const Vec<double, N> r = mean_expansion(m, cfg, delta, x, th);
  const auto sc = detail::residual_scale<M>(delta);
  MatrixXd res(n, N);
  for (long i = 0; i < n; ++i)
    for (int j = 0; j < N; ++j) res(i, j) = (samples(i, j) - r[j]) * sc[j];
  MomentEstimate out;
  out.n_draws = n;
  const double dn = static_cast<double>(n);
  out.mean = res.colwise().mean().transpose();
  const MatrixXd centered = res.rowwise() - out.mean.transpose();
  out.cov = centered.transpose() * centered / (dn - 1.0);
  out.second = res.transpose() * res / dn;
  out.mean_se = (out.cov.diagonal() / dn).cwiseSqrt();
  out.second_se.resize(N, N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) {
      const VectorXd prod = res.col(a).cwiseProduct(res.col(b));
      const double mu = prod.mean();
      out.second_se(a, b) = std::sqrt((prod.array() - mu).square().sum() / (dn - 1.0) / dn);
    }
  return out;
}

template <HypoModel M>
MomentEstimate mc_conditional_moments(const M& m, const ContrastConfig& cfg, const Vec<double, M::kN>& x,
                                      const Vec<double, M::kP>& th, double delta, const McOptions& opt = {}) {
  return moments_from_samples(m, cfg, x, th, delta, mc_transition_samples(m, x, th, delta, opt));
}

// dX = (F X + c) dt + B dW
struct LinearSdeForm {
  MatrixXd f;
  VectorXd c;
  MatrixXd b;
};

struct ExactMoments {
  VectorXd mean;
  MatrixXd cov;
};

// Reads F, c, B off the model's raw drift and diffusion, then checks them at 10 random states.
template <HypoModel M>
LinearSdeForm linear_form(const M& m, const Vec<double, M::kP>& th, std::uint64_t seed = 11) {
  constexpr int N = M::kN;
  using V = Vec<double, N>;
  LinearSdeForm out;
  out.c = m.drift(V::Zero().eval(), th);
  out.f.resize(N, N);
  for (int j = 0; j < N; ++j) out.f.col(j) = m.drift(V::Unit(j).eval(), th) - out.c;
  out.b = m.diffusion(V::Zero().eval(), th);
  auto rng = make_rng(seed, 0);
  std::normal_distribution<double> nd;
  for (int t = 0; t < 10; ++t) {
    V x;
    for (int i = 0; i < N; ++i) x[i] = 2.0 * nd(rng);
    const VectorXd lin = out.f * x + out.c;
    const V mu = m.drift(x, th);
    const MatrixXd a = m.diffusion(x, th);
    if ((lin - mu).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + mu.cwiseAbs().maxCoeff()) ||
        (a - out.b).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + out.b.cwiseAbs().maxCoeff()))
      throw Error("linear_form: model " + m.id() + " is not a linear SDE at these parameters");
  }
  return out;
}

// Exact conditional mean and covariance over delta via augmented matrix exponentials.
ExactMoments linear_sde_exact_moments(const LinearSdeForm& form, const VectorXd& x, double delta);

// Central differences with step rel_step * (1 + |theta_k|).
VectorXd fd_gradient(const std::function<double(const VectorXd&)>& f, const VectorXd& theta, double rel_step = 1e-5);

enum class OperatorKind { kGenerator, kDirectional };

using FieldFn = std::function<VectorXd(const VectorXd&)>;
using DiffusionFn = std::function<MatrixXd(const VectorXd&)>;

// L phi = mu . grad phi + 1/2 sum_k A_k' hess(phi) A_k, or L_j phi = A_j . grad phi, by central
// differences (five-point) of the target along mu and along the columns of A; the step is h_fd (1 + |x|)
// in state space.
VectorXd fd_operator_apply(const FieldFn& mu, const DiffusionFn& a, OperatorKind which, int j,
                           const FieldFn& target, const VectorXd& x, double h_fd = 1e-3);

// Log density of (X_1..X_n) under the affine Gaussian recursion Z_k = a_k + b_k Y_{k-1} + N(0, Sigma_k)
// with Y_0 ~ N(m0, q0), by composing the joint Gaussian and marginalizing Y. schemes[k-1] drives step k.
double joint_gaussian_loglik(std::span<const FhnGaussianScheme> schemes, std::span<const double> obs_x,
                             const KalmanPrior& prior);

}  // namespace hypo
