#include "hypo/oracle.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include <unsupported/Eigen/MatrixFunctions>

namespace hypo {

namespace detail {

RowMatrixXd normal_chunk(std::uint64_t seed, long chunk, long rows, int q) {
  auto rng = make_rng(seed, 0x4d43000000000000ULL + static_cast<std::uint64_t>(chunk));
  std::normal_distribution<double> nd;
  RowMatrixXd z(rows, q);
  for (long r = 0; r < rows; ++r)
    for (int k = 0; k < q; ++k) z(r, k) = nd(rng);
  return z;
}

const MatrixXd& whitening_factor(std::uint64_t seed, long n_pairs, int q) {
  static std::mutex mu;
  static std::map<std::tuple<std::uint64_t, long, int>, MatrixXd> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_tuple(seed, n_pairs, q);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  MatrixXd g = MatrixXd::Zero(q, q);
  const long chunks = (n_pairs + kMcChunk - 1) / kMcChunk;
  for (long c = 0; c < chunks; ++c) {
    const long rows = std::min(kMcChunk, n_pairs - c * kMcChunk);
    const RowMatrixXd z = normal_chunk(seed, c, rows, q);
    g.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose());
  }
  g = g.selfadjointView<Eigen::Lower>();
  g /= static_cast<double>(n_pairs);
  Eigen::LLT<MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) throw Error("whitening_factor: too few draws for the input dimension");
  return cache.emplace(key, MatrixXd(llt.matrixL())).first->second;
}

const Mat<double, 3, 3>& iterated_integral_factor() {
  static const Mat<double, 3, 3> l = [] {
    Mat<double, 3, 3> c;
    const double fact[3] = {1.0, 1.0, 2.0};
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c(j, k) = 1.0 / ((j + k + 1) * fact[j] * fact[k]);
    return Mat<double, 3, 3>(Eigen::LLT<Mat<double, 3, 3>>(c).matrixL());
  }();
  return l;
}

}  // namespace detail

ExactMoments linear_sde_exact_moments(const LinearSdeForm& form, const VectorXd& x, double delta) {
  const Eigen::Index n = form.f.rows();
  MatrixXd aug = MatrixXd::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = form.f * delta;
  aug.topRightCorner(n, 1) = form.c * delta;
  const MatrixXd e = aug.exp();
  ExactMoments out;
  out.mean = e.topLeftCorner(n, n) * x + e.topRightCorner(n, 1);

  // [[-F, B B^T], [0, F^T]] * delta: exp = [[., G12], [0, G22]], cov = G22^T G12
  MatrixXd vl = MatrixXd::Zero(2 * n, 2 * n);
  vl.topLeftCorner(n, n) = -form.f * delta;
  vl.topRightCorner(n, n) = form.b * form.b.transpose() * delta;
  vl.bottomRightCorner(n, n) = form.f.transpose() * delta;
  const MatrixXd ev = vl.exp();
  out.cov = ev.bottomRightCorner(n, n).transpose() * ev.topRightCorner(n, n);
  out.cov = (0.5 * (out.cov + out.cov.transpose())).eval();
  return out;
}

VectorXd fd_gradient(const std::function<double(const VectorXd&)>& f, const VectorXd& theta, double rel_step) {
  VectorXd g(theta.size());
  for (Eigen::Index k = 0; k < theta.size(); ++k) {
    const double h = rel_step * (1.0 + std::abs(theta[k]));
    VectorXd tp = theta, tm = theta;
    tp[k] += h;
    tm[k] -= h;
    const double fp = f(tp), fm = f(tm);
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw Error("fd_gradient: non-finite objective when probing coordinate " + std::to_string(k));
    g[k] = (fp - fm) / (2.0 * h);
  }
  return g;
}

VectorXd fd_operator_apply(const FieldFn& mu, const DiffusionFn& a, OperatorKind which, int j, const FieldFn& target,
                           const VectorXd& x, double h_fd) {
  const double scale = 1.0 + x.norm();
  // five-point stencils along dir
  auto first = [&](const VectorXd& dir) -> VectorXd {
    const double n = dir.norm();
    if (n == 0.0) return VectorXd::Zero(target(x).size());
    const double h = h_fd * scale / n;
    return (8.0 * (target(x + h * dir) - target(x - h * dir)) - (target(x + 2.0 * h * dir) - target(x - 2.0 * h * dir))) /
           (12.0 * h);
  };
  const MatrixXd ax = a(x);
  if (which == OperatorKind::kDirectional) {
    if (j < 0 || j >= ax.cols()) throw Error("fd_operator_apply: column " + std::to_string(j) + " out of range");
    return first(ax.col(j));
  }
  VectorXd out = first(mu(x));
  const VectorXd f0 = target(x);
  for (Eigen::Index k = 0; k < ax.cols(); ++k) {
    const VectorXd dir = ax.col(k);
    const double n = dir.norm();
    if (n == 0.0) continue;
    const double h = h_fd * scale / n;
    const VectorXd d2 = 16.0 * (target(x + h * dir) + target(x - h * dir)) -
                        (target(x + 2.0 * h * dir) + target(x - 2.0 * h * dir)) - 30.0 * f0;
    out += 0.5 * d2 / (12.0 * h * h);
  }
  return out;
}

double joint_gaussian_loglik(std::span<const FhnGaussianScheme> schemes, std::span<const double> obs_x,
                             const KalmanPrior& prior) {
  const std::size_t n = schemes.size();
  if (obs_x.size() != n + 1) throw Error("joint_gaussian_loglik: need one scheme per observed step");
  // every variable as mean + L u with u standard normal: u = (eta_0, w_1 (2), ..., w_n (2))
  const Eigen::Index nu = 1 + 2 * static_cast<Eigen::Index>(n);
  const Eigen::Index nz = 1 + 2 * static_cast<Eigen::Index>(n);  // Y_0, (X_k, Y_k)
  VectorXd mean = VectorXd::Zero(nz);
  MatrixXd load = MatrixXd::Zero(nz, nu);
  mean[0] = prior.m0;
  load(0, 0) = std::sqrt(prior.q0);
  for (std::size_t k = 1; k <= n; ++k) {
    const auto& s = schemes[k - 1];
    const Eigen::Index yp = (k == 1) ? 0 : static_cast<Eigen::Index>(2 * (k - 1));
    const Eigen::Index xi = static_cast<Eigen::Index>(2 * k - 1);
    Eigen::SelfAdjointEigenSolver<Mat<double, 2, 2>> es(s.sigma);
    const Mat<double, 2, 2> root =
        es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    for (int r = 0; r < 2; ++r) {
      mean[xi + r] = s.a[r] + s.b[r] * mean[yp];
      load.row(xi + r) = s.b[r] * load.row(yp);
      load.block(xi + r, xi, 1, 2) += root.row(r);
    }
  }
  VectorXd mx(n), xv(n);
  MatrixXd lx(n, nu);
  for (std::size_t k = 1; k <= n; ++k) {
    mx[k - 1] = mean[2 * k - 1];
    lx.row(k - 1) = load.row(2 * k - 1);
    xv[k - 1] = obs_x[k];
  }
  const MatrixXd cov = lx * lx.transpose();
  const auto inv = sym_inverse(cov);
  if (!inv.ok) throw NotPositiveDefinite("joint_gaussian_loglik: singular marginal covariance", min_eigenvalue(cov));
  const VectorXd r = xv - mx;
  return -0.5 * (static_cast<double>(n) * std::log(2.0 * std::numbers::pi) + inv.logdet + r.dot(inv.inv * r));
}

}  // namespace hypo
