#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "hypo/model.hpp"
#include "hypo/moments.hpp"
#include "hypo/oracle.hpp"
#include "hypo/simulate.hpp"

namespace hypo {

template <HypoModel M>
Vec<double, M::kP> random_theta(std::mt19937_64& rng) {
  const auto info = M::params();
  Vec<double, M::kP> th;
  for (int k = 0; k < M::kP; ++k) th[k] = std::uniform_real_distribution<double>(info[k].lo, info[k].hi)(rng);
  return th;
}

template <HypoModel M>
Vec<double, M::kN> random_state(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> nd;
  Vec<double, M::kN> x;
  for (int i = 0; i < M::kN; ++i) x[i] = scale * nd(rng);
  return x;
}

// d mu_rows / d x_cols by a five-point stencil (exact up to rounding for drifts that are at most
// quartic in the differentiated coordinates).
template <HypoModel M>
MatrixXd drift_jacobian_block(const M& m, const Vec<double, M::kN>& x, const Vec<double, M::kP>& th,
                              const BlockSpec& rows, const BlockSpec& cols) {
  MatrixXd jac(rows.size, cols.size);
  for (int c = 0; c < cols.size; ++c) {
    const int j = cols.offset + c;
    const double h = 1e-2 * (1.0 + std::abs(x[j]));
    auto at = [&](double t) {
      Vec<double, M::kN> y = x;
      y[j] += t * h;
      return Vec<double, M::kN>(m.drift(y, th));
    };
    const Vec<double, M::kN> d = (8.0 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12.0 * h);
    jac.col(c) = d.segment(rows.offset, rows.size);
  }
  return jac;
}

struct MatrixIdentityResiduals {
  double mat1 = 0.0;      // Lambda_S1S1 dmu_S1/dx_S2 + 2 Lambda_S1S2
  double mat2 = 0.0;      // Lambda_S2S2 - 12 a_S2^-1 + 1/2 Lambda_S2S1 dmu_S1/dx_S2
  double mat3 = 0.0;      // Lambda Psi - [0; 0; a_R^-1]
  double lambda11 = 0.0;  // Lambda_S1S1 - 720 a_S1^-1

  [[nodiscard]] double max() const { return std::max(std::max(mat1, mat2), std::max(mat3, lambda11)); }
};

// Max-abs residuals of the class II inverse-covariance identities at (x, theta).
template <HypoModel M>
MatrixIdentityResiduals matrix_identity_residuals(const M& m, const Vec<double, M::kN>& x,
                                                  const Vec<double, M::kP>& th) {
  static_assert(M::kClass == ModelClass::kHypoII, "matrix identities are stated for class II models");
  constexpr int N = M::kN, D = M::kD;
  const auto& b1 = find_block<M>(StateBlock::kS1);
  const auto& b2 = find_block<M>(StateBlock::kS2);
  const auto& br = find_block<M>(StateBlock::kR);
  const MatrixXd lam = leading_covariance(m, x, th).lambda;
  const Mat<double, N, D> v = leading_fields(m, x, th);
  auto gram = [&](const BlockSpec& b) {
    const MatrixXd f = v.block(b.offset, 0, b.size, D);
    return MatrixXd(f * f.transpose());
  };
  auto inv = [](const MatrixXd& a) { return MatrixXd(a.llt().solve(MatrixXd::Identity(a.rows(), a.cols()))); };
  const MatrixXd j12 = drift_jacobian_block(m, x, th, b1, b2);
  const MatrixXd j2r = drift_jacobian_block(m, x, th, b2, br);
  auto blk = [&](const BlockSpec& r, const BlockSpec& c) { return MatrixXd(lam.block(r.offset, c.offset, r.size, c.size)); };

  MatrixIdentityResiduals out;
  out.mat1 = (blk(b1, b1) * j12 + 2.0 * blk(b1, b2)).cwiseAbs().maxCoeff();
  out.mat2 = (blk(b2, b2) - 12.0 * inv(gram(b2)) + 0.5 * blk(b2, b1) * j12).cwiseAbs().maxCoeff();
  MatrixXd psi(N, br.size);
  psi.middleRows(b1.offset, b1.size) = j12 * j2r / 6.0;
  psi.middleRows(b2.offset, b2.size) = 0.5 * j2r;
  psi.middleRows(br.offset, br.size) = MatrixXd::Identity(br.size, br.size);
  MatrixXd target = MatrixXd::Zero(N, br.size);
  target.middleRows(br.offset, br.size) = inv(gram(br));
  out.mat3 = (lam * psi - target).cwiseAbs().maxCoeff();
  out.lambda11 = (blk(b1, b1) - 720.0 * inv(gram(b1))).cwiseAbs().maxCoeff();
  return out;
}

struct OperatorCertification {
  double generator = 0.0;    // worst relative error of L(gen_k) against gen_{k+1}, and of gen_1 against mu
  double directional = 0.0;  // L_j mu
  double directional_generator = 0.0;  // L_j L mu_S1 (class II)

  [[nodiscard]] double max() const { return std::max(generator, std::max(directional, directional_generator)); }
};

namespace detail {

inline double rel_err(const VectorXd& got, const VectorXd& ref) {
  return (got - ref).cwiseAbs().maxCoeff() / (1.0 + ref.cwiseAbs().maxCoeff());
}

}  // namespace detail

// Compares the closed-form iterates with finite-difference applications of L and L_j to the raw
// drift and diffusion, block by block within each block's declared order.
template <HypoModel M>
OperatorCertification certify_operators(const M& m, const Vec<double, M::kN>& x, const Vec<double, M::kP>& th,
                                        double h_fd = 1e-3) {
  constexpr int N = M::kN, D = M::kD;
  using V = Vec<double, N>;
  const FieldFn mu = [&](const VectorXd& y) -> VectorXd { return m.drift(V(y), th); };
  const DiffusionFn a = [&](const VectorXd& y) -> MatrixXd { return m.diffusion(V(y), th); };
  static constexpr auto t = block_table<M>();
  OperatorCertification out;

  out.generator = detail::rel_err(m.generator_term(1, x, th), m.drift(x, th));
  int kmax = 0;
  for (int b = 0; b < t.count; ++b) kmax = std::max(kmax, generator_limit<M>(t.blocks[b].block));
  for (int k = 1; k < kmax; ++k) {
    const FieldFn gk = [&, k](const VectorXd& y) -> VectorXd { return m.generator_term(k, V(y), th); };
    const VectorXd lg = fd_operator_apply(mu, a, OperatorKind::kGenerator, 0, gk, x, h_fd);
    const V next = m.generator_term(k + 1, x, th);
    for (int b = 0; b < t.count; ++b) {
      const auto& s = t.blocks[b];
      if (k + 1 > generator_limit<M>(s.block)) continue;
      out.generator = std::max(
          out.generator, detail::rel_err(lg.segment(s.offset, s.size), next.segment(s.offset, s.size)));
    }
  }
  const Mat<double, N, D> l1 = m.directional_terms(x, th);
  for (int j = 0; j < D; ++j)
    out.directional =
        std::max(out.directional, detail::rel_err(fd_operator_apply(mu, a, OperatorKind::kDirectional, j, mu, x, h_fd),
                                                  l1.col(j)));
  if constexpr (M::kClass == ModelClass::kHypoII) {
    const auto& s1 = t.blocks[0];
    const Mat<double, N, D> l2 = m.directional_generator_terms(x, th);
    const FieldFn g2 = [&](const VectorXd& y) -> VectorXd { return m.generator_term(2, V(y), th); };
    for (int j = 0; j < D; ++j) {
      const VectorXd fd = fd_operator_apply(mu, a, OperatorKind::kDirectional, j, g2, x, h_fd);
      out.directional_generator = std::max(
          out.directional_generator, detail::rel_err(fd.segment(s1.offset, s1.size), l2.col(j).segment(s1.offset, s1.size)));
    }
  }
  return out;
}

struct ValidationCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;      // worst observed quantity
  double threshold = 0.0;  // pass iff value < threshold (or > for "min_" checks)
  std::string note;
};

struct ValidationReport {
  std::string model_id;
  std::vector<double> theta;
  std::vector<ValidationCheck> checks;
  [[nodiscard]] bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

struct ValidationOptions {
  int points = 100;
  std::uint64_t seed = 1;
  double state_scale = 1.0;
  double hormander_tol = 1e-4;
  double operator_tol = 1e-6;
  double identity_tol = 1e-10;
};

// Hormander rank check, operator certification, class II matrix identities and a PD sweep of Sigma,
// all at `points` random states with theta fixed.
template <HypoModel M>
ValidationReport validate_model(const M& m, const Vec<double, M::kP>& th, const ValidationOptions& opt = {}) {
  ValidationReport rep;
  rep.model_id = m.id();
  rep.theta.assign(th.data(), th.data() + M::kP);
  auto rng = make_rng(opt.seed, 0x56414c4944415445ULL);
  std::vector<Vec<double, M::kN>> pts;
  for (int i = 0; i < opt.points; ++i) pts.push_back(random_state<M>(rng, opt.state_scale));

  {
    const auto h = hormander_rank_check(m, th, pts, opt.hormander_tol);
    rep.checks.push_back({"hormander_min_singular_value", h.pass, h.min_margin(), opt.hormander_tol, ""});
  }
  {
    OperatorCertification worst;
    bool finite = true;
    for (const auto& x : pts) {
      const auto c = certify_operators(m, x, th);
      if (!std::isfinite(c.max())) finite = false;
      worst.generator = std::max(worst.generator, c.generator);
      worst.directional = std::max(worst.directional, c.directional);
      worst.directional_generator = std::max(worst.directional_generator, c.directional_generator);
    }
    rep.checks.push_back({"operator_generator", finite && worst.generator < opt.operator_tol, worst.generator,
                          opt.operator_tol, ""});
    rep.checks.push_back({"operator_directional", finite && worst.directional < opt.operator_tol, worst.directional,
                          opt.operator_tol, ""});
    if constexpr (M::kClass == ModelClass::kHypoII)
      rep.checks.push_back({"operator_directional_generator", finite && worst.directional_generator < opt.operator_tol,
                            worst.directional_generator, opt.operator_tol, ""});
  }
  {
    double lo = INFINITY;
    for (const auto& x : pts) lo = std::min(lo, min_eigenvalue<M::kN>(leading_sigma(m, x, th)));
    rep.checks.push_back({"min_sigma_eigenvalue", lo > 0.0, lo, 0.0, "pass iff > 0"});
  }
  if constexpr (M::kClass == ModelClass::kHypoII) {
    MatrixIdentityResiduals worst;
    std::string err;
    for (const auto& x : pts) {
      try {
        const auto r = matrix_identity_residuals(m, x, th);
        worst.mat1 = std::max(worst.mat1, r.mat1);
        worst.mat2 = std::max(worst.mat2, r.mat2);
        worst.mat3 = std::max(worst.mat3, r.mat3);
        worst.lambda11 = std::max(worst.lambda11, r.lambda11);
      } catch (const NotPositiveDefinite& e) {
        err = e.what();
        worst.mat1 = worst.mat2 = worst.mat3 = worst.lambda11 = INFINITY;
        break;
      }
    }
    const double tol = opt.identity_tol;
    rep.checks.push_back({"identity_mat1", worst.mat1 < tol, worst.mat1, tol, err});
    rep.checks.push_back({"identity_mat2", worst.mat2 < tol, worst.mat2, tol, err});
    rep.checks.push_back({"identity_matrix3", worst.mat3 < tol, worst.mat3, tol, err});
    rep.checks.push_back({"identity_lambda_s1s1", worst.lambda11 < tol, worst.lambda11, tol, err});
  }
  return rep;
}

}  // namespace hypo
