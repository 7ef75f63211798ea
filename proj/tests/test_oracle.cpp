#include <doctest.h>

#include <numbers>

#include "hypo/builtins.hpp"
#include "hypo/oracle.hpp"

using namespace hypo;

namespace {

const UnderdampedLangevin kLangevinQuad{{PotentialKind::kQuadratic}};

}  // namespace

TEST_CASE("exact moments of linear SDEs") {
  SUBCASE("zero drift matrix") {
    LinearSdeForm f{MatrixXd::Zero(2, 2), Eigen::Vector2d(1.0, -2.0), MatrixXd::Identity(2, 2) * 0.5};
    const auto e = linear_sde_exact_moments(f, Eigen::Vector2d(0.3, 0.4), 0.2);
    CHECK(e.mean[0] == doctest::Approx(0.5));
    CHECK(e.mean[1] == doctest::Approx(0.0));
    CHECK(e.cov(0, 0) == doctest::Approx(0.05));
    CHECK(e.cov(0, 1) == doctest::Approx(0.0));
  }
  SUBCASE("Ornstein-Uhlenbeck over one time unit") {
    LinearSdeForm f{-MatrixXd::Identity(1, 1), VectorXd::Zero(1), MatrixXd::Identity(1, 1)};
    const auto e = linear_sde_exact_moments(f, VectorXd::Ones(1), 1.0);
    CHECK(e.cov(0, 0) == doctest::Approx(0.432332).epsilon(1e-6));
    CHECK(e.mean[0] == doctest::Approx(std::exp(-1.0)));
  }
  SUBCASE("Langevin covariance approaches the leading covariance at first order") {
    const Eigen::Vector2d th(-1.0, 1.3);
    const auto form = linear_form(kLangevinQuad, th);
    const Eigen::Vector2d x(0.2, 0.5);
    const Eigen::Matrix2d lead = leading_sigma(kLangevinQuad, x, th);
    auto err = [&](double h) {
      const auto e = linear_sde_exact_moments(form, x, h);
      const auto sc = detail::residual_scale<UnderdampedLangevin>(h);
      Eigen::Matrix2d s;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) s(a, b) = e.cov(a, b) * sc[a] * sc[b];
      return (s - lead).cwiseAbs().maxCoeff();
    };
    const double r = err(0.02) / err(0.01);
    CHECK(r == doctest::Approx(2.0).epsilon(0.05));
  }
  CHECK_THROWS_AS((void)linear_form(QGle{{PotentialKind::kDoubleWell}}, Eigen::Vector4d(2, 1, 4, 4)), Error);
}

TEST_CASE("finite-difference gradient") {
  const VectorXd th = Eigen::Vector3d(0.5, -1.0, 2.0);
  const auto lin = fd_gradient([](const VectorXd& t) { return 3.0 * t[0] - 2.0 * t[1] + t[2]; }, th);
  CHECK(lin[0] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(lin[1] == doctest::Approx(-2.0).epsilon(1e-9));
  const auto quad = fd_gradient([](const VectorXd& t) { return t.squaredNorm(); }, th);
  CHECK((quad - 2.0 * th).cwiseAbs().maxCoeff() < 1e-8);
  const auto q2 = fd_gradient([](const VectorXd& t) { return t.squaredNorm(); }, Eigen::Vector2d(1, 2), 1e-6);
  CHECK(std::abs(q2[0] - 2.0) < 1e-8);
  CHECK(std::abs(q2[1] - 4.0) < 1e-8);
  try {
    (void)fd_gradient([](const VectorXd& t) { return t[1] > -1.0 ? std::nan("") : 0.0; }, th);
    FAIL("expected Error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("coordinate 1") != std::string::npos);
  }
}

TEST_CASE("finite-difference operators") {
  const FieldFn mu = [](const VectorXd& x) { return VectorXd(Eigen::Vector2d(x[1], -x[0] * x[0])); };
  const DiffusionFn a = [](const VectorXd& x) {
    MatrixXd m(2, 1);
    m << 0.0, 1.0 + x[0] * x[0];
    return m;
  };
  const VectorXd x = Eigen::Vector2d(0.4, -0.7);
  SUBCASE("linear target") {
    Eigen::Matrix2d lin;
    lin << 1, 2, -3, 0.5;
    const FieldFn t = [&](const VectorXd& z) { return VectorXd(lin * z); };
    const auto g = fd_operator_apply(mu, a, OperatorKind::kGenerator, 0, t, x);
    CHECK((g - lin * mu(x)).cwiseAbs().maxCoeff() < 1e-10);
    const auto d = fd_operator_apply(mu, a, OperatorKind::kDirectional, 0, t, x);
    CHECK((d - lin * a(x).col(0)).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("quadratic target picks up the second-order term") {
    // phi = y^2: L phi = 2 y mu_2 + a_2^2
    const FieldFn t = [](const VectorXd& z) { return VectorXd::Constant(1, z[1] * z[1]); };
    const auto g = fd_operator_apply(mu, a, OperatorKind::kGenerator, 0, t, x);
    const double a2 = 1.0 + x[0] * x[0];
    CHECK(g[0] == doctest::Approx(2 * x[1] * (-x[0] * x[0]) + a2 * a2).epsilon(1e-9));
  }
  SUBCASE("coordinate functions") {
    const FieldFn t = [](const VectorXd& z) { return z; };
    const auto d = fd_operator_apply(mu, a, OperatorKind::kDirectional, 0, t, x);
    CHECK(d[0] == doctest::Approx(0.0));
    CHECK(d[1] == doctest::Approx(1.0 + x[0] * x[0]).epsilon(1e-10));
    CHECK_THROWS_AS((void)fd_operator_apply(mu, a, OperatorKind::kDirectional, 1, t, x), Error);
  }
}

TEST_CASE("joint Gaussian likelihood") {
  const Eigen::Vector4d th(0.1, 1.5, 0.3, 0.6);
  const double d = 0.01;
  SUBCASE("one step") {
    const auto s = fhn_scheme_coeffs(d, 0.2, th, 2);
    const std::vector<FhnGaussianScheme> sch{s};
    const std::vector<double> xs{0.2, 0.18};
    const KalmanPrior prior{0.1, 0.5};
    const double var = s.sigma(0, 0) + s.b[0] * s.b[0] * prior.q0;
    const double r = xs[1] - s.a[0] - s.b[0] * prior.m0;
    const double expect = -0.5 * (std::log(2 * std::numbers::pi * var) + r * r / var);
    CHECK(joint_gaussian_loglik(sch, xs, prior) == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("dimension check") {
    const std::vector<FhnGaussianScheme> sch{fhn_scheme_coeffs(d, 0.2, th, 2)};
    const std::vector<double> xs{0.2, 0.18, 0.17};
    CHECK_THROWS_AS((void)joint_gaussian_loglik(sch, xs, {}), Error);
  }
}

TEST_CASE("Monte Carlo transition oracle") {
  const Eigen::Vector2d x(0.3, -0.6);
  const double h = 0.01;
  SUBCASE("no noise reproduces the exact flow") {
    const Eigen::Vector2d th(-0.8, 0.0);
    McOptions opt;
    opt.n_draws = 4;
    opt.substeps = 10;
    opt.whiten = false;
    const auto s = mc_transition_samples(kLangevinQuad, x, th, h, opt);
    const auto e = linear_sde_exact_moments(linear_form(kLangevinQuad, Eigen::Vector2d(-0.8, 1.0)), x, h);
    for (int i = 0; i < 4; ++i) CHECK((s.row(i).transpose() - e.mean).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("Langevin covariance within three standard errors") {
    const Eigen::Vector2d th(-0.8, 1.4);
    McOptions opt;
    opt.n_draws = 20000;
    opt.substeps = 20;
    opt.whiten = false;
    const auto mom = mc_conditional_moments(kLangevinQuad, ContrastConfig{2}, x, th, h, opt);
    const auto e = linear_sde_exact_moments(linear_form(kLangevinQuad, th), x, h);
    const auto sc = detail::residual_scale<UnderdampedLangevin>(h);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const double exact = e.cov(a, b) * sc[a] * sc[b];
        INFO(a, b, " mc ", mom.cov(a, b), " exact ", exact);
        CHECK(std::abs(mom.cov(a, b) - exact) < 3.0 * mom.second_se(a, b));
      }
  }
  SUBCASE("second moment matches the truncated covariance expansion at 1e5 draws") {
    const Eigen::Vector2d th(-0.8, 1.4);
    McOptions opt;
    opt.seed = 3;
    for (int p : {2, 3, 4}) {
      const auto mom = mc_conditional_moments(kLangevinQuad, ContrastConfig{p}, x, th, h, opt);
      const Eigen::Matrix2d xi = covariance_expansion(kLangevinQuad, ContrastConfig{p}, h, x, th);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) CHECK(std::abs(mom.second(a, b) - xi(a, b)) < 3.0 * mom.second_se(a, b));
    }
  }
  SUBCASE("standard errors shrink with the square root of the draws") {
    const Eigen::Vector2d th(-0.8, 1.4);
    McOptions opt;
    opt.n_draws = 4000;
    opt.substeps = 50;
    opt.whiten = false;
    const auto a = mc_conditional_moments(kLangevinQuad, ContrastConfig{2}, x, th, h, opt);
    opt.n_draws = 16000;
    const auto b = mc_conditional_moments(kLangevinQuad, ContrastConfig{2}, x, th, h, opt);
    CHECK(a.second_se(1, 1) / b.second_se(1, 1) == doctest::Approx(2.0).epsilon(0.1));
  }
  SUBCASE("seeded and validated") {
    const Eigen::Vector2d th(-0.8, 1.4);
    McOptions opt;
    opt.n_draws = 200;
    opt.substeps = 5;
    const auto a = mc_transition_samples(kLangevinQuad, x, th, h, opt);
    const auto b = mc_transition_samples(kLangevinQuad, x, th, h, opt);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    opt.n_draws = 201;
    CHECK_THROWS_AS((void)mc_transition_samples(kLangevinQuad, x, th, h, opt), Error);
  }
}
