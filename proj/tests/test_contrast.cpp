#include <doctest.h>

#include "hypo/builtins.hpp"
#include "hypo/contrast.hpp"
#include "hypo/oracle.hpp"
#include "hypo/validate.hpp"

using namespace hypo;

namespace {

const UnderdampedLangevin kLangevinQuad{{PotentialKind::kQuadratic}};
const QGle kQgleDw{{PotentialKind::kDoubleWell}};
const Fhn kFhn{};

ObservationSet two_point(const Eigen::Vector2d& x0, const Eigen::Vector2d& x1, double delta) {
  ObservationSet obs;
  obs.design.delta = delta;
  obs.states.resize(2, 2);
  obs.states.row(0) = x0.transpose();
  obs.states.row(1) = x1.transpose();
  return obs;
}

ObservationSet short_qgle(std::uint64_t seed, double t = 5.0) {
  ObservationDesign d;
  d.delta = 0.01;
  d.t_horizon = t;
  d.fine_delta = 1e-3;
  d.burn_in = 2.0;
  d.seed = seed;
  return simulate_observations(kQgleDw, Eigen::Vector4d(2, 1, 4, 4), d);
}

ObservationSet short_fhn(std::uint64_t seed) {
  ObservationDesign d;
  d.delta = 0.001;
  d.t_horizon = 1.0;
  d.fine_delta = 1e-4;
  d.burn_in = 1.0;
  d.seed = seed;
  return simulate_observations(kFhn, Eigen::Vector4d(0.1, 1.5, 0.3, 0.6), d);
}

ObservationSet short_langevin(std::uint64_t seed, double sig) {
  ObservationDesign d;
  d.delta = 0.01;
  d.t_horizon = 20.0;
  d.fine_delta = 1e-3;
  d.burn_in = 2.0;
  d.seed = seed;
  return simulate_observations(kLangevinQuad, Eigen::Vector2d(-1.0, sig), d);
}

}  // namespace

TEST_CASE("Taylor coefficients of the inverse and log determinant") {
  CovExpansion<double, 1> c;
  c.sigma0(0, 0) = 2.0;
  c.corrections[0](0, 0) = 1.0;
  c.corrections[1](0, 0) = 0.0;
  c.lambda(0, 0) = 0.5;
  c.logdet = std::log(2.0);
  c.k = 2;
  const auto t = taylor_coeffs(c, 2);
  // 1/(2+h) = 1/2 - h/4 + h^2/8, log(2+h) = log 2 + h/2 - h^2/8
  CHECK(t.g[0](0, 0) == doctest::Approx(0.5));
  CHECK(t.g[1](0, 0) == doctest::Approx(-0.25));
  CHECK(t.g[2](0, 0) == doctest::Approx(0.125));
  CHECK(t.h[0] == doctest::Approx(std::log(2.0)));
  CHECK(t.h[1] == doctest::Approx(0.5));
  CHECK(t.h[2] == doctest::Approx(-0.125));
  CHECK_THROWS_AS((void)taylor_coeffs(c, 3), UnsupportedOrder);

  SUBCASE("zero corrections give zero coefficients") {
    c.corrections[0](0, 0) = 0.0;
    const auto z = taylor_coeffs(c, 2);
    CHECK(z.g[1](0, 0) == 0.0);
    CHECK(z.g[2](0, 0) == 0.0);
    CHECK(z.h[1] == 0.0);
  }
}

TEST_CASE("Taylor coefficients match the exact inverse for small h") {
  const Eigen::Vector2d x(0.4, -0.3);
  const Eigen::Vector4d th(0.1, 1.5, 0.3, 0.6);
  const auto c = covariance_corrections(kFhn, ContrastConfig{4}, x, th);
  const auto t = taylor_coeffs(c, 2);
  for (double h : {1e-3, 5e-4}) {
    const Eigen::Matrix2d xi = c.xi(h);
    const Eigen::Matrix2d approx = t.g[0] + h * t.g[1] + h * h * t.g[2];
    const double err = (xi.inverse() - approx).cwiseAbs().maxCoeff() / xi.inverse().cwiseAbs().maxCoeff();
    // the remainder is O(h^3); Fhn corrections scale like 1/eps^2
    CHECK(err < 1e5 * h * h * h);
    const double lerr = std::abs(std::log(xi.determinant()) - (t.h[0] + h * t.h[1] + h * h * t.h[2]));
    CHECK(lerr < 1e5 * h * h * h);
  }
}

TEST_CASE("contrast of Langevin steps with sigma = 2") {
  const double h = 0.01;
  const Eigen::Vector2d x0(0.3, -0.4), th(-1.0, 2.0);
  const Eigen::Vector2d r = mean_expansion(kLangevinQuad, ContrastConfig{2}, h, x0, th);
  const auto at_mean = contrast_value(kLangevinQuad, ContrastConfig{2}, two_point(x0, r, h), th);
  CHECK(at_mean.ok);
  CHECK(at_mean.value == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-12));
  // standardized residual (1, 0): Lambda_11 = 3
  const Eigen::Vector2d y = r + Eigen::Vector2d(std::pow(h, 1.5), 0.0);
  const auto v = contrast_value(kLangevinQuad, ContrastConfig{2}, two_point(x0, y, h), th);
  CHECK(v.value == doctest::Approx(3.0 + std::log(4.0 / 3.0)).epsilon(1e-10));
}

TEST_CASE("p = 3 adds the first-order covariance correction") {
  const auto obs = short_qgle(4, 2.0);
  const Eigen::Vector4d th(2.2, 0.9, 3.5, 4.3);
  const double h = obs.design.delta;
  const auto l2 = contrast_value(kQgleDw, ContrastConfig{2}, obs, th);
  const auto l3 = contrast_value(kQgleDw, ContrastConfig{3}, obs, th);
  double diff = 0.0;
  for (long i = 1; i <= obs.n(); ++i) {
    const Eigen::Vector3d x = obs.states.row(i - 1).transpose();
    const Eigen::Vector3d y = obs.states.row(i).transpose();
    const auto c = covariance_corrections(kQgleDw, ContrastConfig{3}, x, th);
    const Eigen::Vector3d m = standardized_residual(kQgleDw, ContrastConfig{3}, h, x, y, th);
    const Eigen::Matrix3d g1 = -c.lambda * c.corrections[0] * c.lambda;
    diff += h * (m.dot(g1 * m) + (c.lambda * c.corrections[0]).trace());
  }
  CHECK(l3.value - l2.value == doctest::Approx(diff).epsilon(1e-9));
}

TEST_CASE("second-order contrast agrees with an independent sum") {
  const auto obs = short_fhn(6);
  const Eigen::Vector4d th(0.12, 1.4, 0.35, 0.55);
  const double h = obs.design.delta;
  double total = 0.0;
  for (long i = 1; i <= obs.n(); ++i) {
    const Eigen::Vector2d x = obs.states.row(i - 1).transpose();
    const Eigen::Vector2d y = obs.states.row(i).transpose();
    const auto c = covariance_corrections(kFhn, ContrastConfig{4}, x, th);
    const auto t = taylor_coeffs(c, 2);
    const Eigen::Vector2d m = standardized_residual(kFhn, ContrastConfig{4}, h, x, y, th);
    for (int k = 0; k <= 2; ++k) total += std::pow(h, k) * (m.dot(t.g[k] * m) + t.h[k]);
  }
  const auto v = contrast_value(kFhn, ContrastConfig{4}, obs, th);
  CHECK(v.value == doctest::Approx(total).epsilon(1e-9));
}

TEST_CASE("worker count does not change the contrast") {
  const auto obs = short_qgle(8, 70.0);
  REQUIRE(obs.n() > 3 * 2048);
  const Eigen::Vector4d th(2, 1, 4, 4);
  const auto a = contrast_value(kQgleDw, ContrastConfig{3}, obs, th, {1, false});
  const auto b = contrast_value(kQgleDw, ContrastConfig{3}, obs, th, {3, false});
  CHECK(a.value == b.value);
  const auto ga = contrast_gradient(kQgleDw, ContrastConfig{3}, obs, th, {1, false});
  const auto gb = contrast_gradient(kQgleDw, ContrastConfig{3}, obs, th, {2, false});
  CHECK((ga.grad - gb.grad).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("per-step terms sum to the contrast") {
  const auto obs = short_qgle(9, 1.0);
  const auto v = contrast_value(kQgleDw, ContrastConfig{2}, obs, Eigen::Vector4d(2, 1, 4, 4), {1, true});
  REQUIRE(static_cast<long>(v.per_step_terms.size()) == obs.n());
  double s = 0.0;
  for (double t : v.per_step_terms) s += t;
  CHECK(s == doctest::Approx(v.value).epsilon(1e-12));
}

TEST_CASE("automatic gradient matches finite differences") {
  const auto obs = short_qgle(10, 2.0);
  const Eigen::Vector4d th(2.3, 0.8, 3.6, 4.4);
  for (int p : {2, 3}) {
    const ContrastConfig cfg{p};
    const auto g = contrast_gradient(kQgleDw, cfg, obs, th);
    const auto fd = fd_gradient(
        [&](const VectorXd& t) { return contrast_value(kQgleDw, cfg, obs, Eigen::Vector4d(t)).value; }, th, 1e-5);
    const double scale = 1.0 + g.grad.cwiseAbs().maxCoeff();
    CHECK((g.grad - fd).cwiseAbs().maxCoeff() < 1e-5 * scale);
    CHECK(g.value == doctest::Approx(contrast_value(kQgleDw, cfg, obs, th).value).epsilon(1e-13));
  }
  const auto fobs = short_fhn(12);
  const Eigen::Vector4d tf(0.11, 1.6, 0.25, 0.65);
  const auto g = contrast_gradient(kFhn, ContrastConfig{4}, fobs, tf);
  const auto fd = fd_gradient(
      [&](const VectorXd& t) { return contrast_value(kFhn, ContrastConfig{4}, fobs, Eigen::Vector4d(t)).value; }, tf,
      1e-6);
  CHECK((g.grad - fd).cwiseAbs().maxCoeff() < 1e-5 * (1.0 + g.grad.cwiseAbs().maxCoeff()));
}

TEST_CASE("directional derivative is consistent with the gradient") {
  const auto obs = short_qgle(11, 2.0);
  const Eigen::Vector4d th(2.0, 1.1, 4.2, 3.9);
  const Eigen::Vector4d dir(0.3, -0.2, 0.5, 0.1);
  const auto g = contrast_gradient(kQgleDw, ContrastConfig{3}, obs, th);
  const double e = 1e-6;
  const double fp = contrast_value(kQgleDw, ContrastConfig{3}, obs, Eigen::Vector4d(th + e * dir)).value;
  const double fm = contrast_value(kQgleDw, ContrastConfig{3}, obs, Eigen::Vector4d(th - e * dir)).value;
  const double dd = (fp - fm) / (2 * e);
  CHECK(g.grad.dot(dir) == doctest::Approx(dd).epsilon(1e-5));
}

TEST_CASE("non positive definite covariance returns the sentinel") {
  const Eigen::Vector2d x0(0.3, 0.1), x1(0.31, 0.12);
  const auto obs = two_point(x0, x1, 0.01);
  const Eigen::Vector4d th(0.1, 1.5, 0.3, 0.0);
  const auto v = contrast_value(kFhn, ContrastConfig{2}, obs, th);
  CHECK_FALSE(v.ok);
  CHECK(v.failed_step == 1);
  CHECK(v.value == ContrastValue::kSentinel);
  CHECK_THROWS_AS(v.require(), NotPositiveDefinite);
  const auto g = contrast_gradient(kFhn, ContrastConfig{2}, obs, th);
  CHECK_FALSE(g.ok);
  CHECK(g.value == ContrastValue::kSentinel);
}

TEST_CASE("unsupported order and column mismatch") {
  const auto obs = two_point({0, 0}, {0.01, 0.0}, 0.01);
  CHECK_THROWS_AS((void)contrast_value(kFhn, ContrastConfig{5}, obs, Eigen::Vector4d(0.1, 1.5, 0.3, 0.6)),
                  UnsupportedOrder);
  CHECK_THROWS_AS((void)contrast_value(kQgleDw, ContrastConfig{2}, obs, Eigen::Vector4d(2, 1, 4, 4)),
                  DimensionError);
}

TEST_CASE("the truth beats a displaced sigma on most short Case I paths") {
  const QGle m{{PotentialKind::kQuadratic}};
  const Eigen::Vector4d truth(2, 2, 4, 4);
  ObservationDesign d;
  d.delta = 0.005;
  d.t_horizon = 10.0;
  d.fine_delta = 5e-4;
  d.burn_in = 2.0;
  int wins = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    d.seed = 100 + s;
    const auto obs = simulate_observations(m, truth, d);
    const double at_truth = contrast_value(m, ContrastConfig{3}, obs, truth).value;
    const double displaced =
        contrast_value(m, ContrastConfig{3}, obs, Eigen::Vector4d(truth + 0.25 * Eigen::Vector4d::Unit(3))).value;
    wins += at_truth < displaced;
  }
  CHECK(wins >= 18);
}

TEST_CASE("sigma gradient points back towards the truth") {
  int right = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto obs = short_langevin(200 + s, 1.0);
    const auto hi = contrast_gradient(kLangevinQuad, ContrastConfig{2}, obs, Eigen::Vector2d(-1.0, 1.5));
    const auto lo = contrast_gradient(kLangevinQuad, ContrastConfig{2}, obs, Eigen::Vector2d(-1.0, 0.7));
    right += (hi.grad[1] > 0.0 && lo.grad[1] < 0.0);
  }
  CHECK(right >= 18);
}
