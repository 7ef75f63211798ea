#include <doctest.h>

#include <numbers>

#include "hypo/builtins.hpp"
#include "hypo/kalman.hpp"
#include "hypo/oracle.hpp"

using namespace hypo;

namespace {

const Eigen::Vector4d kTruth(0.1, 1.5, 0.3, 0.6);

std::vector<double> fhn_x(std::uint64_t seed, double t, double delta) {
  ObservationDesign d;
  d.delta = delta;
  d.t_horizon = t;
  d.seed = seed;
  const auto obs = simulate_observations(Fhn{}, kTruth, d);
  std::vector<double> x(obs.states.rows());
  for (long k = 0; k < obs.states.rows(); ++k) x[k] = obs.states(k, 0);
  return x;
}

}  // namespace

TEST_CASE("scheme coefficients") {
  const double eps = 0.1, sig = 0.6, x = 0.45;
  SUBCASE("vanishing step") {
    const auto s = fhn_scheme_coeffs(1e-12, x, kTruth, 3);
    CHECK(s.a[0] == doctest::Approx(x));
    CHECK(s.a[1] == doctest::Approx(0.0));
    CHECK(s.b[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(s.b[1] == doctest::Approx(1.0));
    CHECK(s.sigma.cwiseAbs().maxCoeff() < 1e-11);
  }
  SUBCASE("p = 2 covariance") {
    const double d = 0.01;
    const auto s = fhn_scheme_coeffs(d, x, kTruth, 2);
    CHECK(s.sigma(0, 0) == doctest::Approx(d * d * d * sig * sig / (3 * eps * eps)));
    CHECK(s.sigma(0, 1) == doctest::Approx(-d * d * sig * sig / (2 * eps)));
    CHECK(s.sigma(1, 1) == doctest::Approx(d * sig * sig));
  }
  SUBCASE("p = 3 minus p = 2") {
    const double d = 0.01;
    const auto s2 = fhn_scheme_coeffs(d, x, kTruth, 2);
    const auto s3 = fhn_scheme_coeffs(d, x, kTruth, 3);
    const double l1 = -sig / eps, l2 = sig / (eps * eps) * (-(1 - 3 * x * x) + eps), l3 = -sig;
    const Eigen::Matrix2d diff = s3.sigma - s2.sigma;
    CHECK(diff(0, 0) == doctest::Approx(std::pow(d, 4) / 4 * l1 * l2));
    CHECK(diff(0, 1) == doctest::Approx(std::pow(d, 3) * (sig * l2 / 6 + l1 * l3 / 3)));
    CHECK(diff(1, 1) == doctest::Approx(d * d * sig * l3));
    CHECK((s3.a - s2.a).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK_THROWS_AS((void)fhn_scheme_coeffs(0.01, x, kTruth, 4), UnsupportedOrder);
}

TEST_CASE("filter update") {
  const double d = 0.01;
  SUBCASE("observing the predicted mean leaves the Y mean at its prediction") {
    const FilterState st{0.2, 0.5, 0.0};
    const auto sc = fhn_scheme_coeffs(d, 0.3, kTruth, 2);
    const double mux = sc.a[0] + sc.b[0] * st.m;
    const auto nx = kf_update(st, 0.3, mux, d, kTruth, 2);
    CHECK(nx.m == doctest::Approx(sc.a[1] + sc.b[1] * st.m).epsilon(1e-13));
  }
  SUBCASE("single step closed form") {
    const FilterState st{-0.1, 0.7, 0.0};
    const double xp = 0.2, xn = 0.19;
    const auto sc = fhn_scheme_coeffs(d, xp, kTruth, 3);
    const double lxx = sc.sigma(0, 0) + sc.b[0] * sc.b[0] * st.q;
    const double lxy = sc.sigma(0, 1) + sc.b[0] * sc.b[1] * st.q;
    const double lyy = sc.sigma(1, 1) + sc.b[1] * sc.b[1] * st.q;
    const double innov = xn - sc.a[0] - sc.b[0] * st.m;
    const auto nx = kf_update(st, xp, xn, d, kTruth, 3);
    CHECK(nx.m == doctest::Approx(sc.a[1] + sc.b[1] * st.m + lxy / lxx * innov).epsilon(1e-12));
    CHECK(nx.q == doctest::Approx(lyy - lxy * lxy / lxx).epsilon(1e-12));
    const double ll = -0.5 * std::log(2 * std::numbers::pi * lxx) - 0.5 * innov * innov / lxx;
    CHECK(nx.loglik == doctest::Approx(ll).epsilon(1e-12));
  }
}

TEST_CASE("marginal likelihood matches the joint Gaussian") {
  const double d = 0.01;
  const auto xs = fhn_x(3, 0.05, d);
  REQUIRE(xs.size() == 6);
  const Eigen::Vector4d th(0.12, 1.3, 0.2, 0.7);
  for (int p : {2, 3}) {
    for (double q0 : {0.0, 1.0, 4.0}) {
      const KalmanPrior prior{0.3, q0};
      for (std::size_t n = 1; n <= 5; ++n) {
        std::vector<FhnGaussianScheme> sch;
        for (std::size_t k = 1; k <= n; ++k) sch.push_back(fhn_scheme_coeffs(d, xs[k - 1], th, p));
        const std::span<const double> obs(xs.data(), n + 1);
        const double kf = marginal_loglik(obs, th, d, p, prior);
        const double joint = joint_gaussian_loglik(sch, obs, prior);
        INFO("p=", p, " q0=", q0, " n=", n);
        CHECK(kf == doctest::Approx(joint).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("filter tracks Y when the noise is tiny") {
  ObservationDesign d;
  d.delta = 0.001;
  d.t_horizon = 1.0;
  d.seed = 4;
  const Eigen::Vector4d th(0.1, 1.5, 0.3, 1e-6);
  const auto obs = simulate_observations(Fhn{}, th, d);
  FilterState st{obs.states(0, 1), 1e-6, 0.0};
  double worst = 0.0, qmin = INFINITY;
  for (long k = 1; k <= obs.n(); ++k) {
    st = kf_update(st, obs.states(k - 1, 0), obs.states(k, 0), d.delta, th, 2);
    worst = std::max(worst, std::abs(st.m - obs.states(k, 1)));
    qmin = std::min(qmin, st.q);
  }
  CHECK(worst < 1e-3);
  CHECK(qmin >= 0.0);
}

TEST_CASE("filtering variance stays non-negative") {
  const auto xs = fhn_x(5, 5.0, 0.005);
  FilterState st{0.0, 1.0, 0.0};
  for (std::size_t k = 1; k < xs.size(); ++k) {
    st = kf_update(st, xs[k - 1], xs[k], 0.005, kTruth, 3);
    REQUIRE(st.q >= 0.0);
  }
  CHECK(std::isfinite(st.loglik));
}

TEST_CASE("input validation") {
  const std::vector<double> one{0.1};
  CHECK_THROWS_AS((void)marginal_loglik(one, kTruth, 0.01, 2), Error);
  const std::vector<double> two{0.1, 0.2};
  CHECK_THROWS_AS((void)marginal_loglik(two, kTruth, 0.01, 2, {0.0, -1.0}), ConfigError);
  CHECK_THROWS_AS((void)marginal_loglik(two, Eigen::Vector4d(0.1, 1.5, 0.3, 0.0), 0.01, 2, {0.0, 0.0}),
                  NotPositiveDefinite);
}

TEST_CASE("golden log likelihood") {
  const auto xs = fhn_x(7, 1.0, 0.005);
  const double ll = marginal_loglik(xs, kTruth, 0.005, 3);
  CHECK(ll == doctest::Approx(1000.060387).epsilon(1e-8));
}
