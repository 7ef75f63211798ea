#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "hypo/builtins.hpp"
#include "hypo/cli.hpp"
#include "hypo/contrast.hpp"
#include "hypo/oracle.hpp"
#include "hypo/validate.hpp"

using namespace hypo;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Least-squares slope of log(err) against log(delta).
double loglog_slope(const std::vector<double>& d, const std::vector<double>& e) {
  const std::size_t n = d.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(d[i]), y = std::log(e[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

int jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

double sd_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

// Errors of coordinate k over ok rows for order p.
std::vector<double> errors(const ExperimentReport& r, int p, int k) {
  std::vector<double> out;
  for (const auto& row : r.rows)
    if (row.p == p && row.status == "ok") out.push_back(row.error[k]);
  return out;
}

int failed_rows(const ExperimentReport& r) {
  int n = 0;
  for (const auto& row : r.rows) n += row.status != "ok";
  return n;
}

AdamConfig tuned_adam(double step) {
  AdamConfig a;
  a.step = step;
  a.iters = 8000;
  a.keep_best = true;
  a.early_stop_tol = 1e-10;
  return a;
}

// 1 -------------------------------------------------------------------------
Outcome matrix_identities() {
  const QGle m{{PotentialKind::kDoubleWell}};
  auto rng = make_rng(2024, 1);
  MatrixIdentityResiduals worst;
  for (int t = 0; t < 100; ++t) {
    const auto th = random_theta<QGle>(rng);
    const auto x = random_state<QGle>(rng);
    const auto r = matrix_identity_residuals(m, x, th);
    worst.mat1 = std::max(worst.mat1, r.mat1);
    worst.mat2 = std::max(worst.mat2, r.mat2);
    worst.mat3 = std::max(worst.mat3, r.mat3);
    worst.lambda11 = std::max(worst.lambda11, r.lambda11);
  }
  return {worst.max() < 1e-10, fmt("max residuals M=%.2e mat2=%.2e mat3=%.2e Lambda_S1S1=%.2e", worst.mat1,
                                   worst.mat2, worst.mat3, worst.lambda11)};
}

// 2 -------------------------------------------------------------------------
template <HypoModel M>
double min_eig_over_draws(const M& m, std::uint64_t seed) {
  auto rng = make_rng(seed, 2);
  double lo = INFINITY;
  for (int t = 0; t < 100; ++t) {
    const auto th = random_theta<M>(rng);
    const auto x = random_state<M>(rng);
    lo = std::min(lo, min_eigenvalue<M::kN>(leading_sigma(m, x, th)));
  }
  return lo;
}

Outcome positive_definiteness() {
  std::string detail;
  bool pass = true;
  std::uint64_t seed = 10;
  for (const auto& id : builtin_ids()) {
    const double ev = std::visit([&](const auto& m) { return min_eig_over_draws(m, seed++); }, make_builtin(id));
    pass = pass && ev > 0.0;
    detail += fmt("%s%s=%.3g", detail.empty() ? "min eigenvalue " : ", ", id.c_str(), ev);
  }
  return {pass, detail};
}

// 3 -------------------------------------------------------------------------
template <HypoModel M>
void order_checks(const M& m, const Vec<double, M::kN>& x, const Vec<double, M::kP>& th, const std::vector<int>& ps,
                  bool& pass, std::string& detail) {
  const std::vector<double> deltas{0.02, 0.01, 0.005};
  std::vector<RowMatrixXd> samples;
  McOptions opt;
  opt.n_draws = 100000;
  opt.seed = 77;
  for (double d : deltas) samples.push_back(mc_transition_samples(m, x, th, d, opt));
  for (int p : ps) {
    const ContrastConfig cfg{p};
    std::vector<double> em, ec;
    for (std::size_t i = 0; i < deltas.size(); ++i) {
      const auto mom = moments_from_samples(m, cfg, x, th, deltas[i], samples[i]);
      const MatrixXd xi = covariance_expansion(m, cfg, deltas[i], x, th);
      em.push_back(mom.mean.cwiseAbs().maxCoeff());
      ec.push_back((mom.second - xi).cwiseAbs().maxCoeff());
    }
    const double kp = cfg.kp();
    const double sm = loglog_slope(deltas, em), sc = loglog_slope(deltas, ec);
    const bool ok = sm >= kp + 0.5 - 0.15 && sc >= kp + 1 - 0.2;
    pass = pass && ok;
    detail += fmt("%s%s p=%d mean %.2f/%.2f cov %.2f/%.2f", detail.empty() ? "" : "; ", m.id().c_str(), p, sm,
                  kp + 0.35, sc, kp + 0.8);
  }
}

Outcome ito_taylor_orders() {
  bool pass = true;
  std::string detail;
  order_checks(UnderdampedLangevin{{PotentialKind::kDoubleWell}}, Eigen::Vector2d(0.4, -0.3), Eigen::Vector2d(-1.0, 1.0),
               {2, 3, 4}, pass, detail);
  order_checks(QGle{{PotentialKind::kDoubleWell}}, Eigen::Vector3d(0.4, -0.3, 0.5), Eigen::Vector4d(2, 1, 4, 4), {2, 3},
               pass, detail);
  order_checks(Fhn{}, Eigen::Vector2d(0.4, -0.3), Eigen::Vector4d(0.1, 1.5, 0.3, 0.6), {2, 3, 4}, pass, detail);
  return {pass, detail};
}

// 4 -------------------------------------------------------------------------
Outcome linear_model_equivalence() {
  const QGle m{{PotentialKind::kQuadratic}};
  const Eigen::Vector4d th(2, 2, 4, 4);
  const Eigen::Vector3d x(0.4, -0.3, 0.5);
  const auto form = linear_form(m, th);
  bool pass = true;
  std::string detail;
  for (int p : {2, 3}) {
    const ContrastConfig cfg{p};
    const int kp = cfg.kp();
    // raw mean error per block: S1 keeps kp+2 terms, S2 kp+1, R kp
    const int mean_order[3] = {kp + 3, kp + 2, kp + 1};
    auto errs = [&](double d) {
      const auto ex = linear_sde_exact_moments(form, x, d);
      const Eigen::Vector3d me = (mean_expansion(m, cfg, d, x, th) - Eigen::Vector3d(ex.mean)).cwiseAbs();
      const auto sc = detail::residual_scale<QGle>(d);
      Eigen::Matrix3d cov;
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) cov(a, b) = ex.cov(a, b) * sc[a] * sc[b];
      const double ce = (covariance_expansion(m, cfg, d, x, th) - cov).cwiseAbs().maxCoeff();
      return std::pair{me, ce};
    };
    const auto [m1, c1] = errs(0.02);
    const auto [m2, c2] = errs(0.01);
    for (int b = 0; b < 3; ++b) {
      const double ratio = m1[b] / m2[b], need = 0.7 * std::pow(2.0, mean_order[b]);
      pass = pass && ratio >= need;
      detail += fmt("%sp=%d mean[%d] %.1f/%.1f", detail.empty() ? "" : ", ", p, b, ratio, need);
    }
    const double ratio = c1 / c2, need = 0.7 * std::pow(2.0, kp + 1);
    pass = pass && ratio >= need;
    detail += fmt(", p=%d cov %.1f/%.1f", p, ratio, need);
  }
  return {pass, detail};
}

// 5 -------------------------------------------------------------------------
Outcome taylor_coefficients() {
  auto rng = make_rng(55, 5);
  std::normal_distribution<double> nd;
  const std::vector<double> hs{0.02, 0.01, 0.005, 0.0025};
  double worst_inv = INFINITY, worst_det = INFINITY;
  bool pass = true;
  for (int t = 0; t < 20; ++t) {
    const int k = 1 + t % 2;
    CovExpansion<double, 3> c;
    Eigen::Matrix3d a, b1, b2;
    for (int i = 0; i < 9; ++i) {
      a.data()[i] = nd(rng);
      b1.data()[i] = nd(rng);
      b2.data()[i] = nd(rng);
    }
    c.sigma0 = a * a.transpose() + 0.5 * Eigen::Matrix3d::Identity();
    c.corrections[0] = b1 + b1.transpose();
    c.corrections[1] = b2 + b2.transpose();
    c.lambda = c.sigma0.inverse();
    c.logdet = std::log(c.sigma0.determinant());
    c.k = k;
    const auto tc = taylor_coeffs(c, k);
    std::vector<double> ei, ed;
    for (double h : hs) {
      const Eigen::Matrix3d xi = c.xi(h);
      Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
      double hsum = 0.0;
      for (int j = 0; j <= k; ++j) {
        g += std::pow(h, j) * tc.g[j];
        hsum += std::pow(h, j) * tc.h[j];
      }
      ei.push_back((xi.inverse() - g).norm());
      ed.push_back(std::abs(std::log(xi.determinant()) - hsum));
    }
    const double si = loglog_slope(hs, ei), sd = loglog_slope(hs, ed);
    worst_inv = std::min(worst_inv, si - (k + 1));
    worst_det = std::min(worst_det, sd - (k + 1));
    pass = pass && si >= k + 1 - 0.1 && sd >= k + 1 - 0.1;
  }
  return {pass, fmt("smallest slope excess over K+1: inverse %.3f, log det %.3f (need >= -0.1)", worst_inv, worst_det)};
}

// 6 -------------------------------------------------------------------------
template <HypoModel M>
double gradient_disagreement(const M& m, int p, std::uint64_t seed, double fine) {
  auto rng = make_rng(seed, 6);
  ObservationDesign d;
  d.delta = 0.01;
  d.t_horizon = 1.0;
  d.fine_delta = fine;
  d.burn_in = 1.0;
  d.seed = seed;
  const auto truth = random_theta<M>(rng);
  const auto obs = simulate_observations(m, truth, d);
  const auto th = random_theta<M>(rng);
  const ContrastConfig cfg{p};
  const auto g = contrast_gradient(m, cfg, obs, th);
  auto f = [&](const VectorXd& t) { return contrast_value(m, cfg, obs, Vec<double, M::kP>(t)).value; };
  // Richardson-extrapolated central differences
  const VectorXd f1 = fd_gradient(f, th, 1e-4), f2 = fd_gradient(f, th, 5e-5);
  const VectorXd fd = (4.0 * f2 - f1) / 3.0;
  double worst = 0.0;
  for (int k = 0; k < M::kP; ++k) worst = std::max(worst, std::abs(g.grad[k] - fd[k]) / std::abs(fd[k]));
  return worst;
}

Outcome gradient_correctness() {
  std::vector<double> rel;
  const UnderdampedLangevin ld{{PotentialKind::kDoubleWell}};
  const QGle qd{{PotentialKind::kDoubleWell}};
  const Fhn fh;
  rel.push_back(gradient_disagreement(ld, 2, 1, 1e-3));
  rel.push_back(gradient_disagreement(ld, 3, 2, 1e-3));
  rel.push_back(gradient_disagreement(ld, 4, 3, 1e-3));
  rel.push_back(gradient_disagreement(qd, 2, 4, 1e-3));
  rel.push_back(gradient_disagreement(qd, 3, 5, 1e-3));
  rel.push_back(gradient_disagreement(qd, 3, 6, 1e-3));
  rel.push_back(gradient_disagreement(fh, 2, 7, 1e-4));
  rel.push_back(gradient_disagreement(fh, 3, 8, 1e-4));
  rel.push_back(gradient_disagreement(fh, 4, 9, 1e-4));
  rel.push_back(gradient_disagreement(fh, 4, 10, 1e-4));
  double worst = 0.0;
  for (double r : rel) worst = std::max(worst, r);
  return {worst < 1e-5, fmt("largest per-coordinate relative disagreement %.2e over %zu cases", worst, rel.size())};
}

// 7 -------------------------------------------------------------------------
Outcome kalman_equivalence() {
  auto rng = make_rng(77, 7);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.0, 2.0);
  const double d = 0.01;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto th = random_theta<Fhn>(rng);
    ObservationDesign des;
    des.delta = d;
    des.t_horizon = 0.05;
    des.burn_in = 1.0;
    des.seed = 700 + t;
    const auto obs = simulate_observations(Fhn{}, th, des);
    const KalmanPrior prior{nd(rng), t % 5 == 0 ? 0.0 : ud(rng)};
    const int p = 2 + t % 2;
    for (long n = 1; n <= 5; ++n) {
      std::vector<double> xs(n + 1);
      std::vector<FhnGaussianScheme> sch;
      for (long k = 0; k <= n; ++k) xs[k] = obs.states(k, 0);
      for (long k = 1; k <= n; ++k) sch.push_back(fhn_scheme_coeffs(d, xs[k - 1], th, p));
      const double kf = marginal_loglik(xs, th, d, p, prior);
      const double joint = joint_gaussian_loglik(sch, xs, prior);
      worst = std::max(worst, std::abs(kf - joint));
    }
  }
  return {worst < 1e-8, fmt("largest |filter - joint| = %.2e over 20 parameters x lengths 1..5", worst)};
}

// 8 -------------------------------------------------------------------------
Outcome qgle_sigma_bias() {
  ExperimentConfig c;
  c.model_id = "qgle-quad";
  c.true_theta = {2, 2, 4, 4};
  c.design.delta = 0.005;
  c.design.t_horizon = 50.0;
  c.design.fine_delta = 1e-4;
  c.p_list = {2, 3};
  c.replications = 30;
  c.base_seed = 8000;
  c.optimizer.adam = tuned_adam(0.1);
  const auto rep = run_experiment(c, jobs());
  const double b2 = mean_of(errors(rep, 2, 3)), b3 = mean_of(errors(rep, 3, 3));
  const double s2 = sd_of(errors(rep, 2, 3)), s3 = sd_of(errors(rep, 3, 3));
  return {b2 <= -0.006 && std::abs(b3) <= 0.006 && failed_rows(rep) == 0,
          fmt("mean sigma error p=2 %.5f (sd %.5f, need <= -0.006), p=3 %.5f (sd %.5f, need |.| <= 0.006), failed %d",
              b2, s2, b3, s3, failed_rows(rep))};
}

// 9 -------------------------------------------------------------------------
Outcome fhn_complete_bias() {
  ExperimentConfig c;
  c.model_id = "fhn";
  c.true_theta = {0.1, 1.5, 0.3, 0.6};
  c.design.delta = 0.02;
  c.design.t_horizon = 250.0;
  c.design.fine_delta = 1e-4;
  c.p_list = {2, 4};
  c.replications = 20;
  c.base_seed = 9000;
  c.optimizer.adam = tuned_adam(0.01);
  const auto rep = run_experiment(c, jobs());
  const double e2 = mean_of(errors(rep, 2, 0)), e4 = mean_of(errors(rep, 4, 0));
  const double s2 = mean_of(errors(rep, 2, 3)), s4 = mean_of(errors(rep, 4, 3));
  return {e2 >= 3e-4 && std::abs(e4) <= 2e-4 && s2 < s4 && failed_rows(rep) == 0,
          fmt("mean eps error p=2 %.5f (need >= 3e-4), p=4 %.5f (need |.| <= 2e-4); mean sigma error p=2 %.5f < p=4 "
              "%.5f; failed %d",
              e2, e4, s2, s4, failed_rows(rep))};
}

// 10 ------------------------------------------------------------------------
Outcome fhn_partial_bias() {
  ExperimentConfig c;
  c.model_id = "fhn";
  c.true_theta = {0.1, 1.5, 0.3, 0.6};
  c.design.delta = 0.005;
  c.design.t_horizon = 100.0;
  c.design.fine_delta = 1e-4;
  c.p_list = {2, 3};
  c.replications = 20;
  c.base_seed = 10000;
  c.mode = ObservationMode::kPartialFhn;
  c.optimizer.method = OptimizerConfig::Method::kNelderMead;
  c.theta0 = std::vector<double>{0.5, 0.5, 0.5, 0.5};
  const auto rep = run_experiment(c, jobs());
  const auto a = errors(rep, 2, 0), b = errors(rep, 3, 0);
  const double m2 = mean_of(a), m3 = mean_of(b), s2 = sd_of(a), s3 = sd_of(b);
  const double sd_ratio = s2 / s3;
  return {m2 > m3 && m3 > 0.0 && std::abs(sd_ratio - 1.0) <= 0.25 && failed_rows(rep) == 0,
          fmt("mean eps error p=2 %.5f > p=3 %.5f > 0; sd p=2 %.5f, p=3 %.5f (ratio %.3f, need within 25%%); failed %d",
              m2, m3, s2, s3, sd_ratio, failed_rows(rep))};
}

// 11 ------------------------------------------------------------------------
Outcome clt_variance() {
  const UnderdampedLangevin m{{PotentialKind::kQuadratic}};
  const Eigen::Vector2d truth(-1.0, 1.0);
  ExperimentConfig c;
  c.model_id = "langevin-quad";
  c.true_theta = {truth[0], truth[1]};
  c.design.delta = 0.01;
  c.design.t_horizon = 100.0;
  c.design.fine_delta = 1e-4;
  c.p_list = {3};
  c.replications = 100;
  c.base_seed = 11000;
  c.optimizer.adam = tuned_adam(0.1);
  const auto rep = run_experiment(c, jobs());
  const double sd = sd_of(errors(rep, 3, 1));

  ObservationDesign d = c.design;
  d.t_horizon = 2000.0;
  d.seed = 1;
  const auto sample = simulate_observations(m, truth, d);
  const auto pm = asymptotic_precision(m, ContrastConfig{3}, sample, truth);
  const double n = std::lround(c.design.t_horizon / c.design.delta);
  const double pred = std::sqrt(1.0 / pm.gamma(1, 1) / n);
  return {std::abs(sd / pred - 1.0) <= 0.3 && failed_rows(rep) == 0,
          fmt("empirical sd of sigma_hat %.5f, predicted %.5f (ratio %.3f, need within 30%%); failed %d", sd, pred,
              sd / pred, failed_rows(rep))};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "matrix identities", matrix_identities},
      {2, "positive definiteness", positive_definiteness},
      {3, "Ito-Taylor orders", ito_taylor_orders},
      {4, "exact linear model", linear_model_equivalence},
      {5, "G/H Taylor coefficients", taylor_coefficients},
      {6, "gradient correctness", gradient_correctness},
      {7, "Kalman oracle", kalman_equivalence},
      {8, "q-GLE sigma bias p=2 vs p=3", qgle_sigma_bias},
      {9, "FHN complete-observation bias p=2 vs p=4", fhn_complete_bias},
      {10, "FHN partial-observation bias p=2 vs p=3", fhn_partial_bias},
      {11, "CLT variance", clt_variance},
  };
  std::vector<int> pick;
  for (int i = 1; i < argc; ++i) pick.push_back(std::atoi(argv[i]));
  bool all_pass = true;
  for (const auto& c : all) {
    if (!pick.empty() && std::find(pick.begin(), pick.end(), c.id) == pick.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
