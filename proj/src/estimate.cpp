#include "hypo/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace hypo {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void check_start(const std::vector<double>& theta0, const Box& box) {
  if (theta0.size() != box.size())
    throw DimensionError("theta0 has " + std::to_string(theta0.size()) + " entries, box has " +
                         std::to_string(box.size()));
  if (!box.contains(theta0)) throw ConfigError("theta0 lies outside the parameter box");
}

}  // namespace

void AdamConfig::validate() const {
  if (!(step > 0.0)) throw ConfigError("adam.step must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("adam.beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("adam.beta2 must lie in [0, 1)");
  if (!(eps > 0.0)) throw ConfigError("adam.eps must be positive");
  if (iters < 1) throw ConfigError("adam.iters must be at least 1");
  if (early_stop_tol < 0.0 || early_stop_window < 1) throw ConfigError("adam early stop settings invalid");
}

EstimationResult adam_minimize(const GradObjective& f, const std::vector<double>& theta0, const AdamConfig& cfg,
                               const Box& box) {
  cfg.validate();
  check_start(theta0, box);
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t p = theta0.size();
  EstimationResult res;
  std::vector<double> th = theta0;
  Evaluation e = f(th);
  ++res.evaluations;
  if (!e.ok || !std::isfinite(e.value))
    throw NotPositiveDefinite("objective undefined at theta0 (covariance not positive definite)",
                              std::numeric_limits<double>::quiet_NaN());

  std::vector<double> m(p, 0.0), v(p, 0.0), next(p);
  std::vector<double> best_th = th;
  Evaluation best = e;
  std::deque<double> best_history;
  double b1t = 1.0, b2t = 1.0;
  for (int it = 1; it <= cfg.iters; ++it) {
    b1t *= cfg.beta1;
    b2t *= cfg.beta2;
    for (std::size_t k = 0; k < p; ++k) {
      const double g = e.grad[k];
      m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g;
      v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g * g;
      const double mh = m[k] / (1.0 - b1t);
      const double vh = v[k] / (1.0 - b2t);
      next[k] = std::clamp(th[k] - cfg.step * mh / (std::sqrt(vh) + cfg.eps), box.lo[k], box.hi[k]);
    }
    Evaluation en = f(next);
    ++res.evaluations;
    // back off towards the current point until the objective is defined again
    int tries = 0;
    while ((!en.ok || !std::isfinite(en.value)) && tries < 30) {
      for (std::size_t k = 0; k < p; ++k) next[k] = th[k] + 0.5 * (next[k] - th[k]);
      en = f(next);
      ++res.evaluations;
      ++tries;
    }
    if (tries > 0) ++res.retreats;
    if (en.ok && std::isfinite(en.value)) {
      th = next;
      e = std::move(en);
    }
    if (e.value < best.value) {
      best = e;
      best_th = th;
    }
    res.iterations = it;
    if (cfg.record_trace) res.trace.push_back({it, e.value, th});
    if (cfg.early_stop_tol > 0.0) {
      best_history.push_back(best.value);
      if (static_cast<int>(best_history.size()) > cfg.early_stop_window) {
        const double gain = best_history.front() - best.value;
        best_history.pop_front();
        if (gain <= cfg.early_stop_tol * (1.0 + std::abs(best.value))) break;
      }
    }
  }
  if (cfg.keep_best) {
    th = best_th;
    e = best;
  }
  res.theta_hat = th;
  res.value = e.value;
  double gmax = 0.0;
  for (double g : e.grad) gmax = std::max(gmax, std::abs(g));
  res.converged = gmax < 1e-4 * (1.0 + std::abs(e.value));
  res.runtime = seconds_since(t0);
  return res;
}

EstimationResult nelder_mead_maximize(const ValueObjective& f, const std::vector<double>& theta0, const Box& box,
                                      const NelderMeadConfig& cfg) {
  check_start(theta0, box);
  if (cfg.max_evals < 1) throw ConfigError("nelder_mead.max_evals must be at least 1");
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t p = theta0.size();
  EstimationResult res;

  // minimize the negated objective; -1e12 outside the box or where f is undefined
  auto g = [&](const std::vector<double>& th) {
    ++res.evaluations;
    if (!box.contains(th)) return 1e12;
    const double v = f(th);
    return std::isfinite(v) ? -v : 1e12;
  };
  std::vector<double> width(p);
  for (std::size_t k = 0; k < p; ++k) width[k] = box.hi[k] - box.lo[k];

  std::vector<std::vector<double>> x(p + 1, theta0);
  for (std::size_t k = 0; k < p; ++k) {
    const double step = 0.05 * width[k];
    x[k + 1][k] += theta0[k] + step <= box.hi[k] ? step : -step;
  }
  std::vector<double> fx(p + 1);
  for (std::size_t i = 0; i <= p; ++i) fx[i] = g(x[i]);

  auto diameter = [&] {
    double d = 0.0;
    for (std::size_t i = 1; i <= p; ++i)
      for (std::size_t k = 0; k < p; ++k)
        d = std::max(d, std::abs(x[i][k] - x[0][k]) / (width[k] > 0.0 ? width[k] : 1.0));
    return d;
  };
  std::vector<std::size_t> order(p + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
    std::vector<std::vector<double>> xs(p + 1);
    std::vector<double> fs(p + 1);
    for (std::size_t i = 0; i <= p; ++i) {
      xs[i] = x[order[i]];
      fs[i] = fx[order[i]];
    }
    x.swap(xs);
    fx.swap(fs);
  };
  auto along = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
    std::vector<double> out(p);
    for (std::size_t k = 0; k < p; ++k) out[k] = c[k] + t * (w[k] - c[k]);
    return out;
  };

  sort_simplex();
  while (true) {
    if (diameter() < cfg.tol) {
      res.converged = true;
      break;
    }
    if (res.evaluations >= cfg.max_evals) break;
    ++res.iterations;
    std::vector<double> c(p, 0.0);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t k = 0; k < p; ++k) c[k] += x[i][k] / static_cast<double>(p);
    const auto xr = along(c, x[p], -1.0);
    const double fr = g(xr);
    if (fr < fx[0]) {
      const auto xe = along(c, x[p], -2.0);
      const double fe = g(xe);
      if (fe < fr) {
        x[p] = xe;
        fx[p] = fe;
      } else {
        x[p] = xr;
        fx[p] = fr;
      }
    } else if (fr < fx[p - 1]) {
      x[p] = xr;
      fx[p] = fr;
    } else {
      bool accepted = false;
      if (fr < fx[p]) {
        const auto xc = along(c, xr, 0.5);
        const double fc = g(xc);
        if (fc <= fr) {
          x[p] = xc;
          fx[p] = fc;
          accepted = true;
        }
      } else {
        const auto xc = along(c, x[p], 0.5);
        const double fc = g(xc);
        if (fc < fx[p]) {
          x[p] = xc;
          fx[p] = fc;
          accepted = true;
        }
      }
      if (!accepted) {
        for (std::size_t i = 1; i <= p; ++i) {
          x[i] = along(x[0], x[i], 0.5);
          fx[i] = g(x[i]);
        }
      }
    }
    sort_simplex();
    if (cfg.record_trace) res.trace.push_back({res.iterations, -fx[0], x[0]});
  }
  res.theta_hat = box.project(x[0]);
  res.value = -fx[0];
  res.runtime = seconds_since(t0);
  return res;
}

VectorXd PrecisionMatrix::standard_errors() const {
  const auto inv = sym_inverse(gamma);
  if (!inv.ok) throw NotPositiveDefinite("precision matrix singular", min_eigenvalue(gamma));
  VectorXd se(gamma.rows());
  for (Eigen::Index k = 0; k < gamma.rows(); ++k) se[k] = std::sqrt(inv.inv(k, k)) / rate[k];
  return se;
}

}  // namespace hypo
