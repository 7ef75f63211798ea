#pragma once

#include <algorithm>
#include <limits>
#include <thread>
#include <vector>

#include "hypo/moments.hpp"
#include "hypo/simulate.hpp"

namespace hypo {

template <class T, int N>
struct TaylorCoeffs {
  std::array<Mat<T, N, N>, 3> g;
  std::array<T, 3> h;
  int k = 0;
};

// Coefficients of Xi_K(h)^{-1} = sum h^k G_k and log det Xi_K(h) = sum h^k H_k.
// G_k = -(sum_{m=1..k} G_{k-m} Sigma_m) Lambda, H_k = (1/k) Tr[sum_{m=1..k} m Sigma_m G_{k-m}].
template <class T, int N>
TaylorCoeffs<T, N> taylor_coeffs(const CovExpansion<T, N>& cov, int k) {
  if (k < 0 || k > cov.k || k > 2)
    throw UnsupportedOrder("taylor_coeffs: order " + std::to_string(k) + " exceeds available corrections (" +
                           std::to_string(cov.k) + ")");
  TaylorCoeffs<T, N> out;
  out.k = k;
  out.g[0] = cov.lambda;
  out.h[0] = cov.logdet;
  for (int j = 1; j <= k; ++j) {
    Mat<T, N, N> acc = Mat<T, N, N>::Zero();
    T tr = T(0.0);
    for (int m = 1; m <= j; ++m) {
      acc += out.g[j - m] * cov.corrections[m - 1];
      tr += double(m) * (cov.corrections[m - 1] * out.g[j - m]).trace();
    }
    out.g[j] = -(acc * cov.lambda);
    out.g[j] = (0.5 * (out.g[j] + out.g[j].transpose())).eval();
    out.h[j] = tr / double(j);
  }
  return out;
}

template <class T>
struct KahanSum {
  T sum = T(0.0);
  T c = T(0.0);
  void add(const T& y) {
    const T yc = y - c;
    const T t = sum + yc;
    c = (t - sum) - yc;
    sum = t;
  }
};

// One term of the contrast at step x -> y. Returns false when Sigma(x) is not positive definite.
template <HypoModel M, class T>
bool contrast_step(const M& m, const ContrastConfig& cfg, double h, const Vec<double, M::kN>& x,
                   const Vec<double, M::kN>& y, const Vec<T, M::kP>& th, T& out) {
  constexpr int N = M::kN;
  static constexpr auto shift = component_order_shift<M>();
  LocalTerms<T, N, M::kD> lt;
  local_terms(m, cfg.p, x, th, lt);
  const int kp = cfg.kp();
  const auto sc = detail::residual_scale<M>(h);
  Vec<T, N> res;
  for (int i = 0; i < N; ++i) {
    T r = T(x[i] - y[i]);
    double coef = 1.0;
    for (int k = 1; k <= kp + shift[i]; ++k) {
      coef *= h / k;
      r += coef * lt.gen[k - 1][i];
    }
    res[i] = -r * sc[i];
  }
  const Mat<T, N, N> s = sigma_from_fields<M, T>(lt.lead);
  const auto inv = sym_inverse(s);
  if (!inv.ok) return false;
  const Vec<T, N> w = inv.inv * res;
  out = res.dot(w) + inv.logdet;
  if (cfg.p == 2) return true;
  // res' G_1 res = -w' S1 w, H_1 = tr(L S1)
  const Mat<T, N, N>& s1 = lt.corr[0];
  const Vec<T, N> s1w = s1 * w;
  const Mat<T, N, N> ls1 = inv.inv * s1;
  out += h * (ls1.trace() - w.dot(s1w));
  if (kp >= 2) {
    // res' G_2 res = w' S1 L S1 w - w' S2 w, H_2 = tr(L S2) - tr(L S1 L S1) / 2
    const Mat<T, N, N>& s2 = lt.corr[1];
    const Vec<T, N> ls1w = inv.inv * s1w;
    const T quad = s1w.dot(ls1w) - w.dot(s2 * w);
    const T hterm = (inv.inv * s2).trace() - 0.5 * (ls1 * ls1).trace();
    out += h * h * (quad + hterm);
  }
  return true;
}

struct ContrastOptions {
  int workers = 1;
  bool per_step = false;
};

struct ContrastValue {
  double value = 0.0;
  bool ok = true;
  long failed_step = -1;  // observation index i (1-based) whose Sigma(x_{i-1}) failed
  std::vector<double> per_step_terms;

  static constexpr double kSentinel = 1e300;
  void require() const {
    if (!ok)
      throw NotPositiveDefinite("Sigma not positive definite at step " + std::to_string(failed_step),
                                std::numeric_limits<double>::quiet_NaN());
  }
};

namespace detail {

inline constexpr long kChunk = 2048;

template <HypoModel M, class T>
struct ChunkResult {
  KahanSum<T> acc;
  long failed = -1;
};

template <HypoModel M, class T>
ChunkResult<M, T> contrast_chunk(const M& m, const ContrastConfig& cfg, const ObservationSet& obs,
                                 const Vec<T, M::kP>& th, long begin, long end, std::vector<double>* per_step) {
  ChunkResult<M, T> out;
  const double h = obs.design.delta;
  for (long i = begin; i < end; ++i) {
    const Eigen::Map<const Vec<double, M::kN>> x(obs.states.row(i - 1).data());
    const Eigen::Map<const Vec<double, M::kN>> y(obs.states.row(i).data());
    T term;
    if (!contrast_step(m, cfg, h, Vec<double, M::kN>(x), Vec<double, M::kN>(y), th, term)) {
      out.failed = i;
      return out;
    }
    if (per_step) (*per_step)[i - 1] = value_of(term);
    out.acc.add(term);
  }
  return out;
}

// Chunk boundaries are fixed, so the result does not depend on the worker count.
template <HypoModel M, class T>
std::pair<T, long> contrast_sum(const M& m, const ContrastConfig& cfg, const ObservationSet& obs,
                                const Vec<T, M::kP>& th, const ContrastOptions& opt, std::vector<double>* per_step) {
  check_config<M>(cfg);
  if (obs.states.cols() != M::kN)
    throw DimensionError("observations have " + std::to_string(obs.states.cols()) + " columns, model " + m.id() +
                         " expects " + std::to_string(M::kN));
  const long n = obs.n();
  const long chunks = (n + kChunk - 1) / kChunk;
  std::vector<ChunkResult<M, T>> parts(chunks);
  auto run = [&](long c) {
    parts[c] = contrast_chunk(m, cfg, obs, th, 1 + c * kChunk, std::min(n, (c + 1) * kChunk) + 1, per_step);
  };
  const int workers = std::max(1, std::min<int>(opt.workers, static_cast<int>(chunks)));
  if (workers == 1) {
    for (long c = 0; c < chunks; ++c) run(c);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (long c = w; c < chunks; c += workers) run(c);
      });
    for (auto& t : pool) t.join();
  }
  KahanSum<T> total;
  for (const auto& p : parts) {
    if (p.failed >= 0) return {T(0.0), p.failed};
    total.add(p.acc.sum);
  }
  return {total.sum, -1};
}

}  // namespace detail

template <HypoModel M>
ContrastValue contrast_value(const M& m, const ContrastConfig& cfg, const ObservationSet& obs,
                             const Vec<double, M::kP>& th, const ContrastOptions& opt = {}) {
  ContrastValue out;
  if (opt.per_step) out.per_step_terms.assign(obs.n(), 0.0);
  const auto [v, failed] = detail::contrast_sum(m, cfg, obs, th, opt, opt.per_step ? &out.per_step_terms : nullptr);
  if (failed >= 0) {
    out.ok = false;
    out.failed_step = failed;
    out.value = ContrastValue::kSentinel;
    return out;
  }
  out.value = v;
  return out;
}

template <int P>
struct ContrastGradient {
  double value = 0.0;
  Vec<double, P> grad = Vec<double, P>::Zero();
  bool ok = true;
  long failed_step = -1;
};

// Forward-mode derivative of the whole evaluation, one Jet direction per parameter.
template <HypoModel M>
ContrastGradient<M::kP> contrast_gradient(const M& m, const ContrastConfig& cfg, const ObservationSet& obs,
                                          const Vec<double, M::kP>& th, const ContrastOptions& opt = {}) {
  using J = Jet<M::kP>;
  Vec<J, M::kP> tj;
  for (int k = 0; k < M::kP; ++k) tj[k] = J(th[k], k);
  const auto [v, failed] = detail::contrast_sum(m, cfg, obs, tj, opt, nullptr);
  ContrastGradient<M::kP> out;
  if (failed >= 0) {
    out.ok = false;
    out.failed_step = failed;
    out.value = ContrastValue::kSentinel;
    return out;
  }
  out.value = v.a;
  out.grad = v.v;
  return out;
}

}  // namespace hypo
