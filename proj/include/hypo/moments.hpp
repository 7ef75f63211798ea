#pragma once

#include <array>
#include <cmath>
#include <string>

#include "hypo/linalg.hpp"
#include "hypo/local_terms.hpp"
#include "hypo/model.hpp"

namespace hypo {

struct ContrastConfig {
  int p = 2;
  [[nodiscard]] int kp() const { return p / 2; }
};

template <HypoModel M>
void check_config(const ContrastConfig& cfg) {
  if (cfg.p < 2 || cfg.p > M::kMaxP)
    throw UnsupportedOrder("expansion order p=" + std::to_string(cfg.p) + " unsupported (model supports 2.." +
                           std::to_string(M::kMaxP) + ")");
}

namespace detail {

template <HypoModel M>
std::array<double, M::kN> residual_scale(double h) {
  static constexpr auto pw = component_power2<M>();
  std::array<double, M::kN> s{};
  const double rt = std::sqrt(h);
  for (int i = 0; i < M::kN; ++i) {
    double v = 1.0;
    for (int k = 0; k < pw[i]; ++k) v *= rt;
    s[i] = 1.0 / v;
  }
  return s;
}

// 1 / (a_i! a_j! (a_i + a_j + 1)) with a = 0 (R), 1 (S or S2), 2 (S1):
// gives 1, 1/2, 1/3 for class I and 1, 1/2, 1/6, 1/3, 1/8, 1/20 for class II.
template <HypoModel M>
Mat<double, M::kN, M::kN> leading_coefficients() {
  constexpr auto pw = component_power2<M>();
  Mat<double, M::kN, M::kN> c;
  const double fact[3] = {1.0, 1.0, 2.0};
  for (int i = 0; i < M::kN; ++i)
    for (int j = 0; j < M::kN; ++j) {
      const int a = (pw[i] - 1) / 2, b = (pw[j] - 1) / 2;
      c(i, j) = 1.0 / (fact[a] * fact[b] * (a + b + 1));
    }
  return c;
}

}  // namespace detail

// Stacked truncated conditional mean x + sum_k h^k/k! L^{k-1} mu, with per-block orders
// K_p + 2 (S1), K_p + 1 (S2 or S), K_p (R).
template <HypoModel M, class T>
Vec<T, M::kN> mean_expansion(const M& m, const ContrastConfig& cfg, double h, const Vec<double, M::kN>& x,
                             const Vec<T, M::kP>& th) {
  static constexpr auto shift = component_order_shift<M>();
  const int kp = cfg.kp();
  int qmax = 0;
  for (int s : shift) qmax = std::max(qmax, kp + s);
  Vec<T, M::kN> r;
  for (int i = 0; i < M::kN; ++i) r[i] = T(x[i]);
  if (h == 0.0) return r;
  double coef = 1.0;
  for (int k = 1; k <= qmax; ++k) {
    coef *= h / k;
    const Vec<T, M::kN> g = m.generator_term(k, x, th);
    for (int i = 0; i < M::kN; ++i)
      if (k <= kp + shift[i]) r[i] += coef * g[i];
  }
  return r;
}

template <HypoModel M, class T>
Vec<T, M::kN> standardized_residual(const M& m, const ContrastConfig& cfg, double h, const Vec<double, M::kN>& x_prev,
                                    const Vec<double, M::kN>& x_next, const Vec<T, M::kP>& th) {
  if (!(h > 0.0)) throw Error("standardized_residual: step must be positive");
  const auto r = mean_expansion(m, cfg, h, x_prev, th);
  const auto sc = detail::residual_scale<M>(h);
  Vec<T, M::kN> out;
  for (int i = 0; i < M::kN; ++i) out[i] = (x_next[i] - r[i]) * sc[i];
  return out;
}

// Stacked leading fields [L_k L mu_S1; L_k mu_S2; A_R] (class II) or [L_k mu_S; A_R] (class I).
template <HypoModel M, class T>
Mat<T, M::kN, M::kD> leading_fields(const M& m, const Vec<double, M::kN>& x, const Vec<T, M::kP>& th) {
  static constexpr auto t = block_table<M>();
  Mat<T, M::kN, M::kD> v = m.diffusion(x, th);
  const auto& sb = t.blocks[0];
  const Mat<T, M::kN, M::kD> l = m.directional_terms(x, th);
  if constexpr (M::kClass == ModelClass::kHypoI) {
    v.block(sb.offset, 0, sb.size, M::kD) = l.block(sb.offset, 0, sb.size, M::kD);
  } else {
    const Mat<T, M::kN, M::kD> ll = m.directional_generator_terms(x, th);
    const auto& s2 = t.blocks[1];
    v.block(sb.offset, 0, sb.size, M::kD) = ll.block(sb.offset, 0, sb.size, M::kD);
    v.block(s2.offset, 0, s2.size, M::kD) = l.block(s2.offset, 0, s2.size, M::kD);
  }
  return v;
}

template <HypoModel M, class T>
Mat<T, M::kN, M::kN> sigma_from_fields(const Mat<T, M::kN, M::kD>& v) {
  static const auto c = detail::leading_coefficients<M>();
  Mat<T, M::kN, M::kN> s;
  for (int i = 0; i < M::kN; ++i)
    for (int j = i; j < M::kN; ++j) {
      T acc = v(i, 0) * v(j, 0);
      for (int k = 1; k < M::kD; ++k) acc += v(i, k) * v(j, k);
      s(i, j) = c(i, j) * acc;
      s(j, i) = s(i, j);
    }
  return s;
}

// Sigma(x, theta)
template <HypoModel M, class T>
Mat<T, M::kN, M::kN> leading_sigma(const M& m, const Vec<double, M::kN>& x, const Vec<T, M::kP>& th) {
  return sigma_from_fields<M, T>(leading_fields(m, x, th));
}

// Fused per-step ingredients; models may supply their own (the built-ins do).
template <HypoModel M, class T>
void local_terms(const M& m, int p, const Vec<double, M::kN>& x, const Vec<T, M::kP>& th,
                 LocalTerms<T, M::kN, M::kD>& o) {
  if constexpr (requires { m.local_terms(p, x, th, o); }) {
    m.local_terms(p, x, th, o);
  } else {
    static constexpr auto shift = component_order_shift<M>();
    int qmax = 0;
    for (int s : shift) qmax = std::max(qmax, p / 2 + s);
    for (int k = 1; k <= qmax; ++k) o.gen[k - 1] = m.generator_term(k, x, th);
    o.lead = leading_fields(m, x, th);
    if (p >= 3)
      for (int j = 1; j <= p / 2; ++j) o.corr[j - 1] = m.covariance_correction(j, x, th);
  }
}

template <class T, int N>
struct CovExpansion {
  Mat<T, N, N> sigma0;
  std::array<Mat<T, N, N>, 2> corrections;  // Sigma_1, Sigma_2
  int k = 0;                                // number of corrections filled
  Mat<T, N, N> lambda;
  T logdet{};

  [[nodiscard]] Mat<T, N, N> xi(double h) const {
    Mat<T, N, N> out = sigma0;
    double hp = 1.0;
    for (int j = 0; j < k; ++j) {
      hp *= h;
      out += hp * corrections[j];
    }
    return out;
  }
};

template <HypoModel M, class T>
CovExpansion<T, M::kN> leading_covariance(const M& m, const Vec<double, M::kN>& x, const Vec<T, M::kP>& th) {
  CovExpansion<T, M::kN> out;
  out.sigma0 = leading_sigma(m, x, th);
  const auto inv = sym_inverse(out.sigma0);
  if (!inv.ok) {
    Mat<double, M::kN, M::kN> v;
    for (int i = 0; i < M::kN; ++i)
      for (int j = 0; j < M::kN; ++j) v(i, j) = value_of(out.sigma0(i, j));
    const double ev = min_eigenvalue<M::kN>(v);
    throw NotPositiveDefinite("leading covariance not positive definite (smallest eigenvalue " +
                                  std::to_string(ev) + ")",
                              ev);
  }
  out.lambda = inv.inv;
  out.logdet = inv.logdet;
  return out;
}

template <HypoModel M, class T>
CovExpansion<T, M::kN> covariance_corrections(const M& m, const ContrastConfig& cfg, const Vec<double, M::kN>& x,
                                              const Vec<T, M::kP>& th) {
  check_config<M>(cfg);
  auto out = leading_covariance(m, x, th);
  out.k = cfg.kp();
  for (int j = 1; j <= out.k; ++j) out.corrections[j - 1] = m.covariance_correction(j, x, th);
  return out;
}

// Xi_K(h) = Sigma + sum_{j <= K_p} h^j Sigma_j
template <HypoModel M, class T>
Mat<T, M::kN, M::kN> covariance_expansion(const M& m, const ContrastConfig& cfg, double h,
                                          const Vec<double, M::kN>& x, const Vec<T, M::kP>& th) {
  return covariance_corrections(m, cfg, x, th).xi(h);
}

}  // namespace hypo
