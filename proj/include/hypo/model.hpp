#pragma once

#include <Eigen/SVD>

#include <array>
#include <cmath>
#include <concepts>
#include <string>
#include <vector>

#include "hypo/param.hpp"
#include "hypo/types.hpp"

namespace hypo {

// A hypo-elliptic model. Class I models set kS2 = 0 and keep the smooth block in kS1.
// All evaluators are templates on the parameter scalar so that Jet parameters flow through.
template <class M>
concept HypoModel = requires(const M& m, const Vec<double, M::kN>& x, const Vec<double, M::kP>& th, int k) {
  { M::kClass } -> std::convertible_to<ModelClass>;
  { M::kN } -> std::convertible_to<int>;
  { M::kD } -> std::convertible_to<int>;
  { M::kP } -> std::convertible_to<int>;
  { M::kS1 } -> std::convertible_to<int>;
  { M::kS2 } -> std::convertible_to<int>;
  { M::kR } -> std::convertible_to<int>;
  { M::kMaxP } -> std::convertible_to<int>;
  { M::params() } -> std::convertible_to<std::array<ParamInfo, M::kP>>;
  { m.id() } -> std::convertible_to<std::string>;
  { m.drift(x, th) } -> std::same_as<Vec<double, M::kN>>;
  { m.diffusion(x, th) } -> std::same_as<Mat<double, M::kN, M::kD>>;
  { m.generator_term(k, x, th) } -> std::same_as<Vec<double, M::kN>>;
  { m.directional_terms(x, th) } -> std::same_as<Mat<double, M::kN, M::kD>>;
  { m.directional_generator_terms(x, th) } -> std::same_as<Mat<double, M::kN, M::kD>>;
  { m.covariance_correction(k, x, th) } -> std::same_as<Mat<double, M::kN, M::kN>>;
};

struct BlockSpec {
  StateBlock block;
  int offset;
  int size;
  int power2;       // residual divisor is h^(power2/2)
  int order_shift;  // mean expansion order is K_p + order_shift
};

struct BlockTable {
  std::array<BlockSpec, 3> blocks;
  int count;
};

// Single source of the per-block h-powers and mean orders.
constexpr BlockTable block_table(ModelClass c, int s1, int s2, int r) {
  if (c == ModelClass::kHypoI)
    return {{{{StateBlock::kS, 0, s1, 3, 1}, {StateBlock::kR, s1, r, 1, 0}, {StateBlock::kR, 0, 0, 0, 0}}}, 2};
  return {{{{StateBlock::kS1, 0, s1, 5, 2}, {StateBlock::kS2, s1, s2, 3, 1}, {StateBlock::kR, s1 + s2, r, 1, 0}}},
          3};
}

template <HypoModel M>
constexpr BlockTable block_table() {
  return block_table(M::kClass, M::kS1, M::kS2, M::kR);
}

template <HypoModel M>
constexpr std::array<int, M::kN> component_power2() {
  std::array<int, M::kN> out{};
  const auto t = block_table<M>();
  for (int b = 0; b < t.count; ++b)
    for (int i = 0; i < t.blocks[b].size; ++i) out[t.blocks[b].offset + i] = t.blocks[b].power2;
  return out;
}

template <HypoModel M>
constexpr std::array<int, M::kN> component_order_shift() {
  std::array<int, M::kN> out{};
  const auto t = block_table<M>();
  for (int b = 0; b < t.count; ++b)
    for (int i = 0; i < t.blocks[b].size; ++i) out[t.blocks[b].offset + i] = t.blocks[b].order_shift;
  return out;
}

template <HypoModel M>
const BlockSpec& find_block(StateBlock b) {
  static constexpr auto t = block_table<M>();
  for (int i = 0; i < t.count; ++i)
    if (t.blocks[i].block == b) return t.blocks[i];
  throw DimensionError(std::string("block ") + to_string(b) + " does not exist for class " + to_string(M::kClass));
}

// Highest generator order k the model supports for a block (L^{k-1} mu).
template <HypoModel M>
int generator_limit(StateBlock b) {
  return M::kMaxP / 2 + find_block<M>(b).order_shift;
}

namespace detail {

template <HypoModel M>
Vec<double, M::kN> check_state(const VectorXd& x) {
  if (x.size() != M::kN) {
    std::string msg = "state has length " + std::to_string(x.size()) + ", expected " + std::to_string(M::kN) + " (";
    const auto t = block_table<M>();
    for (int b = 0; b < t.count; ++b)
      msg += std::string(b ? ", " : "") + to_string(t.blocks[b].block) + ":" + std::to_string(t.blocks[b].size);
    throw DimensionError(msg + ")");
  }
  return x;
}

template <HypoModel M>
Vec<double, M::kP> check_theta(const VectorXd& th) {
  if (th.size() != M::kP) {
    std::string msg = "parameter vector has length " + std::to_string(th.size()) + ", expected " +
                      std::to_string(M::kP) + " (";
    for (const auto& p : M::params()) msg += std::string(p.name) + ":" + to_string(p.block) + " ";
    throw DimensionError(msg + ")");
  }
  return th;
}

}  // namespace detail

template <HypoModel M>
VectorXd evaluate_drift(const M& m, const VectorXd& x, const VectorXd& th) {
  return m.drift(detail::check_state<M>(x), detail::check_theta<M>(th));
}

template <HypoModel M>
VectorXd drift_block(const M& m, StateBlock b, const VectorXd& x, const VectorXd& th) {
  const auto& spec = find_block<M>(b);
  return evaluate_drift(m, x, th).segment(spec.offset, spec.size);
}

template <HypoModel M>
VectorXd evaluate_generator_term(const M& m, int k, StateBlock b, const VectorXd& x, const VectorXd& th) {
  const auto& spec = find_block<M>(b);
  const int lim = generator_limit<M>(b);
  if (k < 1 || k > lim)
    throw UnsupportedOrder("generator order " + std::to_string(k) + " unsupported for block " + to_string(b) +
                           " of " + m.id() + " (declared 1.." + std::to_string(lim) + ")");
  const Vec<double, M::kN> g = m.generator_term(k, detail::check_state<M>(x), detail::check_theta<M>(th));
  return g.segment(spec.offset, spec.size);
}

struct HormanderPoint {
  std::vector<double> min_singular_values;  // one per span condition
};

struct HormanderReport {
  bool pass = true;
  std::vector<HormanderPoint> points;
  [[nodiscard]] double min_margin() const {
    double v = INFINITY;
    for (const auto& p : points)
      for (double s : p.min_singular_values) v = std::min(v, s);
    return v;
  }
};

namespace detail {

inline double smallest_singular_value(const MatrixXd& a, int rank_needed) {
  if (a.cols() < rank_needed) return 0.0;
  Eigen::JacobiSVD<MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  return s.size() >= rank_needed ? s(rank_needed - 1) : 0.0;
}

}  // namespace detail

// Numerical check of the span conditions at sample points, with Lie brackets
// by central differences (step 1e-5 * (1 + |x|)).
template <HypoModel M>
HormanderReport hormander_rank_check(const M& m, const Vec<double, M::kP>& th,
                                     const std::vector<Vec<double, M::kN>>& points, double tol = 1e-4) {
  using V = Vec<double, M::kN>;
  if (points.empty()) throw Error("hormander_rank_check: no points");
  constexpr int N = M::kN;
  constexpr int D = M::kD;
  const double hbase = 1e-5;

  auto field_a = [&](int k, const V& x) -> V { return m.diffusion(x, th).col(k); };
  auto deriv = [&](auto&& f, const V& x, const V& dir) -> V {
    const double h = hbase * (1.0 + x.norm());
    return (f(V(x + h * dir)) - f(V(x - h * dir))) / (2.0 * h);
  };
  auto a0 = [&](const V& x) -> V {
    V out = m.drift(x, th);
    for (int k = 0; k < D; ++k) {
      auto ak = [&](const V& y) { return field_a(k, y); };
      out -= 0.5 * deriv(ak, x, field_a(k, x));
    }
    return out;
  };
  auto bracket = [&](auto&& f, auto&& g, const V& x) -> V {
    return V(deriv(g, x, f(x)) - deriv(f, x, g(x)));
  };

  HormanderReport rep;
  for (const auto& x : points) {
    if (!x.allFinite() || !m.drift(x, th).allFinite() || !m.diffusion(x, th).allFinite())
      throw Error("hormander_rank_check: non-finite field at point " + std::to_string(rep.points.size()));
    HormanderPoint pt;
    const auto t = block_table<M>();
    const auto& rb = t.blocks[t.count - 1];
    MatrixXd ar = m.diffusion(x, th).block(rb.offset, 0, rb.size, D);
    pt.min_singular_values.push_back(detail::smallest_singular_value(ar, rb.size));

    std::vector<V> ak, b1, b2;
    for (int k = 0; k < D; ++k) {
      auto fk = [&, k](const V& y) { return field_a(k, y); };
      auto bk = [&, k](const V& y) { return bracket(a0, fk, y); };
      ak.push_back(fk(x));
      b1.push_back(bk(x));
      if constexpr (M::kClass == ModelClass::kHypoII) b2.push_back(bracket(a0, bk, x));
    }
    if constexpr (M::kClass == ModelClass::kHypoI) {
      MatrixXd span(N, 2 * D);
      for (int k = 0; k < D; ++k) {
        span.col(2 * k) = ak[k];
        span.col(2 * k + 1) = b1[k];
      }
      pt.min_singular_values.push_back(detail::smallest_singular_value(span, N));
    } else {
      const int lo = M::kS1;
      MatrixXd proj(N - lo, 2 * D);
      MatrixXd span(N, 3 * D);
      for (int k = 0; k < D; ++k) {
        proj.col(2 * k) = ak[k].tail(N - lo);
        proj.col(2 * k + 1) = b1[k].tail(N - lo);
        span.col(3 * k) = ak[k];
        span.col(3 * k + 1) = b1[k];
        span.col(3 * k + 2) = b2[k];
      }
      pt.min_singular_values.push_back(detail::smallest_singular_value(proj, N - lo));
      pt.min_singular_values.push_back(detail::smallest_singular_value(span, N));
    }
    for (double s : pt.min_singular_values)
      if (!(s > tol)) rep.pass = false;
    rep.points.push_back(std::move(pt));
  }
  return rep;
}

}  // namespace hypo
