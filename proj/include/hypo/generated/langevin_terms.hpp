// Generated by scripts/derive_builtins.py; do not edit.
#pragma once

#include <Eigen/Core>

#include "hypo/local_terms.hpp"

namespace hypo::generated::langevin {

inline constexpr int kGeneratorOrder = 3;
inline constexpr int kCorrections = 2;

// L^{k-1} mu, all components
template <class T, class U>
Eigen::Matrix<T, 2, 1> generator_term(int k, const Eigen::Matrix<double, 2, 1>& x, const Eigen::Matrix<T, 2, 1>& th, [[maybe_unused]] const U* du) {
  [[maybe_unused]] const double q = x[0];
  [[maybe_unused]] const double p = x[1];
  [[maybe_unused]] const T& gamma = th[0];
  [[maybe_unused]] const T& sigma = th[1];
  Eigen::Matrix<T, 2, 1> r;
  switch (k) {
    case 1: {
      [[maybe_unused]] const auto& u1 = du[0];
      r[0] = T(p);
      r[1] = T(gamma*p - u1);
      break;
    }
    case 2: {
      [[maybe_unused]] const auto& u1 = du[0];
      [[maybe_unused]] const auto& u2 = du[1];
      r[0] = T(gamma*p - u1);
      r[1] = T((gamma*gamma)*p - gamma*u1 - p*u2);
      break;
    }
    case 3: {
      [[maybe_unused]] const auto& u1 = du[0];
      [[maybe_unused]] const auto& u2 = du[1];
      [[maybe_unused]] const auto& u3 = du[2];
      const auto t0 = p*u2;
      const auto t1 = (gamma*gamma);
      r[0] = T(-gamma*u1 + p*t1 - t0);
      r[1] = T((gamma*gamma*gamma)*p - 2.0*gamma*t0 - (p*p)*u3 - t1*u1 + u1*u2);
      break;
    }
    default:
      r.setConstant(T(0.0));
  }
  return r;
}

// L_1 mu
template <class T, class U>
Eigen::Matrix<T, 2, 1> directional_term(const Eigen::Matrix<double, 2, 1>& x, const Eigen::Matrix<T, 2, 1>& th, [[maybe_unused]] const U* du) {
  [[maybe_unused]] const double q = x[0];
  [[maybe_unused]] const double p = x[1];
  [[maybe_unused]] const T& gamma = th[0];
  [[maybe_unused]] const T& sigma = th[1];
  Eigen::Matrix<T, 2, 1> r;
  r[0] = T(sigma);
  r[1] = T(gamma*sigma);
  return r;
}

// L_1 L mu
template <class T, class U>
Eigen::Matrix<T, 2, 1> directional_generator_term(const Eigen::Matrix<double, 2, 1>& x, const Eigen::Matrix<T, 2, 1>& th, [[maybe_unused]] const U* du) {
  [[maybe_unused]] const double q = x[0];
  [[maybe_unused]] const double p = x[1];
  [[maybe_unused]] const T& gamma = th[0];
  [[maybe_unused]] const T& sigma = th[1];
  [[maybe_unused]] const auto& u1 = du[0];
  [[maybe_unused]] const auto& u2 = du[1];
  Eigen::Matrix<T, 2, 1> r;
  r[0] = T(gamma*sigma);
  r[1] = T(sigma*((gamma*gamma) - u2));
  return r;
}

// Sigma_j: coefficient of h^j in the block-scaled conditional covariance
template <class T, class U>
Eigen::Matrix<T, 2, 2> covariance_correction(int j, const Eigen::Matrix<double, 2, 1>& x, const Eigen::Matrix<T, 2, 1>& th, [[maybe_unused]] const U* du) {
  [[maybe_unused]] const double q = x[0];
  [[maybe_unused]] const double p = x[1];
  [[maybe_unused]] const T& gamma = th[0];
  [[maybe_unused]] const T& sigma = th[1];
  Eigen::Matrix<T, 2, 2> r;
  switch (j) {
    case 1: {
      const auto t0 = gamma*(sigma*sigma);
      r(0, 0) = T(((1.0/4.0))*t0);
      r(0, 1) = T(((1.0/2.0))*t0);
      r(1, 1) = T(t0);
      r(1, 0) = r(0, 1);
      break;
    }
    case 2: {
      [[maybe_unused]] const auto& u1 = du[0];
      [[maybe_unused]] const auto& u2 = du[1];
      const auto t0 = (sigma*sigma);
      const auto t1 = (gamma*gamma);
      const auto t2 = t0*(7.0*t1 - 4.0*u2);
      r(0, 0) = T(((1.0/60.0))*t2);
      r(0, 1) = T(((1.0/24.0))*t2);
      r(1, 1) = T(((1.0/3.0))*t0*(2.0*t1 - u2));
      r(1, 0) = r(0, 1);
      break;
    }
    default:
      r.setConstant(T(0.0));
  }
  return r;
}

// All local ingredients for expansion order p in one pass.
template <class T, class U>
void local_terms(int order, const Eigen::Matrix<double, 2, 1>& x, const Eigen::Matrix<T, 2, 1>& th, [[maybe_unused]] const U* du, LocalTerms<T, 2, 1>& o) {
  [[maybe_unused]] const double q = x[0];
  [[maybe_unused]] const double p = x[1];
  [[maybe_unused]] const T& gamma = th[0];
  [[maybe_unused]] const T& sigma = th[1];
  switch (order) {
    case 2: {
      [[maybe_unused]] const auto& u1 = du[0];
      const auto t0 = gamma*p - u1;
      o.gen[0][0] = T(p);
      o.gen[1][0] = T(t0);
      o.gen[0][1] = T(t0);
      o.lead(0, 0) = T(sigma);
      o.lead(1, 0) = T(sigma);
      break;
    }
    case 3: {
      [[maybe_unused]] const auto& u1 = du[0];
      const auto t0 = gamma*p - u1;
      const auto t1 = gamma*(sigma*sigma);
      o.gen[0][0] = T(p);
      o.gen[1][0] = T(t0);
      o.gen[0][1] = T(t0);
      o.lead(0, 0) = T(sigma);
      o.lead(1, 0) = T(sigma);
      o.corr[0](0, 0) = T(((1.0/4.0))*t1);
      o.corr[0](0, 1) = T(((1.0/2.0))*t1);
      o.corr[0](1, 1) = T(t1);
      o.corr[0](1, 0) = o.corr[0](0, 1);
      break;
    }
    case 4: {
      [[maybe_unused]] const auto& u1 = du[0];
      [[maybe_unused]] const auto& u2 = du[1];
      const auto t0 = gamma*p - u1;
      const auto t1 = (gamma*gamma);
      const auto t2 = -gamma*u1 + p*t1 - p*u2;
      const auto t3 = (sigma*sigma);
      const auto t4 = gamma*t3;
      const auto t5 = t3*(7.0*t1 - 4.0*u2);
      o.gen[0][0] = T(p);
      o.gen[1][0] = T(t0);
      o.gen[2][0] = T(t2);
      o.gen[0][1] = T(t0);
      o.gen[1][1] = T(t2);
      o.lead(0, 0) = T(sigma);
      o.lead(1, 0) = T(sigma);
      o.corr[0](0, 0) = T(((1.0/4.0))*t4);
      o.corr[0](0, 1) = T(((1.0/2.0))*t4);
      o.corr[0](1, 1) = T(t4);
      o.corr[1](0, 0) = T(((1.0/60.0))*t5);
      o.corr[1](0, 1) = T(((1.0/24.0))*t5);
      o.corr[1](1, 1) = T(((1.0/3.0))*t3*(2.0*t1 - u2));
      o.corr[0](1, 0) = o.corr[0](0, 1);
      o.corr[1](1, 0) = o.corr[1](0, 1);
      break;
    }
    default:
      break;
  }
}

}  // namespace hypo::generated::langevin
