// Generated by scripts/derive_builtins.py; do not edit.
#pragma once

#include <Eigen/Core>

#include "hypo/local_terms.hpp"

namespace hypo::generated::qgle {

inline constexpr int kGeneratorOrder = 3;
inline constexpr int kCorrections = 1;

// L^{k-1} mu, all components
template <class T, class U>
Eigen::Matrix<T, 3, 1> generator_term(int k, const Eigen::Matrix<double, 3, 1>& x, const Eigen::Matrix<T, 4, 1>& th, [[maybe_unused]] const U* du) {
  [[maybe_unused]] const double q = x[0];
  [[maybe_unused]] const double p = x[1];
  [[maybe_unused]] const double s = x[2];
  [[maybe_unused]] const T& D = th[0];
  [[maybe_unused]] const T& lambda_ = th[1];
  [[maybe_unused]] const T& alpha = th[2];
  [[maybe_unused]] const T& sigma = th[3];
  Eigen::Matrix<T, 3, 1> r;
  switch (k) {
    case 1: {
      [[maybe_unused]] const auto& u1 = du[0];
      r[0] = T(p);
      r[1] = T(lambda_*s - u1);
      r[2] = T(-alpha*s - lambda_*p);
      break;
    }
    case 2: {
      [[maybe_unused]] const auto& u1 = du[0];
      [[maybe_unused]] const auto& u2 = du[1];
      const auto t0 = lambda_*s;
      const auto t1 = (lambda_*lambda_);
      r[0] = T(t0 - u1);
      r[1] = T(-alpha*t0 - p*t1 - p*u2);
      r[2] = T((alpha*alpha)*s + alpha*lambda_*p + lambda_*u1 - s*t1);
      break;
    }
    case 3: {
      [[maybe_unused]] const auto& u1 = du[0];
      [[maybe_unused]] const auto& u2 = du[1];
      [[maybe_unused]] const auto& u3 = du[2];
      const auto t0 = lambda_*s;
      const auto t1 = (lambda_*lambda_);
      const auto t2 = p*t1;
      const auto t3 = (lambda_*lambda_*lambda_);
      const auto t4 = (alpha*alpha);
      r[0] = T(-alpha*t0 - p*u2 - t2);
      r[1] = T(alpha*t2 - (p*p)*u3 - s*t3 + t0*t4 - t0*u2 + t1*u1 + u1*u2);
      r[2] = T(-(alpha*alpha*alpha)*s - alpha*lambda_*u1 + 2.0*alpha*s*t1 - lambda_*p*t4 + lambda_*p*u2 + p*t3);
      break;
    }
    default:
      r.setConstant(T(0.0));
  }
  return r;
}

// L_1 mu
template <class T, class U>
Eigen::Matrix<T, 3, 1> directional_term(const Eigen::Matrix<double, 3, 1>& x, const Eigen::Matrix<T, 4, 1>& th, [[maybe_unused]] const U* du) {
  [[maybe_unused]] const double q = x[0];
  [[maybe_unused]] const double p = x[1];
  [[maybe_unused]] const double s = x[2];
  [[maybe_unused]] const T& D = th[0];
  [[maybe_unused]] const T& lambda_ = th[1];
  [[maybe_unused]] const T& alpha = th[2];
  [[maybe_unused]] const T& sigma = th[3];
  Eigen::Matrix<T, 3, 1> r;
  r[0] = T(0.0);
  r[1] = T(lambda_*sigma);
  r[2] = T(-alpha*sigma);
  return r;
}

// L_1 L mu
template <class T, class U>
Eigen::Matrix<T, 3, 1> directional_generator_term(const Eigen::Matrix<double, 3, 1>& x, const Eigen::Matrix<T, 4, 1>& th, [[maybe_unused]] const U* du) {
  [[maybe_unused]] const double q = x[0];
  [[maybe_unused]] const double p = x[1];
  [[maybe_unused]] const double s = x[2];
  [[maybe_unused]] const T& D = th[0];
  [[maybe_unused]] const T& lambda_ = th[1];
  [[maybe_unused]] const T& alpha = th[2];
  [[maybe_unused]] const T& sigma = th[3];
  Eigen::Matrix<T, 3, 1> r;
  const auto t0 = lambda_*sigma;
  r[0] = T(t0);
  r[1] = T(-alpha*t0);
  r[2] = T(sigma*((alpha*alpha) - (lambda_*lambda_)));
  return r;
}

// Sigma_j: coefficient of h^j in the block-scaled conditional covariance
template <class T, class U>
Eigen::Matrix<T, 3, 3> covariance_correction(int j, const Eigen::Matrix<double, 3, 1>& x, const Eigen::Matrix<T, 4, 1>& th, [[maybe_unused]] const U* du) {
  [[maybe_unused]] const double q = x[0];
  [[maybe_unused]] const double p = x[1];
  [[maybe_unused]] const double s = x[2];
  [[maybe_unused]] const T& D = th[0];
  [[maybe_unused]] const T& lambda_ = th[1];
  [[maybe_unused]] const T& alpha = th[2];
  [[maybe_unused]] const T& sigma = th[3];
  Eigen::Matrix<T, 3, 3> r;
  switch (j) {
    case 1: {
      const auto t0 = alpha*(sigma*sigma);
      const auto t1 = (lambda_*lambda_)*t0;
      const auto t2 = lambda_*t0;
      r(0, 0) = T(-(1.0/36.0)*t1);
      r(0, 1) = T(-(1.0/12.0)*t1);
      r(0, 2) = T(-(1.0/6.0)*t2);
      r(1, 1) = T(-(1.0/4.0)*t1);
      r(1, 2) = T(-(1.0/2.0)*t2);
      r(2, 2) = T(-t0);
      r(1, 0) = r(0, 1);
      r(2, 0) = r(0, 2);
      r(2, 1) = r(1, 2);
      break;
    }
    default:
      r.setConstant(T(0.0));
  }
  return r;
}

// All local ingredients for expansion order p in one pass.
template <class T, class U>
void local_terms(int order, const Eigen::Matrix<double, 3, 1>& x, const Eigen::Matrix<T, 4, 1>& th, [[maybe_unused]] const U* du, LocalTerms<T, 3, 1>& o) {
  [[maybe_unused]] const double q = x[0];
  [[maybe_unused]] const double p = x[1];
  [[maybe_unused]] const double s = x[2];
  [[maybe_unused]] const T& D = th[0];
  [[maybe_unused]] const T& lambda_ = th[1];
  [[maybe_unused]] const T& alpha = th[2];
  [[maybe_unused]] const T& sigma = th[3];
  switch (order) {
    case 2: {
      [[maybe_unused]] const auto& u1 = du[0];
      [[maybe_unused]] const auto& u2 = du[1];
      const auto t0 = lambda_*s;
      const auto t1 = t0 - u1;
      const auto t2 = -alpha*t0 - (lambda_*lambda_)*p - p*u2;
      const auto t3 = lambda_*sigma;
      o.gen[0][0] = T(p);
      o.gen[1][0] = T(t1);
      o.gen[2][0] = T(t2);
      o.gen[0][1] = T(t1);
      o.gen[1][1] = T(t2);
      o.gen[0][2] = T(-alpha*s - lambda_*p);
      o.lead(0, 0) = T(t3);
      o.lead(1, 0) = T(t3);
      o.lead(2, 0) = T(sigma);
      break;
    }
    case 3: {
      [[maybe_unused]] const auto& u1 = du[0];
      [[maybe_unused]] const auto& u2 = du[1];
      const auto t0 = lambda_*s;
      const auto t1 = t0 - u1;
      const auto t2 = (lambda_*lambda_);
      const auto t3 = -alpha*t0 - p*t2 - p*u2;
      const auto t4 = lambda_*sigma;
      const auto t5 = alpha*(sigma*sigma);
      const auto t6 = t2*t5;
      const auto t7 = lambda_*t5;
      o.gen[0][0] = T(p);
      o.gen[1][0] = T(t1);
      o.gen[2][0] = T(t3);
      o.gen[0][1] = T(t1);
      o.gen[1][1] = T(t3);
      o.gen[0][2] = T(-alpha*s - lambda_*p);
      o.lead(0, 0) = T(t4);
      o.lead(1, 0) = T(t4);
      o.lead(2, 0) = T(sigma);
      o.corr[0](0, 0) = T(-(1.0/36.0)*t6);
      o.corr[0](0, 1) = T(-(1.0/12.0)*t6);
      o.corr[0](0, 2) = T(-(1.0/6.0)*t7);
      o.corr[0](1, 1) = T(-(1.0/4.0)*t6);
      o.corr[0](1, 2) = T(-(1.0/2.0)*t7);
      o.corr[0](2, 2) = T(-t5);
      o.corr[0](1, 0) = o.corr[0](0, 1);
      o.corr[0](2, 0) = o.corr[0](0, 2);
      o.corr[0](2, 1) = o.corr[0](1, 2);
      break;
    }
    default:
      break;
  }
}

}  // namespace hypo::generated::qgle
