// Generated by scripts/derive_builtins.py; do not edit.
#pragma once

#include <Eigen/Core>

#include "hypo/local_terms.hpp"

namespace hypo::generated::fhn {

inline constexpr int kGeneratorOrder = 3;
inline constexpr int kCorrections = 2;

// L^{k-1} mu, all components
template <class T, class U>
Eigen::Matrix<T, 2, 1> generator_term(int k, const Eigen::Matrix<double, 2, 1>& x, const Eigen::Matrix<T, 4, 1>& th, [[maybe_unused]] const U* du, double c_s) {
  [[maybe_unused]] const double X = x[0];
  [[maybe_unused]] const double Y = x[1];
  [[maybe_unused]] const T& eps = th[0];
  [[maybe_unused]] const T& gamma = th[1];
  [[maybe_unused]] const T& alpha = th[2];
  [[maybe_unused]] const T& sigma = th[3];
  [[maybe_unused]] const double s = c_s;
  Eigen::Matrix<T, 2, 1> r;
  switch (k) {
    case 1: {
      r[0] = T((-(X*X*X) + X - Y - s)/eps);
      r[1] = T(X*gamma - Y + alpha);
      break;
    }
    case 2: {
      const auto t0 = (1.0/(eps));
      const auto t1 = X*gamma;
      const auto t2 = Y*t0;
      const auto t3 = s*t0;
      const auto t4 = (X*X*X)*t0;
      const auto t5 = 3.0*(X*X);
      r[0] = T(t0*(3.0*(X*X*X*X*X)*t0 + X*t0 + Y - alpha - t1 + t2*t5 - t2 + t3*t5 - t3 - 4.0*t4));
      r[1] = T(X*gamma*t0 + Y - alpha - gamma*t2 - gamma*t3 - gamma*t4 - t1);
      break;
    }
    case 3: {
      const auto t0 = (1.0/(eps));
      const auto t1 = (1.0/(eps*eps));
      const auto t2 = Y*t1;
      const auto t3 = alpha*t0;
      const auto t4 = s*t1;
      const auto t5 = X*gamma;
      const auto t6 = t0*t5;
      const auto t7 = (X*X*X);
      const auto t8 = t1*t7;
      const auto t9 = (X*X*X*X*X);
      const auto t10 = X*t1;
      const auto t11 = 6.0*t10;
      const auto t12 = (X*X);
      const auto t13 = Y*t0;
      const auto t14 = 3.0*t12;
      const auto t15 = 21.0*(X*X*X*X);
      const auto t16 = gamma*t0;
      const auto t17 = gamma*t2;
      const auto t18 = gamma*t4;
      r[0] = T(t0*(-15.0*(X*X*X*X*X*X*X)*t1 + X*gamma + X*t1 - (Y*Y)*t11 + Y*gamma*t0 - 12.0*Y*s*t10 + Y*t0 + 18.0*Y*t1*t12 - Y + 3.0*alpha*t0*t12 + alpha + gamma*s*t0 + 4.0*gamma*t0*t7 - (s*s)*t11 + 18.0*s*t1*t12 + 27.0*t1*t9 - t13*t14 - t15*t2 - t15*t4 - t2 - t3 - t4 - 2.0*t6 - 13.0*t8));
      r[1] = T(-X*(gamma*gamma)*t0 - Y + alpha + 3.0*gamma*t1*t9 + 2.0*gamma*t13 - gamma*t3 - 4.0*gamma*t8 + s*t16 + t1*t5 + t14*t17 + t14*t18 + t16*t7 - t17 - t18 + t5 - t6);
      break;
    }
    default:
      r.setConstant(T(0.0));
  }
  return r;
}

// L_1 mu
template <class T, class U>
Eigen::Matrix<T, 2, 1> directional_term(const Eigen::Matrix<double, 2, 1>& x, const Eigen::Matrix<T, 4, 1>& th, [[maybe_unused]] const U* du, double c_s) {
  [[maybe_unused]] const double X = x[0];
  [[maybe_unused]] const double Y = x[1];
  [[maybe_unused]] const T& eps = th[0];
  [[maybe_unused]] const T& gamma = th[1];
  [[maybe_unused]] const T& alpha = th[2];
  [[maybe_unused]] const T& sigma = th[3];
  [[maybe_unused]] const double s = c_s;
  Eigen::Matrix<T, 2, 1> r;
  r[0] = T(-sigma/eps);
  r[1] = T(-sigma);
  return r;
}

// L_1 L mu
template <class T, class U>
Eigen::Matrix<T, 2, 1> directional_generator_term(const Eigen::Matrix<double, 2, 1>& x, const Eigen::Matrix<T, 4, 1>& th, [[maybe_unused]] const U* du, double c_s) {
  [[maybe_unused]] const double X = x[0];
  [[maybe_unused]] const double Y = x[1];
  [[maybe_unused]] const T& eps = th[0];
  [[maybe_unused]] const T& gamma = th[1];
  [[maybe_unused]] const T& alpha = th[2];
  [[maybe_unused]] const T& sigma = th[3];
  [[maybe_unused]] const double s = c_s;
  Eigen::Matrix<T, 2, 1> r;
  const auto t0 = (1.0/(eps));
  r[0] = T(sigma*t0*(3.0*(X*X)*t0 - t0 + 1.0));
  r[1] = T(sigma*(-gamma*t0 + 1.0));
  return r;
}

// Sigma_j: coefficient of h^j in the block-scaled conditional covariance
template <class T, class U>
Eigen::Matrix<T, 2, 2> covariance_correction(int j, const Eigen::Matrix<double, 2, 1>& x, const Eigen::Matrix<T, 4, 1>& th, [[maybe_unused]] const U* du, double c_s) {
  [[maybe_unused]] const double X = x[0];
  [[maybe_unused]] const double Y = x[1];
  [[maybe_unused]] const T& eps = th[0];
  [[maybe_unused]] const T& gamma = th[1];
  [[maybe_unused]] const T& alpha = th[2];
  [[maybe_unused]] const T& sigma = th[3];
  [[maybe_unused]] const double s = c_s;
  Eigen::Matrix<T, 2, 2> r;
  switch (j) {
    case 1: {
      const auto t0 = (sigma*sigma);
      const auto t1 = (1.0/(eps));
      const auto t2 = 3.0*(X*X)*t1 - t1;
      r(0, 0) = T(((1.0/4.0))*t0*(-t2 - 1.0)/(eps*eps));
      r(0, 1) = T(((1.0/6.0))*t0*t1*(t2 + 3.0));
      r(1, 1) = T(-t0);
      r(1, 0) = r(0, 1);
      break;
    }
    case 2: {
      const auto t0 = (1.0/(eps*eps));
      const auto t1 = (sigma*sigma);
      const auto t2 = (1.0/(eps));
      const auto t3 = gamma*t2;
      const auto t4 = X*t0;
      const auto t5 = 66.0*t4;
      const auto t6 = (X*X);
      const auto t7 = t2*t6;
      const auto t8 = (X*X*X*X)*t0;
      const auto t9 = ((3.0/4.0))*t4;
      r(0, 0) = T(((1.0/60.0))*t0*t1*(Y*t5 + s*t5 - 108.0*t0*t6 + 7.0*t0 - 10.0*t2 - 4.0*t3 + 30.0*t7 + 129.0*t8 + 7.0));
      r(0, 1) = T(t1*t2*(-Y*t9 + ((1.0/6.0))*gamma*t2 - s*t9 + t0*t6 - (1.0/24.0)*t0 + ((1.0/6.0))*t2 - (1.0/2.0)*t7 - (9.0/8.0)*t8 + (-7.0/24.0)));
      r(1, 1) = T(((1.0/3.0))*t1*(2.0 - t3));
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
void local_terms(int order, const Eigen::Matrix<double, 2, 1>& x, const Eigen::Matrix<T, 4, 1>& th, [[maybe_unused]] const U* du, double c_s, LocalTerms<T, 2, 1>& o) {
  [[maybe_unused]] const double X = x[0];
  [[maybe_unused]] const double Y = x[1];
  [[maybe_unused]] const T& eps = th[0];
  [[maybe_unused]] const T& gamma = th[1];
  [[maybe_unused]] const T& alpha = th[2];
  [[maybe_unused]] const T& sigma = th[3];
  [[maybe_unused]] const double s = c_s;
  switch (order) {
    case 2: {
      const auto t0 = (1.0/(eps));
      const auto t1 = (X*X*X);
      const auto t2 = X*gamma;
      const auto t3 = Y*t0;
      const auto t4 = s*t0;
      const auto t5 = 3.0*(X*X);
      o.gen[0][0] = T(t0*(X - Y - s - t1));
      o.gen[1][0] = T(t0*(3.0*(X*X*X*X*X)*t0 + X*t0 + Y - alpha - 4.0*t0*t1 - t2 + t3*t5 - t3 + t4*t5 - t4));
      o.gen[0][1] = T(-Y + alpha + t2);
      o.lead(0, 0) = T(-sigma*t0);
      o.lead(1, 0) = T(sigma);
      break;
    }
    case 3: {
      const auto t0 = (1.0/(eps));
      const auto t1 = (X*X*X);
      const auto t2 = X*gamma;
      const auto t3 = Y*t0;
      const auto t4 = s*t0;
      const auto t5 = 3.0*t0;
      const auto t6 = (X*X);
      const auto t7 = 3.0*t6;
      const auto t8 = (sigma*sigma);
      const auto t9 = -t0 + t5*t6;
      o.gen[0][0] = T(t0*(X - Y - s - t1));
      o.gen[1][0] = T(t0*((X*X*X*X*X)*t5 + X*t0 + Y - alpha - 4.0*t0*t1 - t2 + t3*t7 - t3 + t4*t7 - t4));
      o.gen[0][1] = T(-Y + alpha + t2);
      o.lead(0, 0) = T(-sigma*t0);
      o.lead(1, 0) = T(sigma);
      o.corr[0](0, 0) = T(((1.0/4.0))*t8*(-t9 - 1.0)/(eps*eps));
      o.corr[0](0, 1) = T(((1.0/6.0))*t0*t8*(t9 + 3.0));
      o.corr[0](1, 1) = T(-t8);
      o.corr[0](1, 0) = o.corr[0](0, 1);
      break;
    }
    case 4: {
      const auto t0 = (1.0/(eps));
      const auto t1 = (X*X*X);
      const auto t2 = X*t0;
      const auto t3 = s*t0;
      const auto t4 = (X*X*X*X*X);
      const auto t5 = 3.0*t0;
      const auto t6 = (X*X);
      const auto t7 = 3.0*t6;
      const auto t8 = X*gamma;
      const auto t9 = Y*t0;
      const auto t10 = Y - alpha + t7*t9 - t8 - t9;
      const auto t11 = (1.0/(eps*eps));
      const auto t12 = Y*t11;
      const auto t13 = s*t11;
      const auto t14 = gamma*t9;
      const auto t15 = gamma*t3;
      const auto t16 = X*t11;
      const auto t17 = 6.0*t16;
      const auto t18 = (X*X*X*X);
      const auto t19 = 21.0*t18;
      const auto t20 = -Y + alpha + t8;
      const auto t21 = gamma*t0;
      const auto t22 = -t0 + t5*t6;
      const auto t23 = (sigma*sigma);
      const auto t24 = t11*t23;
      const auto t25 = 66.0*t16;
      const auto t26 = t0*t6;
      const auto t27 = t11*t18;
      const auto t28 = ((3.0/4.0))*t16;
      o.gen[0][0] = T(t0*(X - Y - s - t1));
      o.gen[1][0] = T(t0*(-4.0*t0*t1 + t10 + t2 + t3*t7 - t3 + t4*t5));
      o.gen[2][0] = T(t0*(-15.0*(X*X*X*X*X*X*X)*t11 + X*t11 - (Y*Y)*t17 - 12.0*Y*s*t16 + 18.0*Y*t11*t6 + 3.0*alpha*t0*t6 - alpha*t0 + 4.0*gamma*t0*t1 - 2.0*gamma*t2 - (s*s)*t17 + 18.0*s*t11*t6 - 13.0*t1*t11 - t10 + 27.0*t11*t4 - t12*t19 - t12 - t13*t19 - t13 + t14 + t15));
      o.gen[0][1] = T(t20);
      o.gen[1][1] = T(X*gamma*t0 - t1*t21 - t14 - t15 - t20);
      o.lead(0, 0) = T(-sigma*t0);
      o.lead(1, 0) = T(sigma);
      o.corr[0](0, 0) = T(((1.0/4.0))*t24*(-t22 - 1.0));
      o.corr[0](0, 1) = T(((1.0/6.0))*t0*t23*(t22 + 3.0));
      o.corr[0](1, 1) = T(-t23);
      o.corr[1](0, 0) = T(((1.0/60.0))*t24*(Y*t25 + s*t25 - 10.0*t0 - 108.0*t11*t6 + 7.0*t11 - 4.0*t21 + 30.0*t26 + 129.0*t27 + 7.0));
      o.corr[1](0, 1) = T(t0*t23*(-Y*t28 + ((1.0/6.0))*gamma*t0 - s*t28 + ((1.0/6.0))*t0 + t11*t6 - (1.0/24.0)*t11 - (1.0/2.0)*t26 - (9.0/8.0)*t27 + (-7.0/24.0)));
      o.corr[1](1, 1) = T(((1.0/3.0))*t23*(2.0 - t21));
      o.corr[0](1, 0) = o.corr[0](0, 1);
      o.corr[1](1, 0) = o.corr[1](0, 1);
      break;
    }
    default:
      break;
  }
}

}  // namespace hypo::generated::fhn
