#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

#include "hypo/types.hpp"

namespace hypo {

// Relative floor on Cholesky pivots: a matrix counts as positive definite
// only if every squared pivot exceeds kPdFloor * trace.
inline constexpr double kPdFloor = 1e-12;

template <class T, int N>
struct SymInverse {
  Mat<T, N, N> inv;
  T logdet{};
  bool ok = false;
};

template <int N>
double min_eigenvalue(const Mat<double, N, N>& s) {
  Eigen::SelfAdjointEigenSolver<Mat<double, N, N>> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline double min_eigenvalue(const MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

template <int N>
SymInverse<double, N> sym_inverse(const Mat<double, N, N>& s) {
  SymInverse<double, N> out;
  const double tr = s.trace();
  if (!std::isfinite(tr) || tr <= 0.0) return out;
  const double floor = kPdFloor * tr;
  double l[N][N] = {};
  double det = 1.0;
  for (int j = 0; j < N; ++j) {
    double d = s(j, j);
    for (int k = 0; k < j; ++k) d -= l[j][k] * l[j][k];
    if (!(d > floor)) return out;
    det *= d;
    const double ljj = std::sqrt(d);
    l[j][j] = ljj;
    for (int i = j + 1; i < N; ++i) {
      double v = s(i, j);
      for (int k = 0; k < j; ++k) v -= l[i][k] * l[j][k];
      l[i][j] = v / ljj;
    }
  }
  // inverse of the lower factor, then S^-1 = L^-T L^-1
  double w[N][N] = {};
  for (int j = 0; j < N; ++j) {
    w[j][j] = 1.0 / l[j][j];
    for (int i = j + 1; i < N; ++i) {
      double v = 0.0;
      for (int k = j; k < i; ++k) v -= l[i][k] * w[k][j];
      w[i][j] = v / l[i][i];
    }
  }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j <= i; ++j) {
      double v = 0.0;
      for (int k = i; k < N; ++k) v += w[k][i] * w[k][j];
      out.inv(i, j) = v;
      out.inv(j, i) = v;
    }
  out.logdet = std::log(det);
  out.ok = true;
  return out;
}

// Forward-mode rule: d(S^-1) = -S^-1 dS S^-1 and d log det S = tr(S^-1 dS).
template <int N, int P>
SymInverse<Jet<P>, N> sym_inverse(const Mat<Jet<P>, N, N>& s) {
  SymInverse<Jet<P>, N> out;
  Mat<double, N, N> v;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) v(i, j) = s(i, j).a;
  const auto base = sym_inverse<N>(v);
  if (!base.ok) return out;
  out.ok = true;
  out.logdet.a = base.logdet;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) out.inv(i, j).a = base.inv(i, j);
  Mat<double, N, N> ds;
  for (int k = 0; k < P; ++k) {
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) ds(i, j) = s(i, j).v[k];
    const Mat<double, N, N> dinv = -base.inv * ds * base.inv;
    out.logdet.v[k] = base.inv.cwiseProduct(ds).sum();
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) out.inv(i, j).v[k] = dinv(i, j);
  }
  return out;
}

// Dynamic-size variant used by oracles and the precision computation.
struct DynInverse {
  MatrixXd inv;
  double logdet = 0.0;
  bool ok = false;
};

inline DynInverse sym_inverse(const MatrixXd& s) {
  DynInverse out;
  const double tr = s.trace();
  if (!std::isfinite(tr) || tr <= 0.0) return out;
  Eigen::LLT<MatrixXd> llt(s);
  if (llt.info() != Eigen::Success) return out;
  const MatrixXd& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double piv = l(i, i) * l(i, i);
    if (!(piv > kPdFloor * tr)) return out;
    out.logdet += std::log(piv);
  }
  out.inv = llt.solve(MatrixXd::Identity(s.rows(), s.cols()));
  out.inv = 0.5 * (out.inv + out.inv.transpose()).eval();
  out.ok = true;
  return out;
}

}  // namespace hypo
