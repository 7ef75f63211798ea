#pragma once

#include <Eigen/Core>
#include <ceres/jet.h>

#include <stdexcept>
#include <string>

namespace hypo {

enum class ModelClass { kHypoI, kHypoII };

// State blocks. Class I uses kS and kR; class II uses kS1, kS2 and kR.
enum class StateBlock { kS, kS1, kS2, kR };

enum class ParamBlock { kBetaS, kBetaS1, kBetaS2, kBetaR, kSigma };

template <class T, int R>
using Vec = Eigen::Matrix<T, R, 1>;
template <class T, int R, int C>
using Mat = Eigen::Matrix<T, R, C>;
template <int P>
using Jet = ceres::Jet<double, P>;

using VectorXd = Eigen::VectorXd;
using MatrixXd = Eigen::MatrixXd;
using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline double value_of(double v) { return v; }
template <int P>
double value_of(const Jet<P>& v) {
  return v.a;
}

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class UnsupportedOrder : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(const std::string& what, double min_eig) : Error(what), min_eigenvalue(min_eig) {}
  double min_eigenvalue;
};

class SimulationError : public Error {
 public:
  using Error::Error;
};

const char* to_string(ModelClass c);
const char* to_string(StateBlock b);
const char* to_string(ParamBlock b);

}  // namespace hypo
