#pragma once

#include <array>

#include <Eigen/Core>

namespace hypo {

// Per-step ingredients for one expansion order: generator iterates (only the
// orders each block needs are filled), the stacked leading fields and Sigma_j.
template <class T, int N, int D>
struct LocalTerms {
  std::array<Eigen::Matrix<T, N, 1>, 4> gen;
  Eigen::Matrix<T, N, D> lead;
  std::array<Eigen::Matrix<T, N, N>, 2> corr;
};

}  // namespace hypo
