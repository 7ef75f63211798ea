#pragma once

#include <span>
#include <string>
#include <vector>

#include "hypo/types.hpp"

namespace hypo {

struct ParamInfo {
  const char* name;
  ParamBlock block;
  double lo;
  double hi;
};

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  [[nodiscard]] std::size_t size() const { return lo.size(); }
  [[nodiscard]] bool contains(std::span<const double> v) const;
  [[nodiscard]] std::vector<double> project(std::span<const double> v) const;
  [[nodiscard]] std::vector<double> midpoint() const;
};

// theta = (beta_S1, beta_S2, beta_R, sigma), or (beta_S, beta_R, sigma) for class I.
struct ParamVector {
  std::vector<double> values;
  std::vector<ParamBlock> layout;
  std::vector<std::string> names;
  Box box;

  [[nodiscard]] std::size_t size() const { return values.size(); }
  [[nodiscard]] std::vector<double> block(ParamBlock b) const;
  [[nodiscard]] std::vector<int> block_indices(ParamBlock b) const;
  [[nodiscard]] VectorXd as_eigen() const;
};

ParamVector make_param_vector(std::span<const ParamInfo> info, std::span<const double> values);
Box default_box(std::span<const ParamInfo> info);

}  // namespace hypo
