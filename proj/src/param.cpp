#include "hypo/param.hpp"

#include <algorithm>

namespace hypo {

const char* to_string(ModelClass c) { return c == ModelClass::kHypoI ? "HypoI" : "HypoII"; }

const char* to_string(StateBlock b) {
  switch (b) {
    case StateBlock::kS: return "S";
    case StateBlock::kS1: return "S1";
    case StateBlock::kS2: return "S2";
    case StateBlock::kR: return "R";
  }
  return "?";
}

const char* to_string(ParamBlock b) {
  switch (b) {
    case ParamBlock::kBetaS: return "beta_S";
    case ParamBlock::kBetaS1: return "beta_S1";
    case ParamBlock::kBetaS2: return "beta_S2";
    case ParamBlock::kBetaR: return "beta_R";
    case ParamBlock::kSigma: return "sigma";
  }
  return "?";
}

bool Box::contains(std::span<const double> v) const {
  if (v.size() != lo.size()) return false;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!(v[i] >= lo[i] && v[i] <= hi[i])) return false;
  return true;
}

std::vector<double> Box::project(std::span<const double> v) const {
  std::vector<double> out(v.begin(), v.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(out[i], lo[i], hi[i]);
  return out;
}

std::vector<double> Box::midpoint() const {
  std::vector<double> out(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) out[i] = 0.5 * (lo[i] + hi[i]);
  return out;
}

std::vector<double> ParamVector::block(ParamBlock b) const {
  std::vector<double> out;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (layout[i] == b) out.push_back(values[i]);
  return out;
}

std::vector<int> ParamVector::block_indices(ParamBlock b) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < layout.size(); ++i)
    if (layout[i] == b) out.push_back(static_cast<int>(i));
  return out;
}

VectorXd ParamVector::as_eigen() const {
  return Eigen::Map<const VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

Box default_box(std::span<const ParamInfo> info) {
  Box b;
  for (const auto& p : info) {
    b.lo.push_back(p.lo);
    b.hi.push_back(p.hi);
  }
  return b;
}

ParamVector make_param_vector(std::span<const ParamInfo> info, std::span<const double> values) {
  if (values.size() != info.size())
    throw DimensionError("parameter vector has " + std::to_string(values.size()) + " entries, expected " +
                         std::to_string(info.size()));
  ParamVector pv;
  pv.values.assign(values.begin(), values.end());
  for (const auto& p : info) {
    pv.layout.push_back(p.block);
    pv.names.emplace_back(p.name);
  }
  pv.box = default_box(info);
  return pv;
}

}  // namespace hypo
