#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hypo/moments.hpp"
#include "hypo/param.hpp"

namespace hypo {

struct ObservationDesign {
  double delta = 0.01;
  double t_horizon = 1.0;
  double fine_delta = 1e-4;
  std::uint64_t seed = 0;
  double burn_in = 10.0;
  std::vector<double> initial_state;  // empty: origin

  [[nodiscard]] long n() const { return std::lround(t_horizon / delta); }
  // delta / fine_delta as an integer; throws if not integral to 1e-12 relative.
  [[nodiscard]] long stride() const;
  void validate() const;
};

struct ObservationSet {
  RowMatrixXd states;  // (n + 1) x N
  ObservationDesign design;
  std::string model_id;
  std::optional<ParamVector> true_theta;

  [[nodiscard]] long n() const { return static_cast<long>(states.rows()) - 1; }
  [[nodiscard]] double delta() const { return design.delta; }
};

// 64-bit stream for (seed, stream index); streams are independent of scheduling.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0);

// One locally Gaussian step: order-2 mean expansion plus Gaussian noise with covariance
// D_h Sigma(x) D_h, D_h = diag(h^{3/2 or 5/2 or 1/2}).
template <HypoModel M>
Vec<double, M::kN> simulate_lg_step(const M& m, const Vec<double, M::kN>& x, const Vec<double, M::kP>& th, double h,
                                    const Vec<double, M::kN>& noise) {
  if (!(h > 0.0) || h > 0.01) throw SimulationError("simulate_lg_step: step " + std::to_string(h) + " outside (0, 0.01]");
  const ContrastConfig cfg{2};
  Vec<double, M::kN> r = mean_expansion(m, cfg, h, x, th);
  const Mat<double, M::kN, M::kN> s = leading_sigma(m, x, th);
  Eigen::LLT<Mat<double, M::kN, M::kN>> llt(s);
  if (llt.info() != Eigen::Success) {
    std::string msg = "simulate_lg_step: covariance factorization failed at x=(";
    for (int i = 0; i < M::kN; ++i) msg += (i ? "," : "") + std::to_string(x[i]);
    msg += ") theta=(";
    for (int i = 0; i < M::kP; ++i) msg += (i ? "," : "") + std::to_string(th[i]);
    throw NotPositiveDefinite(msg + ")", min_eigenvalue<M::kN>(s));
  }
  const Vec<double, M::kN> z = llt.matrixL() * noise;
  const auto sc = detail::residual_scale<M>(h);
  for (int i = 0; i < M::kN; ++i) r[i] += z[i] / sc[i];
  return r;
}

namespace detail {

template <HypoModel M, class Sink>
void run_fine_path(const M& m, const Vec<double, M::kP>& th, const ObservationDesign& design, Sink&& sink) {
  design.validate();
  Vec<double, M::kN> x = Vec<double, M::kN>::Zero();
  if (!design.initial_state.empty()) {
    if (static_cast<int>(design.initial_state.size()) != M::kN)
      throw DimensionError("initial_state has length " + std::to_string(design.initial_state.size()));
    for (int i = 0; i < M::kN; ++i) x[i] = design.initial_state[i];
  }
  auto rng = make_rng(design.seed);
  std::normal_distribution<double> nd;
  const double h = design.fine_delta;
  const long burn = std::lround(design.burn_in / h);
  const long steps = design.n() * design.stride();
  Vec<double, M::kN> z;
  for (long k = -burn; k <= steps; ++k) {
    if (k >= 0) sink(k, x);
    if (k == steps) break;
    for (int i = 0; i < M::kN; ++i) z[i] = nd(rng);
    x = simulate_lg_step(m, x, th, h, z);
    if (!(x.cwiseAbs().maxCoeff() <= 1e8))
      throw SimulationError("simulation exploded at fine step " + std::to_string(k + 1) + " (|state| > 1e8)");
  }
}

}  // namespace detail

// Full path on the fine grid, t_horizon / fine_delta + 1 rows, after burn-in.
template <HypoModel M>
RowMatrixXd simulate_fine_path(const M& m, const Vec<double, M::kP>& th, const ObservationDesign& design) {
  const long rows = design.n() * design.stride() + 1;
  RowMatrixXd out(rows, M::kN);
  detail::run_fine_path(m, th, design, [&](long k, const Vec<double, M::kN>& x) { out.row(k) = x.transpose(); });
  return out;
}

ObservationSet subsample(const RowMatrixXd& fine, const ObservationDesign& design);

// Same as subsample(simulate_fine_path(...)) without storing the fine grid.
template <HypoModel M>
ObservationSet simulate_observations(const M& m, const Vec<double, M::kP>& th, const ObservationDesign& design) {
  ObservationSet obs;
  obs.design = design;
  obs.model_id = m.id();
  const long stride = design.stride();
  obs.states.resize(design.n() + 1, M::kN);
  detail::run_fine_path(m, th, design, [&](long k, const Vec<double, M::kN>& x) {
    if (k % stride == 0) obs.states.row(k / stride) = x.transpose();
  });
  const auto info = M::params();
  obs.true_theta = make_param_vector(info, std::vector<double>(th.data(), th.data() + M::kP));
  return obs;
}

void write_observations_csv(const ObservationSet& obs, const std::string& path);
void write_observations_sidecar(const ObservationSet& obs, const std::string& path);
// Reads CSV; the sidecar (path with .json) supplies design and model id when present.
ObservationSet read_observations(const std::string& csv_path);

}  // namespace hypo
