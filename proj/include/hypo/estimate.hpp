#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <vector>

#include "hypo/contrast.hpp"
#include "hypo/param.hpp"

namespace hypo {

struct AdamConfig {
  double step = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int iters = 8000;
  bool record_trace = false;
  // Return the iterate with the lowest objective instead of the last one.
  bool keep_best = false;
  // Stop once the lowest objective seen has not dropped by more than early_stop_tol * (1 + |value|)
  // during the last early_stop_window iterations. 0 disables.
  double early_stop_tol = 0.0;
  int early_stop_window = 500;

  void validate() const;
};

struct NelderMeadConfig {
  double tol = 1e-8;  // simplex diameter, relative to box width
  int max_evals = 4000;
  bool record_trace = false;
};

struct TraceEntry {
  int iter = 0;
  double value = 0.0;
  std::vector<double> theta;
};

struct EstimationResult {
  std::vector<double> theta_hat;
  double value = 0.0;
  std::vector<TraceEntry> trace;
  bool converged = false;
  double runtime = 0.0;  // seconds
  int iterations = 0;
  int evaluations = 0;
  int retreats = 0;  // Adam steps undone because the objective hit the sentinel
};

struct Evaluation {
  double value = 0.0;
  std::vector<double> grad;
  bool ok = true;
};

using GradObjective = std::function<Evaluation(const std::vector<double>&)>;
using ValueObjective = std::function<double(const std::vector<double>&)>;

// Minimizes with bias-corrected Adam; coordinates are clipped to the box after every update.
// Throws if the objective fails at theta0.
EstimationResult adam_minimize(const GradObjective& f, const std::vector<double>& theta0, const AdamConfig& cfg,
                               const Box& box);

// Maximizes with Nelder-Mead (1, 2, 0.5, 0.5); outside the box the objective is replaced by -1e12.
EstimationResult nelder_mead_maximize(const ValueObjective& f, const std::vector<double>& theta0, const Box& box,
                                      const NelderMeadConfig& cfg = {});

template <HypoModel M>
EstimationResult estimate_contrast(const M& m, const ContrastConfig& cfg, const ObservationSet& obs,
                                   const std::vector<double>& theta0, const AdamConfig& adam, const Box& box,
                                   int workers = 1) {
  const ContrastOptions opt{workers, false};
  auto f = [&](const std::vector<double>& th) {
    const auto g = contrast_gradient(m, cfg, obs, Eigen::Map<const Vec<double, M::kP>>(th.data()), opt);
    Evaluation e;
    e.ok = g.ok;
    e.value = g.value;
    e.grad.assign(g.grad.data(), g.grad.data() + M::kP);
    return e;
  };
  if (static_cast<int>(theta0.size()) != M::kP)
    throw DimensionError("theta0 has " + std::to_string(theta0.size()) + " entries, model " + m.id() + " has " +
                         std::to_string(M::kP));
  return adam_minimize(f, theta0, adam, box);
}

struct PrecisionMatrix {
  MatrixXd gamma;            // block diagonal
  VectorXd rate;             // per coordinate: sqrt(n/D^3), sqrt(n/D), sqrt(n D) or sqrt(n)
  std::vector<ParamBlock> layout;
  long samples = 0;

  // Asymptotic standard errors sqrt(diag(Gamma^-1)) / rate.
  [[nodiscard]] VectorXd standard_errors() const;
};

namespace detail {

template <int P>
std::vector<int> indices_of(const std::array<ParamInfo, P>& info, ParamBlock b) {
  std::vector<int> out;
  for (int i = 0; i < P; ++i)
    if (info[i].block == b) out.push_back(i);
  return out;
}

inline MatrixXd checked_inverse(const MatrixXd& a, const char* what, long row) {
  const auto inv = sym_inverse(a);
  if (!inv.ok)
    throw NotPositiveDefinite(std::string(what) + " singular at sample row " + std::to_string(row),
                              min_eigenvalue(a));
  return inv.inv;
}

}  // namespace detail

// Gamma(theta) with every integral against the invariant law replaced by the average over the sample
// states (all rows except the last).
template <HypoModel M>
PrecisionMatrix asymptotic_precision(const M& m, const ContrastConfig& cfg, const ObservationSet& sample,
                                     const Vec<double, M::kP>& th) {
  check_config<M>(cfg);
  constexpr int N = M::kN, P = M::kP, D = M::kD;
  using J = Jet<P>;
  const auto info = M::params();
  Vec<J, P> tj;
  for (int k = 0; k < P; ++k) tj[k] = J(th[k], k);

  PrecisionMatrix out;
  out.gamma = MatrixXd::Zero(P, P);
  out.rate.resize(P);
  for (const auto& pi : info) out.layout.push_back(pi.block);
  const long n = sample.n();
  const double dt = sample.design.delta;
  if (n < 1) throw Error("asymptotic_precision: sample needs at least two rows");

  // drift block for a parameter block, with its weight and a-matrix source
  struct DriftTerm {
    ParamBlock pb;
    StateBlock sb;
    double weight;
  };
  std::vector<DriftTerm> terms;
  if constexpr (M::kClass == ModelClass::kHypoI) {
    terms = {{ParamBlock::kBetaS, StateBlock::kS, 12.0}, {ParamBlock::kBetaR, StateBlock::kR, 1.0}};
  } else {
    terms = {{ParamBlock::kBetaS1, StateBlock::kS1, 720.0},
             {ParamBlock::kBetaS2, StateBlock::kS2, 12.0},
             {ParamBlock::kBetaR, StateBlock::kR, 1.0}};
  }
  const auto sig = detail::indices_of<P>(info, ParamBlock::kSigma);

  for (long row = 0; row < n; ++row) {
    const Vec<double, N> x = sample.states.row(row).transpose();
    const Vec<J, N> mu = m.drift(x, tj);
    const Mat<double, N, D> a = m.diffusion(x, th);
    const Mat<double, N, D> l1 = m.directional_terms(x, th);
    Mat<double, N, D> l2 = Mat<double, N, D>::Zero();
    if constexpr (M::kClass == ModelClass::kHypoII) l2 = m.directional_generator_terms(x, th);
    for (const auto& dt_ : terms) {
      const auto idx = detail::indices_of<P>(info, dt_.pb);
      if (idx.empty()) continue;
      const auto& b = find_block<M>(dt_.sb);
      MatrixXd fields;
      if (dt_.sb == StateBlock::kR)
        fields = a.block(b.offset, 0, b.size, D);
      else if (dt_.sb == StateBlock::kS1)
        fields = l2.block(b.offset, 0, b.size, D);
      else
        fields = l1.block(b.offset, 0, b.size, D);
      const MatrixXd ainv = detail::checked_inverse(fields * fields.transpose(), to_string(dt_.sb), row);
      MatrixXd dmu(b.size, idx.size());
      for (int r = 0; r < b.size; ++r)
        for (std::size_t c = 0; c < idx.size(); ++c) dmu(r, c) = mu[b.offset + r].v[idx[c]];
      const MatrixXd g = dt_.weight * dmu.transpose() * ainv * dmu;
      for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < idx.size(); ++j) out.gamma(idx[i], idx[j]) += g(i, j);
    }
    if (!sig.empty()) {
      const Mat<J, N, N> s = leading_sigma(m, x, tj);
      Mat<double, N, N> s0;
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) s0(i, j) = s(i, j).a;
      const auto inv = sym_inverse<N>(s0);
      if (!inv.ok) throw NotPositiveDefinite("Sigma singular at sample row " + std::to_string(row), min_eigenvalue<N>(s0));
      std::vector<Mat<double, N, N>> dl(sig.size());
      for (std::size_t i = 0; i < sig.size(); ++i) {
        Mat<double, N, N> ds;
        for (int r = 0; r < N; ++r)
          for (int c = 0; c < N; ++c) ds(r, c) = s(r, c).v[sig[i]];
        dl[i] = ds * inv.inv;
      }
      for (std::size_t i = 0; i < sig.size(); ++i)
        for (std::size_t j = 0; j < sig.size(); ++j) out.gamma(sig[i], sig[j]) += 0.5 * (dl[i] * dl[j]).trace();
    }
  }
  out.gamma /= static_cast<double>(n);
  out.gamma = (0.5 * (out.gamma + out.gamma.transpose())).eval();
  out.samples = n;
  const double nn = static_cast<double>(n);
  for (int k = 0; k < P; ++k) {
    switch (info[k].block) {
      case ParamBlock::kBetaS1: out.rate[k] = std::sqrt(nn / (dt * dt * dt)); break;
      case ParamBlock::kBetaS:
      case ParamBlock::kBetaS2: out.rate[k] = std::sqrt(nn / dt); break;
      case ParamBlock::kBetaR: out.rate[k] = std::sqrt(nn * dt); break;
      case ParamBlock::kSigma: out.rate[k] = std::sqrt(nn); break;
    }
  }
  return out;
}

}  // namespace hypo
