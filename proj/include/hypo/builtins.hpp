#pragma once

#include <array>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hypo/generated/fhn_terms.hpp"
#include "hypo/generated/langevin_terms.hpp"
#include "hypo/generated/qgle_terms.hpp"
#include "hypo/model.hpp"

namespace hypo {

enum class PotentialKind { kQuadratic, kDoubleWell };

// U(q) = D q^2 / 2 or U(q) = (q^2 - D)^2 / 4.
struct Potential {
  PotentialKind kind = PotentialKind::kQuadratic;

  static constexpr int kDerivs = 12;

  // U', U'', ... at q
  template <class T>
  std::array<T, kDerivs> derivatives(double q, const T& d) const {
    std::array<T, kDerivs> u;
    u.fill(T(0.0));
    if (kind == PotentialKind::kQuadratic) {
      u[0] = d * q;
      u[1] = d;
    } else {
      u[0] = T(q * q * q) - d * q;
      u[1] = T(3.0 * q * q) - d;
      u[2] = T(6.0 * q);
      u[3] = T(6.0);
    }
    return u;
  }

  template <class T>
  T value(double q, const T& d) const {
    if (kind == PotentialKind::kQuadratic) return 0.5 * d * q * q;
    const T w = T(q * q) - d;
    return 0.25 * w * w;
  }
};

// dq = p dt, dp = (-U'(q) + gamma p) dt + sigma dW. theta = (gamma, sigma).
struct UnderdampedLangevin {
  static constexpr ModelClass kClass = ModelClass::kHypoI;
  static constexpr int kN = 2, kD = 1, kP = 2;
  static constexpr int kS1 = 1, kS2 = 0, kR = 1;
  static constexpr int kMaxP = 4;

  Potential potential{};
  double d = 1.0;  // potential constant, not estimated

  static std::array<ParamInfo, kP> params() {
    return {{{"gamma", ParamBlock::kBetaR, -3.0, -0.05}, {"sigma", ParamBlock::kSigma, 0.2, 3.0}}};
  }
  [[nodiscard]] std::string id() const {
    return potential.kind == PotentialKind::kQuadratic ? "langevin-quad" : "langevin-dw";
  }
  [[nodiscard]] std::vector<double> default_theta() const { return {-1.0, 1.0}; }

  template <class T>
  Vec<T, kN> drift(const Vec<double, kN>& x, const Vec<T, kP>& th) const {
    const auto u = potential.derivatives(x[0], d);
    Vec<T, kN> r;
    r[0] = T(x[1]);
    r[1] = th[0] * x[1] - u[0];
    return r;
  }
  template <class T>
  Mat<T, kN, kD> diffusion(const Vec<double, kN>&, const Vec<T, kP>& th) const {
    Mat<T, kN, kD> a;
    a(0, 0) = T(0.0);
    a(1, 0) = th[1];
    return a;
  }
  template <class T>
  Vec<T, kN> generator_term(int k, const Vec<double, kN>& x, const Vec<T, kP>& th) const {
    const auto u = potential.derivatives(x[0], d);
    return generated::langevin::generator_term<T>(k, x, th, u.data());
  }
  template <class T>
  Mat<T, kN, kD> directional_terms(const Vec<double, kN>& x, const Vec<T, kP>& th) const {
    const auto u = potential.derivatives(x[0], d);
    return generated::langevin::directional_term<T>(x, th, u.data());
  }
  template <class T>
  Mat<T, kN, kD> directional_generator_terms(const Vec<double, kN>& x, const Vec<T, kP>& th) const {
    const auto u = potential.derivatives(x[0], d);
    return generated::langevin::directional_generator_term<T>(x, th, u.data());
  }
  template <class T>
  Mat<T, kN, kN> covariance_correction(int j, const Vec<double, kN>& x, const Vec<T, kP>& th) const {
    const auto u = potential.derivatives(x[0], d);
    return generated::langevin::covariance_correction<T>(j, x, th, u.data());
  }
  template <class T>
  void local_terms(int p, const Vec<double, kN>& x, const Vec<T, kP>& th, LocalTerms<T, kN, kD>& o) const {
    const auto u = potential.derivatives(x[0], d);
    generated::langevin::local_terms<T>(p, x, th, u.data(), o);
  }
};

// dq = p dt, dp = (-U'(q) + lambda s) dt, ds = (-lambda p - alpha s) dt + sigma dW.
// theta = (D, lambda, alpha, sigma); D is the potential constant.
struct QGle {
  static constexpr ModelClass kClass = ModelClass::kHypoII;
  static constexpr int kN = 3, kD = 1, kP = 4;
  static constexpr int kS1 = 1, kS2 = 1, kR = 1;
  static constexpr int kMaxP = 3;

  Potential potential{};

  static std::array<ParamInfo, kP> params() {
    return {{{"D", ParamBlock::kBetaS2, 0.5, 4.0},
             {"lambda", ParamBlock::kBetaS2, 0.2, 4.0},
             {"alpha", ParamBlock::kBetaR, 1.0, 8.0},
             {"sigma", ParamBlock::kSigma, 1.0, 8.0}}};
  }
  [[nodiscard]] std::string id() const {
    return potential.kind == PotentialKind::kQuadratic ? "qgle-quad" : "qgle-dw";
  }
  [[nodiscard]] std::vector<double> default_theta() const {
    return potential.kind == PotentialKind::kQuadratic ? std::vector<double>{2.0, 2.0, 4.0, 4.0}
                                                       : std::vector<double>{2.0, 1.0, 4.0, 4.0};
  }

  template <class T>
  Vec<T, kN> drift(const Vec<double, kN>& x, const Vec<T, kP>& th) const {
    const auto u = potential.derivatives(x[0], th[0]);
    Vec<T, kN> r;
    r[0] = T(x[1]);
    r[1] = th[1] * x[2] - u[0];
    r[2] = -th[1] * x[1] - th[2] * x[2];
    return r;
  }
  template <class T>
  Mat<T, kN, kD> diffusion(const Vec<double, kN>&, const Vec<T, kP>& th) const {
    Mat<T, kN, kD> a;
    a(0, 0) = T(0.0);
    a(1, 0) = T(0.0);
    a(2, 0) = th[3];
    return a;
  }
  template <class T>
  Vec<T, kN> generator_term(int k, const Vec<double, kN>& x, const Vec<T, kP>& th) const {
    const auto u = potential.derivatives(x[0], th[0]);
    return generated::qgle::generator_term<T>(k, x, th, u.data());
  }
  template <class T>
  Mat<T, kN, kD> directional_terms(const Vec<double, kN>& x, const Vec<T, kP>& th) const {
    const auto u = potential.derivatives(x[0], th[0]);
    return generated::qgle::directional_term<T>(x, th, u.data());
  }
  template <class T>
  Mat<T, kN, kD> directional_generator_terms(const Vec<double, kN>& x, const Vec<T, kP>& th) const {
    const auto u = potential.derivatives(x[0], th[0]);
    return generated::qgle::directional_generator_term<T>(x, th, u.data());
  }
  template <class T>
  Mat<T, kN, kN> covariance_correction(int j, const Vec<double, kN>& x, const Vec<T, kP>& th) const {
    const auto u = potential.derivatives(x[0], th[0]);
    return generated::qgle::covariance_correction<T>(j, x, th, u.data());
  }
  template <class T>
  void local_terms(int p, const Vec<double, kN>& x, const Vec<T, kP>& th, LocalTerms<T, kN, kD>& o) const {
    const auto u = potential.derivatives(x[0], th[0]);
    generated::qgle::local_terms<T>(p, x, th, u.data(), o);
  }
};

// dX = (X - X^3 - Y - s)/eps dt, dY = (gamma X - Y + alpha) dt + sigma dW.
// theta = (eps, gamma, alpha, sigma).
struct Fhn {
  static constexpr ModelClass kClass = ModelClass::kHypoI;
  static constexpr int kN = 2, kD = 1, kP = 4;
  static constexpr int kS1 = 1, kS2 = 0, kR = 1;
  static constexpr int kMaxP = 4;

  double s = 0.01;

  static std::array<ParamInfo, kP> params() {
    return {{{"eps", ParamBlock::kBetaS, 0.02, 0.5},
             {"gamma", ParamBlock::kBetaR, 0.1, 3.0},
             {"alpha", ParamBlock::kBetaR, -1.0, 1.5},
             {"sigma", ParamBlock::kSigma, 0.1, 1.5}}};
  }
  [[nodiscard]] std::string id() const { return "fhn"; }
  [[nodiscard]] std::vector<double> default_theta() const { return {0.1, 1.5, 0.3, 0.6}; }

  template <class T>
  Vec<T, kN> drift(const Vec<double, kN>& x, const Vec<T, kP>& th) const {
    Vec<T, kN> r;
    r[0] = (x[0] - x[0] * x[0] * x[0] - x[1] - s) / th[0];
    r[1] = th[1] * x[0] - x[1] + th[2];
    return r;
  }
  template <class T>
  Mat<T, kN, kD> diffusion(const Vec<double, kN>&, const Vec<T, kP>& th) const {
    Mat<T, kN, kD> a;
    a(0, 0) = T(0.0);
    a(1, 0) = th[3];
    return a;
  }
  template <class T>
  Vec<T, kN> generator_term(int k, const Vec<double, kN>& x, const Vec<T, kP>& th) const {
    return generated::fhn::generator_term<T, double>(k, x, th, nullptr, s);
  }
  template <class T>
  Mat<T, kN, kD> directional_terms(const Vec<double, kN>& x, const Vec<T, kP>& th) const {
    return generated::fhn::directional_term<T, double>(x, th, nullptr, s);
  }
  template <class T>
  Mat<T, kN, kD> directional_generator_terms(const Vec<double, kN>& x, const Vec<T, kP>& th) const {
    return generated::fhn::directional_generator_term<T, double>(x, th, nullptr, s);
  }
  template <class T>
  Mat<T, kN, kN> covariance_correction(int j, const Vec<double, kN>& x, const Vec<T, kP>& th) const {
    return generated::fhn::covariance_correction<T, double>(j, x, th, nullptr, s);
  }
  template <class T>
  void local_terms(int p, const Vec<double, kN>& x, const Vec<T, kP>& th, LocalTerms<T, kN, kD>& o) const {
    generated::fhn::local_terms<T, double>(p, x, th, nullptr, s, o);
  }
};

static_assert(HypoModel<UnderdampedLangevin>);
static_assert(HypoModel<QGle>);
static_assert(HypoModel<Fhn>);

using AnyModel = std::variant<UnderdampedLangevin, QGle, Fhn>;

const std::vector<std::string>& builtin_ids();
// Throws ConfigError listing the known ids.
AnyModel make_builtin(std::string_view id);

}  // namespace hypo
