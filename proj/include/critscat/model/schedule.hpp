#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "critscat/errors.hpp"

namespace critscat {

/// Shape of k(t) on the interior |t| < r0. Both choices are continuous at r0.
enum class InteriorProfile {
  constant,   ///< k = sigma / r0^2
  quadratic,  ///< k = sigma * t^2 / r0^4
};

inline std::string_view to_string(InteriorProfile p) {
  return p == InteriorProfile::constant ? "constant" : "quadratic";
}

inline InteriorProfile parse_interior(std::string_view name) {
  if (name == "constant") return InteriorProfile::constant;
  if (name == "quadratic") return InteriorProfile::quadratic;
  throw Error(ErrorCode::ConfigError, "unknown interior profile '" + std::string(name) + "'");
}

/**
 * Spring coefficient k(t) of the time-decaying oscillator
 * H0(t) = p^2/(2m) + k(t) x^2 / 2.
 *
 * Outside the matching radius k(t) = sigma / t^2; the coupling is critical
 * when sigma = m/4, where the indicial roots of the Euler equation collide.
 */
class CoefficientSchedule {
 public:
  CoefficientSchedule() = default;

  CoefficientSchedule(double sigma, double r0 = 1.0, double mass = 1.0,
                      InteriorProfile interior = InteriorProfile::constant)
      : sigma_(sigma), r0_(r0), mass_(mass), interior_(interior) {
    require(std::isfinite(mass) && mass > 0.0, ErrorCode::InvalidArgument,
            "mass must be positive");
    require(std::isfinite(sigma) && sigma >= 0.0 && sigma <= mass / 4.0,
            ErrorCode::InvalidArgument, "sigma must lie in [0, m/4]");
    require(std::isfinite(r0) && r0 >= 1.0, ErrorCode::InvalidArgument, "r0 must be >= 1");
  }

  double sigma() const noexcept { return sigma_; }
  double r0() const noexcept { return r0_; }
  double mass() const noexcept { return mass_; }
  InteriorProfile interior() const noexcept { return interior_; }

  bool critical() const noexcept { return sigma_ == mass_ / 4.0; }
  bool free() const noexcept { return sigma_ == 0.0; }

  /// Smaller indicial root; both exterior solutions are t^{1-lambda}, t^lambda.
  double lambda() const noexcept { return 0.5 * (1.0 - std::sqrt(1.0 - 4.0 * sigma_ / mass_)); }

  /// sup_t |k(t)|
  double bound() const noexcept { return sigma_ / (r0_ * r0_); }

  double operator()(double t) const noexcept {
    const double a = std::abs(t);
    if (a >= r0_) return sigma_ / (a * a);
    switch (interior_) {
      case InteriorProfile::constant: return sigma_ / (r0_ * r0_);
      case InteriorProfile::quadratic: return sigma_ * a * a / (r0_ * r0_ * r0_ * r0_);
    }
    return 0.0;
  }

 private:
  double sigma_ = 0.25;
  double r0_ = 1.0;
  double mass_ = 1.0;
  InteriorProfile interior_ = InteriorProfile::constant;
};

inline double evaluate_k(const CoefficientSchedule& schedule, double t) { return schedule(t); }

}  // namespace critscat
