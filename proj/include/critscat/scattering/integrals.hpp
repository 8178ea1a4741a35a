#pragma once

#include <cmath>

#include "critscat/errors.hpp"

namespace critscat {

/// I_theta(a) = int_a^inf t^-1 (log t)^{-2+theta} dt = (log a)^{theta-1} / (1 - theta).
inline double i_theta(double theta, double a = 2.0) {
  require(std::isfinite(theta), ErrorCode::InvalidArgument, "theta must be finite");
  require(theta < 1.0, ErrorCode::DivergentIntegral, "I_theta diverges for theta >= 1");
  require(a >= 2.0, ErrorCode::InvalidArgument, "I_theta needs a >= 2");
  return std::pow(std::log(a), theta - 1.0) / (1.0 - theta);
}

/// int_a^b tau^{-2+kappa} d tau, closed form (log at kappa = 1).
inline double tau_power_integral(double kappa, double a, double b) {
  require(a > 0.0 && b >= a, ErrorCode::InvalidArgument, "tau_power_integral needs 0 < a <= b");
  if (a == b) return 0.0;
  if (kappa == 1.0) return std::log(b / a);
  const double e = kappa - 1.0;
  return (std::pow(b, e) - std::pow(a, e)) / e;
}

}  // namespace critscat
