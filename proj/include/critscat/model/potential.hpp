#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <numbers>
#include <string>
#include <string_view>

#include "critscat/errors.hpp"

namespace critscat {

enum class RangeClass { short_range, long_range };

inline std::string_view to_string(RangeClass c) {
  return c == RangeClass::short_range ? "short" : "long";
}

/// Optional bounded factor m(t) >= 1 multiplying the potential.
struct TimeModulation {
  enum class Kind { constant, cosine } kind = Kind::constant;
  double depth = 0.0;      ///< m(t) ranges over [1, 1 + depth]
  double frequency = 1.0;  ///< in log t

  double operator()(double t) const noexcept {
    if (kind == Kind::constant) return 1.0;
    const double tau = std::log(std::max(std::abs(t), 1.0));
    return 1.0 + 0.5 * depth * (1.0 + std::cos(frequency * tau));
  }
  double sup() const noexcept { return kind == Kind::constant ? 1.0 : 1.0 + depth; }
};

/// Envelope (1+|x|)^-2 (log(1+|x|))^kappa that bounds the potential for |x| >> 1.
inline double envelope(double kappa, double x) {
  const double a = std::abs(x);
  return std::pow(1.0 + a, -2.0) * std::pow(std::log1p(a), kappa);
}

/// Smooth global profile (1+x^2)^-1 (log(e^2+x^2)/2)^kappa, equal to 1 at the origin
/// and asymptotic to the envelope.
inline double profile(double kappa, double x) {
  const double x2 = x * x;
  const double base = 1.0 / (1.0 + x2);
  if (kappa == 0.0) return base;
  return base * std::pow(0.5 * std::log(std::numbers::e * std::numbers::e + x2), kappa);
}

/// Position beyond which the sandwich bound is asserted.
inline constexpr double kFarField = 1.0e3;

/// sup over |x| >= x_far of profile/envelope. The log factor is <= 1 there and
/// (1+|x|)^2/(1+x^2) is decreasing, so the supremum sits at x_far.
inline double far_ratio_bound(double x_far = kFarField) {
  return (1.0 + x_far) * (1.0 + x_far) / (1.0 + x_far * x_far);
}

/**
 * Log-power potential family V(t,x) = sign * C * m(t) * profile(x).
 *
 * kind == none models V = 0 (the free comparison dynamics).
 */
struct PotentialSpec {
  enum class Kind { log_power, none };

  Kind kind = Kind::log_power;
  double kappa = 0.0;
  double amplitude_low = 0.1;
  double amplitude_high = 0.2;
  int sign = +1;
  TimeModulation modulation{};

  static PotentialSpec none() {
    PotentialSpec p;
    p.kind = Kind::none;
    p.amplitude_low = 0.0;
    p.amplitude_high = 0.0;
    return p;
  }

  static PotentialSpec log_power(double kappa, double amplitude, int sign = +1) {
    PotentialSpec p;
    p.kappa = kappa;
    p.amplitude_low = amplitude;
    p.amplitude_high = 2.0 * amplitude;
    p.sign = sign;
    p.validate();
    return p;
  }

  bool is_zero() const noexcept { return kind == Kind::none; }

  RangeClass range_class() const noexcept {
    return kappa < 1.0 ? RangeClass::short_range : RangeClass::long_range;
  }

  void validate() const {
    if (kind == Kind::none) return;
    require(std::isfinite(kappa) && kappa >= 0.0, ErrorCode::InvalidArgument, "kappa must be >= 0");
    require(sign == 1 || sign == -1, ErrorCode::InvalidArgument, "sign must be +1 or -1");
    require(std::isfinite(amplitude_low) && amplitude_low > 0.0, ErrorCode::InvalidArgument,
            "amplitude_low must be positive");
    require(std::isfinite(amplitude_high) && amplitude_high >= amplitude_low,
            ErrorCode::InvalidArgument, "amplitude_high must be >= amplitude_low");
    require(modulation.depth >= 0.0 && std::isfinite(modulation.frequency),
            ErrorCode::InvalidArgument, "modulation depth must be >= 0");
    require(amplitude_high >= amplitude_low * modulation.sup() * far_ratio_bound(),
            ErrorCode::InvalidArgument,
            "amplitude_high too small: realized potential would leave the sandwich bound");
  }

  /// V(t, x)
  double operator()(double t, double x) const noexcept {
    if (kind == Kind::none) return 0.0;
    return sign * amplitude_low * modulation(t) * profile(kappa, x);
  }

  /// sup_{t,x} |V|; the profile peaks at the origin for kappa <= 2 and is
  /// bounded by max(1, (kappa/2)^kappa) in general.
  double sup() const noexcept {
    if (kind == Kind::none) return 0.0;
    const double p = kappa <= 2.0 ? 1.0 : std::pow(kappa / 2.0, kappa);
    return amplitude_low * modulation.sup() * p;
  }

  /**
   * Reduced-frame potential W(tau, x) = e^tau V(e^tau, e^{tau/2} x), written so that
   * large tau does not overflow: e^tau/(1+e^tau x^2) = 1/(e^-tau + x^2).
   */
  double reduced(double tau, double x) const noexcept {
    if (kind == Kind::none) return 0.0;
    const double x2 = x * x;
    const double e = std::exp(-tau);
    double w = 1.0 / (e + x2);
    if (kappa != 0.0) w *= std::pow(0.5 * (tau + std::log(std::exp(2.0 - tau) + x2)), kappa);
    return sign * amplitude_low * modulation(std::exp(tau)) * w;
  }

  /**
   * reduced(tau, xs[j]) for a whole grid, with the tau-dependent factors hoisted.
   * core2 > 0 caps the origin spike: e^-tau is replaced by max(e^-tau, core2), which changes
   * W only on |x| <~ sqrt(core2).
   */
  void reduced_row(double tau, std::span<const double> xs, std::span<double> out,
                   double core2 = 0.0) const {
    if (kind == Kind::none) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    const double e = std::max(std::exp(-tau), core2);
    const double e2 = std::exp(2.0 - tau);
    const double a = sign * amplitude_low * modulation(std::exp(tau));
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const double x2 = xs[j] * xs[j];
      double w = a / (e + x2);
      if (kappa == 1.0)
        w *= 0.5 * (tau + std::log(e2 + x2));
      else if (kappa != 0.0)
        w *= std::pow(0.5 * (tau + std::log(e2 + x2)), kappa);
      out[j] = w;
    }
  }
};

inline double evaluate_potential(const PotentialSpec& spec, double t, double x) { return spec(t, x); }

}  // namespace critscat
