#pragma once

#include <algorithm>
#include <cmath>

#include "critscat/errors.hpp"

namespace critscat {

namespace detail {

/// C-infinity step on [0, 1]: 0 at s <= 0, 1 at s >= 1, built from f(s) = exp(-1/s).
struct SmoothStep {
  double value;
  double d1;
  double d2;
};

inline SmoothStep smooth_step(double s) {
  if (s <= 0.0) return {0.0, 0.0, 0.0};
  if (s >= 1.0) return {1.0, 0.0, 0.0};
  const double r = 1.0 - s;
  // psi = a / (a + b), a = f(s), b = f(1 - s)
  const double expo = 1.0 / s - 1.0 / r;
  const double psi = expo > 700.0 ? 0.0 : 1.0 / (1.0 + std::exp(expo));
  const double q = 1.0 / (s * s) + 1.0 / (r * r);
  const double dq = -2.0 / (s * s * s) + 2.0 / (r * r * r);
  const double w = psi * (1.0 - psi);
  const double d1 = w * q;
  const double d2 = d1 * (1.0 - 2.0 * psi) * q + w * dq;
  return {psi, d1, d2};
}

}  // namespace detail

/**
 * Radial cutoff chi_eps: 0 for |x| <= eps/2, 1 for |x| >= eps, smooth in between.
 * Derivatives are with respect to x (1D: Laplacian == second derivative).
 */
class CutoffFunction {
 public:
  explicit CutoffFunction(double eps) : eps_(eps) {
    require(std::isfinite(eps) && eps > 0.0, ErrorCode::InvalidArgument, "cutoff eps must be > 0");
  }

  double eps() const noexcept { return eps_; }

  double operator()(double x) const noexcept { return detail::smooth_step(arg(x)).value; }

  double gradient(double x) const noexcept {
    const double g = detail::smooth_step(arg(x)).d1 * (2.0 / eps_);
    return x < 0.0 ? -g : g;
  }

  double laplacian(double x) const noexcept {
    return detail::smooth_step(arg(x)).d2 * (4.0 / (eps_ * eps_));
  }

  double sup_gradient() const noexcept { return unit_sups().first * (2.0 / eps_); }
  double sup_laplacian() const noexcept { return unit_sups().second * (4.0 / (eps_ * eps_)); }

 private:
  double arg(double x) const noexcept { return (std::abs(x) - 0.5 * eps_) / (0.5 * eps_); }

  static std::pair<double, double> unit_sups() {
    static const std::pair<double, double> sups = [] {
      double g = 0.0, l = 0.0;
      constexpr int n = 20000;
      for (int i = 1; i < n; ++i) {
        const auto st = detail::smooth_step(static_cast<double>(i) / n);
        g = std::max(g, std::abs(st.d1));
        l = std::max(l, std::abs(st.d2));
      }
      return std::pair{g, l};
    }();
    return sups;
  }

  double eps_;
};

}  // namespace critscat
