#pragma once

#include <boost/math/tools/minima.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "critscat/model/schedule.hpp"
#include "critscat/numerics/dopri5.hpp"

namespace critscat {

/// zeta_1, zeta_2 and their derivatives at one time.
struct ZetaPoint {
  double t = 0.0;
  double z1 = 1.0, dz1 = 0.0;
  double z2 = 0.0, dz2 = 1.0;

  double wronskian() const noexcept { return z1 * dz2 - z2 * dz1; }
};

enum class ZetaBranch {
  closed_form,  ///< exact matched solution beyond r0
  numeric,      ///< adaptive integration beyond r0 (cross-check)
};

/**
 * Exterior closed form matched at r0.
 *   critical:      zeta = t^{1/2} (A + B log t)
 *   non-critical:  zeta = a t^{1-lambda} + b t^lambda
 */
struct MatchedCoefficients {
  bool critical = false;
  double lambda = 0.0;
  // critical
  double A1 = 0.0, B1 = 0.0, A2 = 0.0, B2 = 0.0;
  // non-critical
  double a1 = 0.0, b1 = 0.0, a2 = 0.0, b2 = 0.0;
};

struct ZetaOptions {
  double tol = 1e-12;
  ZetaBranch branch = ZetaBranch::closed_form;
  bool integrate_exterior = true;  ///< keep the numeric exterior branch for cross-checks
  std::size_t samples = 400;
};

class ClassicalSolution {
 public:
  using Interior = numerics::Dopri5<4>;

  ClassicalSolution(CoefficientSchedule schedule, double t_max, Interior interior,
                    MatchedCoefficients coeffs, std::optional<Interior> exterior, ZetaBranch branch)
      : schedule_(schedule),
        t_max_(t_max),
        interior_(std::move(interior)),
        coeffs_(coeffs),
        exterior_(std::move(exterior)),
        branch_(branch) {}

  const CoefficientSchedule& schedule() const noexcept { return schedule_; }
  double t_max() const noexcept { return t_max_; }
  const MatchedCoefficients& matched_coeffs() const noexcept { return coeffs_; }
  ZetaBranch default_branch() const noexcept { return branch_; }
  bool has_numeric_exterior() const noexcept { return exterior_.has_value(); }
  const std::vector<ZetaPoint>& samples() const noexcept { return samples_; }

  ZetaPoint at(double t) const { return at(t, branch_); }

  ZetaPoint at(double t, ZetaBranch branch) const {
    require(t >= 0.0 && t <= t_max_ * (1.0 + 1e-12), ErrorCode::InvalidArgument,
            "ClassicalSolution: t outside [0, t_max]");
    const double r0 = schedule_.r0();
    if (t <= r0) {
      const auto y = interior_(t);
      return {t, y[0], y[1], y[2], y[3]};
    }
    if (branch == ZetaBranch::numeric) {
      require(exterior_.has_value(), ErrorCode::InvalidArgument,
              "numeric exterior branch was not integrated");
      // exterior state is (zeta, t zeta') in s = log t
      const auto y = (*exterior_)(std::log(t));
      return {t, y[0], y[1] / t, y[2], y[3] / t};
    }
    return closed_form(t);
  }

  void build_samples(std::size_t n) {
    samples_.clear();
    samples_.push_back(at(0.0));
    const double lo = std::log(1e-2 * schedule_.r0());
    const double hi = std::log(t_max_);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
      samples_.push_back(at(i + 1 == n ? t_max_ : std::exp(s)));
    }
  }

 private:
  ZetaPoint closed_form(double t) const {
    const double s = std::log(t);
    const double rt = std::sqrt(t);
    if (coeffs_.critical) {
      const auto& c = coeffs_;
      const double z1 = rt * (c.A1 + c.B1 * s);
      const double z2 = rt * (c.A2 + c.B2 * s);
      const double dz1 = (0.5 * (c.A1 + c.B1 * s) + c.B1) / rt;
      const double dz2 = (0.5 * (c.A2 + c.B2 * s) + c.B2) / rt;
      return {t, z1, dz1, z2, dz2};
    }
    const double lam = coeffs_.lambda;
    const double hi = std::pow(t, 1.0 - lam);
    const double lo = std::pow(t, lam);
    const auto& c = coeffs_;
    return {t,
            c.a1 * hi + c.b1 * lo,
            (c.a1 * (1.0 - lam) * hi + c.b1 * lam * lo) / t,
            c.a2 * hi + c.b2 * lo,
            (c.a2 * (1.0 - lam) * hi + c.b2 * lam * lo) / t};
  }

  CoefficientSchedule schedule_;
  double t_max_;
  Interior interior_;
  MatchedCoefficients coeffs_;
  std::optional<Interior> exterior_;
  ZetaBranch branch_;
  std::vector<ZetaPoint> samples_;
};

namespace detail {

/// Solves the 2x2 matching system for one solution given (zeta, t zeta') at r0.
inline void match_one(const CoefficientSchedule& sch, double zeta, double eta, double& p, double& q) {
  const double r0 = sch.r0();
  const double s0 = std::log(r0);
  if (sch.critical()) {
    const double e = std::exp(-0.5 * s0);
    const double z = zeta * e, w = eta * e;
    q = w - 0.5 * z;  // B
    p = z - s0 * q;   // A
    return;
  }
  const double lam = sch.lambda();
  const double P = (eta - lam * zeta) / (1.0 - 2.0 * lam);
  const double Q = zeta - P;
  p = P * std::pow(r0, lam - 1.0);  // a
  q = Q * std::pow(r0, -lam);       // b
}

}  // namespace detail

/**
 * Solves zeta'' + (k(t)/m) zeta = 0 with the two canonical initial conditions.
 * The interior [0, r0] is always integrated; beyond r0 the closed form matched at r0
 * is exact, and the numeric exterior (integrated in s = log t, where the equation has
 * constant coefficients) is kept as an independent route.
 */
inline ClassicalSolution solve_zeta(const CoefficientSchedule& schedule, double t_max,
                                    const ZetaOptions& opt = {}) {
  require(t_max >= schedule.r0(), ErrorCode::InvalidArgument, "solve_zeta: t_max must be >= r0");
  require(opt.tol >= 1e-13 && opt.tol <= 1e-6, ErrorCode::InvalidArgument,
          "solve_zeta: tol must lie in [1e-13, 1e-6]");
  require(opt.samples >= 2, ErrorCode::InvalidArgument, "solve_zeta: need >= 2 samples");

  const double m = schedule.mass();
  using Dp = numerics::Dopri5<4>;
  Dp::Options o;
  o.rtol = opt.tol;
  o.atol = opt.tol * 1e-2;

  auto interior_rhs = [&](double t, const Dp::State& y) -> Dp::State {
    const double w = schedule(t) / m;
    return {y[1], -w * y[0], y[3], -w * y[2]};
  };
  Dp interior(interior_rhs, 0.0, {1.0, 0.0, 0.0, 1.0}, schedule.r0(), o);

  const auto yr = interior.final_state();
  const double r0 = schedule.r0();
  MatchedCoefficients c;
  c.critical = schedule.critical();
  c.lambda = c.critical ? 0.5 : schedule.lambda();
  if (c.critical) {
    detail::match_one(schedule, yr[0], r0 * yr[1], c.A1, c.B1);
    detail::match_one(schedule, yr[2], r0 * yr[3], c.A2, c.B2);
  } else {
    detail::match_one(schedule, yr[0], r0 * yr[1], c.a1, c.b1);
    detail::match_one(schedule, yr[2], r0 * yr[3], c.a2, c.b2);
  }

  std::optional<Dp> exterior;
  if ((opt.integrate_exterior || opt.branch == ZetaBranch::numeric) && t_max > r0) {
    const double w = schedule.sigma() / m;
    auto exterior_rhs = [w](double, const Dp::State& y) -> Dp::State {
      return {y[1], y[1] - w * y[0], y[3], y[3] - w * y[2]};
    };
    exterior.emplace(exterior_rhs, std::log(r0), Dp::State{yr[0], r0 * yr[1], yr[2], r0 * yr[3]},
                     std::log(t_max), o);
  }

  ClassicalSolution sol(schedule, t_max, std::move(interior), c, std::move(exterior), opt.branch);
  sol.build_samples(opt.samples);
  return sol;
}

struct TrajectoryState {
  double x0 = 0.0;
  double p0 = 0.0;
};

struct PhasePoint {
  double x = 0.0;
  double p = 0.0;
};

/// x(t) = zeta_1 x0 + zeta_2 p0/m, p(t) = m x'(t).
inline PhasePoint classical_trajectory(const ClassicalSolution& sol, const TrajectoryState& s,
                                       double t) {
  require(std::isfinite(s.x0) && std::isfinite(s.p0), ErrorCode::InvalidArgument,
          "trajectory state must be finite");
  const double m = sol.schedule().mass();
  const ZetaPoint z = sol.at(t);
  return {z.z1 * s.x0 + z.z2 * s.p0 / m, m * (z.dz1 * s.x0 + z.dz2 * s.p0 / m)};
}

enum class Regime { free, non_critical, critical };

inline std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::free: return "free";
    case Regime::non_critical: return "non-critical";
    case Regime::critical: return "critical";
  }
  return "";
}

struct AsymptoticFit {
  Regime regime = Regime::critical;
  double t_lo = 0.0, t_hi = 0.0;
  double log_coefficient = 0.0;  ///< B in zeta_2 ~ t^{1/2}(A + B log t)
  double log_intercept = 0.0;    ///< A
  double lambda = 0.0;           ///< fitted smaller exponent of the non-critical model
  double exponent = 0.0;         ///< dominant exponent: 1 - lambda, or 1/2 when critical
  double residual_critical = 0.0;
  double residual_noncritical = 0.0;
};

namespace detail {

/// Least squares of y against two basis columns; returns (c0, c1, relative rms residual).
inline std::array<double, 3> lsq2(const std::vector<double>& f0, const std::vector<double>& f1,
                                  const std::vector<double>& y) {
  double s00 = 0, s01 = 0, s11 = 0, r0 = 0, r1 = 0, yy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    s00 += f0[i] * f0[i];
    s01 += f0[i] * f1[i];
    s11 += f1[i] * f1[i];
    r0 += f0[i] * y[i];
    r1 += f1[i] * y[i];
    yy += y[i] * y[i];
  }
  const double det = s00 * s11 - s01 * s01;
  if (!(std::abs(det) > 0.0)) return {0.0, 0.0, std::numeric_limits<double>::infinity()};
  const double c0 = (r0 * s11 - r1 * s01) / det;
  const double c1 = (r1 * s00 - r0 * s01) / det;
  double res = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - c0 * f0[i] - c1 * f1[i];
    res += e * e;
  }
  return {c0, c1, std::sqrt(res / yy)};
}

}  // namespace detail

/**
 * Fits zeta_2 on [t_lo, t_hi] with both exterior models and reports the winner.
 * Critical: zeta_2 / t^{1/2} = A + B log t. Non-critical: a t^{1-lambda} + b t^lambda,
 * with lambda found by Brent minimization of the residual over [0, 1/2).
 */
inline AsymptoticFit fit_asymptotics(const ClassicalSolution& sol, double t_lo, double t_hi,
                                     std::optional<ZetaBranch> branch = std::nullopt,
                                     std::size_t points = 200) {
  const double e2 = std::exp(2.0);
  require(t_lo >= e2 * sol.schedule().r0() && t_hi >= e2 * t_lo, ErrorCode::WindowTooNarrow,
          "fit window must satisfy t_lo >= e^2 r0 and t_hi >= e^2 t_lo");
  require(t_hi <= sol.t_max() * (1.0 + 1e-12), ErrorCode::InvalidArgument,
          "fit window exceeds the solution horizon");
  const ZetaBranch br = branch.value_or(sol.default_branch());

  std::vector<double> ts(points), z(points);
  const double a = std::log(t_lo), b = std::log(t_hi);
  for (std::size_t i = 0; i < points; ++i) {
    const double s = a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1);
    ts[i] = std::exp(s);
    z[i] = sol.at(ts[i], br).z2;
  }

  AsymptoticFit fit;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;

  // critical model, fitted in the form zeta = sqrt(t) A + sqrt(t) log(t) B
  std::vector<double> f0(points), f1(points);
  for (std::size_t i = 0; i < points; ++i) {
    f0[i] = std::sqrt(ts[i]);
    f1[i] = f0[i] * std::log(ts[i]);
  }
  const auto crit = detail::lsq2(f0, f1, z);
  fit.log_intercept = crit[0];
  fit.log_coefficient = crit[1];
  fit.residual_critical = crit[2];

  auto residual_at = [&](double lam) {
    std::vector<double> g0(points), g1(points);
    for (std::size_t i = 0; i < points; ++i) {
      g0[i] = std::pow(ts[i], 1.0 - lam);
      g1[i] = std::pow(ts[i], lam);
    }
    return detail::lsq2(g0, g1, z)[2];
  };
  const double lam_hi = 0.5 - 1e-6;
  const auto best = boost::math::tools::brent_find_minima(residual_at, 0.0, lam_hi,
                                                          std::numeric_limits<double>::digits);
  double lam = best.first;
  double res = best.second;
  // Brent never probes the interval ends exactly; the free case sits on lambda = 0.
  if (const double r0 = residual_at(0.0); r0 <= res) {
    lam = 0.0;
    res = r0;
  }
  fit.lambda = lam;
  fit.residual_noncritical = res;

  if (fit.residual_critical <= fit.residual_noncritical) {
    fit.regime = Regime::critical;
    fit.exponent = 0.5;
  } else {
    fit.regime = lam == 0.0 ? Regime::free : Regime::non_critical;
    fit.exponent = 1.0 - lam;
  }
  return fit;
}

}  // namespace critscat
