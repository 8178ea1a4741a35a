#pragma once

#include <cmath>
#include <vector>

#include "critscat/evolution/reduced.hpp"
#include "critscat/model/schedule.hpp"

namespace critscat {

struct FullStepControl {
  double dt = 0.01;
  double tol = 1e-8;
  double min_dt = 1e-7;
  bool refine = true;
};

/**
 * Original-frame flow i psi_t = [p^2/(2m) + k(t) x^2/2 + V(t, x)] psi on [t_from, t_to],
 * Strang split with the position factor sampled at the step midpoint.
 */
inline EvolutionState evolve_full(EvolutionState in, double t_to, const CoefficientSchedule& schedule,
                                  const PotentialSpec& potential, const FullStepControl& ctl = {}) {
  detail::require_position(in.state, "evolve_full");
  const double t_from = in.tau;  // the clock field holds t here
  require(t_from >= 0.0 && t_from <= t_to && std::isfinite(t_to), ErrorCode::InvalidArgument,
          "evolve_full requires 0 <= t_from <= t_to");
  const auto& g = in.state.grid;
  auto check_domain = [&](const SpectralState& s) {
    const double lim = g.half_width / 3.0;
    require(position_moments(s).second <= lim * lim, ErrorCode::DomainEscape,
            "position second moment exceeds (L/3)^2");
  };
  check_domain(in.state);
  if (t_to == t_from) return in;

  const double n0 = in.state.norm();
  const std::vector<double> xs = g.positions();
  auto phase = [&](double t, double h, CVector& out) {
    const double k = schedule(t);
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const double x = xs[j];
      out[j] = std::polar(1.0, reduced_phase(-static_cast<long double>(h) *
                                             (0.5L * k * x * x + potential(t, x))));
    }
  };
  const double span = t_to - t_from;
  auto run = [&](std::size_t n) {
    return detail::strang(in.state.values, g, t_from, span / static_cast<double>(n), n,
                          schedule.mass(), phase);
  };
  auto r = detail::refine_until(run, span, ctl.dt, ctl.tol, ctl.min_dt, g.spacing(), ctl.refine);
  in.state.values = std::move(r.values);
  in.error_estimate += r.error;
  in.dtau_used = r.h;
  in.steps_taken += r.steps;
  in.norm_drift += std::abs(in.state.norm() - n0);
  in.tau = t_to;
  detail::check_aliasing(in.state);
  check_domain(in.state);
  return in;
}

inline SpectralState evolve_full(const SpectralState& state, double t_from, double t_to,
                                 const CoefficientSchedule& schedule, const PotentialSpec& potential,
                                 const FullStepControl& ctl = {}) {
  return evolve_full(EvolutionState{state, t_from}, t_to, schedule, potential, ctl).state;
}

}  // namespace critscat
