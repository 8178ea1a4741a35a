#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "critscat/model/potential.hpp"
#include "critscat/spectral/operators.hpp"

namespace critscat {

/// Momentum mass above this fraction of Nyquist counts as aliasing.
inline constexpr double kAliasFraction = 0.95;
inline constexpr double kAliasMassTol = 1e-10;

struct ReducedEvolverConfig {
  PotentialSpec potential = PotentialSpec::none();
  GridSpec grid{};
  double dtau = 0.05;  ///< base step; refined by halving
  double tol = 1e-8;   ///< L2 agreement of two successive refinements, per segment
  std::vector<double> checkpoints;
  double tau_max = 60.0;
  double min_dtau = 1e-6;
  bool refine = true;  ///< Richardson step-halving; off = single pass at dtau
  /// Smooth the spike of W at the origin (width e^{-tau/2}) to the grid scale dx/2 once it
  /// becomes narrower than that; states in S_eps have left |x| < eps tau by then.
  bool grid_core = true;

  double core2() const { return grid_core ? 0.25 * grid.spacing() * grid.spacing() : 0.0; }

  void validate() const {
    grid.validate();
    potential.validate();
    require(dtau > 0.0 && std::isfinite(dtau), ErrorCode::InvalidArgument, "dtau must be > 0");
    require(tol > 0.0, ErrorCode::InvalidArgument, "tol must be > 0");
    require(std::is_sorted(checkpoints.begin(), checkpoints.end()), ErrorCode::InvalidArgument,
            "checkpoints must be sorted");
    for (double c : checkpoints)
      require(c >= 1.0 && c <= tau_max, ErrorCode::InvalidArgument, "checkpoint outside [1, tau_max]");
  }
};

struct EvolutionState {
  SpectralState state;
  double tau = 0.0;
  double norm_drift = 0.0;
  std::size_t steps_taken = 0;
  double error_estimate = 0.0;  ///< Richardson estimate of the splitting error accumulated so far
  double dtau_used = 0.0;       ///< finest accepted step of the last segment
};

namespace detail {

/// exp(-i h k^2 / (2 m)) on the FFT grid.
inline CVector kinetic_phases(const GridSpec& g, double h, double mass = 1.0) {
  CVector ph(g.points);
  for (std::size_t m = 0; m < g.points; ++m) {
    const double k = g.k(m);
    ph[m] = std::polar(1.0, reduced_phase(-0.5L * h * k * k / mass));
  }
  return ph;
}

/**
 * n Strang steps of size h for i u' = [T + P(s)] u, T diagonal in k, P(s) diagonal in x.
 * `potential_phase(s_mid, h, out)` fills exp(-i h P(s_mid)). Consecutive half kinetic
 * factors are fused into one full kinetic factor.
 */
template <class PhaseFn>
CVector strang(CVector u, const GridSpec& g, double s0, double h, std::size_t n, double mass,
               PhaseFn&& potential_phase) {
  const Fft fft(g.points);
  const CVector half = kinetic_phases(g, 0.5 * h, mass);
  const CVector full = kinetic_phases(g, h, mass);
  CVector pot(g.points);
  fft.forward(u);
  for (std::size_t m = 0; m < g.points; ++m) u[m] *= half[m];
  for (std::size_t i = 0; i < n; ++i) {
    fft.backward(u);
    potential_phase(s0 + (static_cast<double>(i) + 0.5) * h, h, pot);
    for (std::size_t j = 0; j < g.points; ++j) u[j] *= pot[j];
    fft.forward(u);
    const CVector& k = (i + 1 == n) ? half : full;
    for (std::size_t m = 0; m < g.points; ++m) u[m] *= k[m];
  }
  fft.backward(u);
  return u;
}

struct RefinedResult {
  CVector values;
  double error = 0.0;
  double h = 0.0;
  std::size_t steps = 0;
};

/**
 * Step-halving: integrate with n, 2n, 4n, ... steps until two successive results agree to
 * tol in L2. The finer solution is returned with the difference as its error estimate.
 */
template <class Run>
RefinedResult refine_until(Run&& run, double span, double h0, double tol, double min_h,
                           double measure, bool refine) {
  std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / h0 - 1e-9)));
  CVector coarse = run(n);
  std::size_t total = n;
  if (!refine) return {std::move(coarse), 0.0, span / static_cast<double>(n), total};
  for (;;) {
    const std::size_t n2 = 2 * n;
    const double h = span / static_cast<double>(n2);
    require(h >= min_h, ErrorCode::StepUnderflow, "step halving fell below the minimum step");
    CVector fine = run(n2);
    total += n2;
    double d = 0.0;
    for (std::size_t j = 0; j < fine.size(); ++j) d += std::norm(fine[j] - coarse[j]);
    d = std::sqrt(d * measure);
    if (d <= tol) return {std::move(fine), d, h, total};
    coarse = std::move(fine);
    n = n2;
  }
}

inline void check_aliasing(const SpectralState& s) {
  require(spectral_mass_above(s, kAliasFraction) <= kAliasMassTol, ErrorCode::AliasingDetected,
          "momentum mass reached the Nyquist band");
}

}  // namespace detail

/**
 * Reduced flow i u_tau = [p^2/2 + W(tau, x)] u, W(tau, x) = e^tau V(e^tau, e^{tau/2} x),
 * from tau_from to tau_to. One refinement loop per call.
 */
inline EvolutionState evolve_reduced(EvolutionState in, double tau_to, const ReducedEvolverConfig& cfg) {
  detail::require_position(in.state, "evolve_reduced");
  require(in.state.grid == cfg.grid, ErrorCode::InvalidArgument, "state grid differs from config grid");
  // tau_from = 0 is allowed: the reduced clock starts at t = 1.
  require(in.tau >= 0.0 && in.tau <= tau_to && tau_to <= cfg.tau_max, ErrorCode::InvalidArgument,
          "evolve_reduced requires 0 <= tau_from <= tau_to <= tau_max");
  if (tau_to == in.tau) return in;
  const double n0 = in.state.norm();
  const double span = tau_to - in.tau;

  if (cfg.potential.is_zero()) {
    in.state = free_reduced_propagate(std::move(in.state), span);
    in.dtau_used = span;
    in.steps_taken += 1;
  } else {
    const auto& g = cfg.grid;
    const std::vector<double> xs = g.positions();
    const auto& pot = cfg.potential;
    std::vector<double> w(xs.size());
    const double core2 = cfg.core2();
    auto phase = [&](double tau, double h, CVector& out) {
      pot.reduced_row(tau, xs, w, core2);
      for (std::size_t j = 0; j < xs.size(); ++j) out[j] = std::polar(1.0, -h * w[j]);
    };
    const double tau0 = in.tau;
    auto run = [&](std::size_t n) {
      return detail::strang(in.state.values, g, tau0, span / static_cast<double>(n), n, 1.0, phase);
    };
    auto r = detail::refine_until(run, span, cfg.dtau, cfg.tol, cfg.min_dtau, g.spacing(), cfg.refine);
    in.state.values = std::move(r.values);
    in.error_estimate += r.error;
    in.dtau_used = r.h;
    in.steps_taken += r.steps;
  }
  detail::check_aliasing(in.state);
  in.norm_drift += std::abs(in.state.norm() - n0);
  in.tau = tau_to;
  return in;
}

inline SpectralState evolve_reduced(const SpectralState& state, double tau_from, double tau_to,
                                    const ReducedEvolverConfig& cfg) {
  return evolve_reduced(EvolutionState{state, tau_from}, tau_to, cfg).state;
}

/// Evolves from tau_from through every configured checkpoint above it; `sink` sees each one.
inline EvolutionState evolve_through_checkpoints(
    EvolutionState s, const ReducedEvolverConfig& cfg,
    const std::function<void(const EvolutionState&)>& sink) {
  for (double c : cfg.checkpoints) {
    if (c <= s.tau) continue;
    s = evolve_reduced(std::move(s), c, cfg);
    if (sink) sink(s);
  }
  return s;
}

/// sup_x |W(tau, x) chi_eps(x / tau)| over the grid.
inline double effective_potential_sup(const PotentialSpec& p, const GridSpec& g, double tau, double eps) {
  const CutoffFunction chi(eps);
  double s = 0.0;
  for (std::size_t j = 0; j < g.points; ++j) {
    const double x = g.x(j);
    s = std::max(s, std::abs(p.reduced(tau, x) * chi(x / tau)));
  }
  return s;
}

}  // namespace critscat
