#pragma once

#include <cmath>
#include <vector>

#include "critscat/model/cutoff.hpp"
#include "critscat/model/packet.hpp"
#include "critscat/model/potential.hpp"
#include "critscat/spectral/operators.hpp"

namespace critscat {

/// Norms of the three summands of d/dt U_S(t,1)* chi_eps(x/log t) U(t) phi at t = e^tau.
struct CookSample {
  double tau = 0.0;
  double term_V = 0.0;   ///< ||V(t, t^{1/2} x) chi U phi||
  double term_D = 0.0;   ///< ||D_{p^2/2t}(chi) U phi||
  double term_x2 = 0.0;  ///< ||chi U (x^2 / (2 t tau^2)) phi||
  double bound_D = 0.0;  ///< C_D (t tau^2)^-1
  double bound_x2 = 0.0; ///< C_x2 (t tau^2)^-1
  double bound_V = 0.0;  ///< C_S t^-1 tau^{-2+kappa} (asymptotic envelope)
};

/// Computable constants for the derivative and x^2 envelopes.
struct CookConstants {
  double x_norm = 0.0;   ///< ||x phi||
  double x2_norm = 0.0;  ///< ||x^2 phi||
  double C_D = 0.0;      ///< sup|chi'| ||x phi|| + sup|chi''| / 2
  double C_x2 = 0.0;     ///< ||x^2 phi|| / 2, with a unitarity allowance
};

inline SpectralState multiply_by_power(const SpectralState& s, int power) {
  SpectralState out = s;
  for (std::size_t j = 0; j < out.values.size(); ++j) out.values[j] *= std::pow(s.grid.x(j), power);
  return out;
}

inline CookConstants cook_constants(const WavePacket& phi) {
  const CutoffFunction chi(phi.eps);
  CookConstants c;
  c.x_norm = multiply_by_power(phi.state, 1).norm();
  c.x2_norm = multiply_by_power(phi.state, 2).norm();
  c.C_D = chi.sup_gradient() * c.x_norm + 0.5 * chi.sup_laplacian();
  // U(t) is unitary only up to the band-limited sampling error; 1e-8 covers it
  c.C_x2 = 0.5 * c.x2_norm * (1.0 + 1e-8);
  return c;
}

inline CookSample cook_integrand(const WavePacket& phi, double tau, const PotentialSpec& potential) {
  require(tau >= 2.0, ErrorCode::InvalidArgument, "cook_integrand needs tau >= 2");
  const double t = std::exp(tau);
  const auto& g = phi.grid();
  const CutoffFunction chi(phi.eps);
  const CookConstants k = cook_constants(phi);

  const SpectralState u = mdfm_apply_tau(phi.state, tau, MdfmMode::truncated);
  // (x - tau p) U phi = U (x phi) and U (x^2 phi), by the conjugation identity
  const SpectralState ux = mdfm_apply_tau(multiply_by_power(phi.state, 1), tau, MdfmMode::truncated);
  const SpectralState ux2 = mdfm_apply_tau(multiply_by_power(phi.state, 2), tau, MdfmMode::truncated);

  std::vector<double> xs = g.positions(), w(g.points);
  potential.reduced_row(tau, xs, w);
  double sv = 0.0, sd = 0.0, s2 = 0.0;
  for (std::size_t j = 0; j < g.points; ++j) {
    const double y = xs[j] / tau;
    const double c = chi(y);
    sv += std::norm(w[j] * c * u.values[j]);
    const cplx d = chi.gradient(y) * ux.values[j] + cplx(0.0, 0.5) * chi.laplacian(y) * u.values[j];
    sd += std::norm(d);
    s2 += std::norm(c * ux2.values[j]);
  }
  const double dx = g.spacing();
  const double ttau2 = t * tau * tau;
  CookSample s;
  s.tau = tau;
  // V(t, t^{1/2} x) = e^-tau W(tau, x)
  s.term_V = std::sqrt(sv * dx) / t;
  s.term_D = std::sqrt(sd * dx) / ttau2;
  s.term_x2 = std::sqrt(s2 * dx) / (2.0 * ttau2);
  s.bound_D = k.C_D / ttau2;
  s.bound_x2 = k.C_x2 / ttau2;
  s.bound_V = potential.is_zero()
                  ? 0.0
                  : potential.amplitude_high * potential.modulation.sup() * std::pow(tau, -2.0 + potential.kappa) / t;
  return s;
}

/**
 * t term_V = ||W(tau, x) chi_eps(x/tau) U phi|| evaluated in momentum space, using
 * |U(e^tau) phi|(x) = tau^{-1/2} |phi^(x/tau)|. Needs no e^tau, so any tau >= 2 works.
 */
inline double scaled_potential_term(const WavePacket& phi, double tau, const PotentialSpec& potential) {
  require(tau >= 2.0, ErrorCode::InvalidArgument, "scaled_potential_term needs tau >= 2");
  const auto mom = to_momentum(phi.state);
  const auto& g = phi.grid();
  const CutoffFunction chi(phi.eps);
  std::vector<double> xs(g.points), w(g.points);
  for (std::size_t m = 0; m < g.points; ++m) xs[m] = tau * g.k(m);
  potential.reduced_row(tau, xs, w);
  double s = 0.0;
  for (std::size_t m = 0; m < g.points; ++m) {
    const double c = chi(g.k(m));
    if (c == 0.0) continue;  // W is unbounded at the origin once e^-tau underflows
    s += w[m] * w[m] * c * c * std::norm(mom.values[m]);
  }
  return std::sqrt(s * g.dk());
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorCode::InvalidArgument, "slope needs >= 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]) - mx;
    sxy += a * (std::log(y[i]) - my);
    sxx += a * a;
  }
  return sxy / sxx;
}

/// Slope of log(t term_V) against log tau over the samples with tau in [lo, hi].
inline double cook_slope(const std::vector<CookSample>& samples, double lo, double hi) {
  std::vector<double> x, y;
  for (const auto& s : samples)
    if (s.tau >= lo && s.tau <= hi && s.term_V > 0.0) {
      x.push_back(s.tau);
      y.push_back(std::exp(s.tau) * s.term_V);
    }
  return x.size() >= 2 ? loglog_slope(x, y) : std::nan("");
}

}  // namespace critscat
