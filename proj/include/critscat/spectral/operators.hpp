#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "critscat/model/cutoff.hpp"
#include "critscat/spectral/state.hpp"

namespace critscat {

/// Tolerated relative mass that may be lost off the grid by a dilation.
inline constexpr double kDilationMassTol = 1e-10;

namespace detail {

inline void require_position(const SpectralState& s, const char* op) {
  require(s.side == Side::position, ErrorCode::InvalidArgument,
          std::string(op) + ": state must be on the position side");
}

/// (i s)^{-1/2} for s > 0, principal branch.
inline cplx dilation_prefactor(double s) {
  return std::polar(1.0 / std::sqrt(s), -std::numbers::pi / 4.0);
}

}  // namespace detail

/// Pointwise multiplication by exp(sign * i x^2 / (2t)).
inline SpectralState gauge_multiply(SpectralState state, double t, int sign = +1) {
  detail::require_position(state, "gauge_multiply");
  require(t != 0.0 && std::isfinite(t), ErrorCode::ZeroTime, "gauge_multiply at t = 0");
  const long double dx = static_cast<long double>(state.grid.spacing());
  const long double L = static_cast<long double>(state.grid.half_width);
  const long double c = static_cast<long double>(sign) / (2.0L * static_cast<long double>(t));
  for (std::size_t j = 0; j < state.values.size(); ++j) {
    const long double x = -L + static_cast<long double>(j) * dx;
    state.values[j] *= std::polar(1.0, reduced_phase(c * x * x));
  }
  return state;
}

/**
 * Dilation (D(s)u)(x) = (i s)^{-1/2} u(x/s), evaluated by band-limited (trigonometric)
 * interpolation of u with a chirp-z transform. Points with |x/s| >= L are set to zero.
 *
 * Throws ScaleOverflow when s > 1 would push mass beyond the box, or when s < 1 would
 * push spectral content past the Nyquist wavenumber.
 */
inline SpectralState dilate(const SpectralState& state, double s) {
  detail::require_position(state, "dilate");
  require(s > 0.0 && std::isfinite(s), ErrorCode::InvalidArgument, "dilate: scale must be > 0");
  const auto& g = state.grid;
  const std::size_t n = g.points;
  const double total = inner_norm_sq(state.values);

  if (s > 1.0) {
    double outside = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (std::abs(g.x(j)) >= g.half_width / s) outside += std::norm(state.values[j]);
    require(outside <= kDilationMassTol * total, ErrorCode::ScaleOverflow,
            "dilated support leaves the grid");
  } else if (s < 1.0) {
    require(spectral_mass_above(state, s) <= kDilationMassTol, ErrorCode::ScaleOverflow,
            "compressed state exceeds the Nyquist wavenumber");
  }

  // Centered DFT coefficients: U_mc (-1)^mc with mc = m - N/2.
  CVector coeffs = state.values;
  Fft(n).forward(coeffs);
  CVector centered(n);
  const auto half = static_cast<std::ptrdiff_t>(n / 2);
  for (std::size_t m = 0; m < n; ++m) {
    const auto mc = static_cast<std::ptrdiff_t>(m) - half;
    const std::size_t src = static_cast<std::size_t>((mc + static_cast<std::ptrdiff_t>(n)) %
                                                     static_cast<std::ptrdiff_t>(n));
    const double sgn = (mc % 2 == 0) ? 1.0 : -1.0;
    centered[m] = coeffs[src] * sgn / static_cast<double>(n);
  }
  const long double alpha =
      -2.0L * std::numbers::pi_v<long double> / (static_cast<long double>(n) * s);
  CVector vals = scaled_dft(centered, alpha);

  const cplx pre = detail::dilation_prefactor(s);
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(g.x(j) / s) >= g.half_width)
      vals[j] = 0.0;
    else
      vals[j] *= pre;
  }
  return {g, std::move(vals), Side::position};
}

/**
 * (D(s) F u)(x) = (i s)^{-1/2} u^(x/s): the Fourier transform of a position state,
 * sampled at the dilated points x_m / s of `out` and returned there. The input may live on a
 * finer grid over the same box. Samples past the input Nyquist wavenumber are zero (u is taken
 * band-limited).
 */
inline SpectralState dilated_fourier(const SpectralState& state, double s, const GridSpec& out) {
  detail::require_position(state, "dilated_fourier");
  require(s > 0.0 && std::isfinite(s), ErrorCode::DegenerateTime, "dilation by a non-positive scale");
  const auto& g = state.grid;
  require(g.half_width == out.half_width && g.points % out.points == 0, ErrorCode::InvalidArgument,
          "dilated_fourier: output grid must share the box and divide the input grid");
  const long double alpha = static_cast<long double>(out.spacing()) *
                            static_cast<long double>(g.spacing()) / static_cast<long double>(s);
  CVector vals = scaled_dft(state.values, alpha, out.points);
  const cplx pre = detail::dilation_prefactor(s) * (g.spacing() / std::sqrt(2.0 * std::numbers::pi));
  // the grid transform is periodic in xi; beyond Nyquist it only holds images
  const double kmax = g.nyquist();
  for (std::size_t j = 0; j < out.points; ++j)
    vals[j] = std::abs(out.x(j) / s) < kmax ? vals[j] * pre : cplx{};
  return {out, std::move(vals), Side::position};
}

inline SpectralState dilated_fourier(const SpectralState& state, double s) {
  return dilated_fourier(state, s, state.grid);
}

/// Exact reduced free flow exp(-i tau p^2 / 2), diagonal on the FFT grid.
inline SpectralState free_reduced_propagate(SpectralState state, double tau) {
  detail::require_position(state, "free_reduced_propagate");
  if (tau == 0.0) return state;
  const auto& g = state.grid;
  Fft fft(g.points);
  fft.forward(state.values);
  for (std::size_t m = 0; m < g.points; ++m) {
    const double k = g.k(m);
    state.values[m] *= std::polar(1.0, -0.5 * tau * k * k);
  }
  fft.backward(state.values);
  return state;
}

enum class MdfmMode {
  full,       ///< M D F M: reproduces exp(-i log(t) p^2 / 2)
  truncated,  ///< M D F: the comparison map U(t) of the reduced wave operator
};

inline std::string_view to_string(MdfmMode m) { return m == MdfmMode::full ? "full" : "truncated"; }

/// Applies M(log t) D(log t) F [M(log t)] to phi.
inline SpectralState mdfm_apply(const SpectralState& phi, double t, MdfmMode mode) {
  detail::require_position(phi, "mdfm_apply");
  require(std::isfinite(t) && t >= 1.0, ErrorCode::InvalidArgument, "mdfm_apply requires t >= 1");
  const double tau = std::log(t);
  if (tau == 0.0) {
    // exp(-i 0 p^2/2) is the identity; the truncated map has no t = 1 limit.
    require(mode == MdfmMode::full, ErrorCode::DegenerateTime, "U(1) dilates by log 1 = 0");
    return phi;
  }
  if (mode == MdfmMode::truncated) return gauge_multiply(dilated_fourier(phi, tau), tau, +1);
  // M(tau) phi carries local wavenumbers up to L/tau; refine until they fit under Nyquist.
  const auto& g = phi.grid;
  std::size_t factor = 1;
  while (static_cast<double>(factor) * g.nyquist() < g.half_width / tau + g.nyquist()) factor *= 2;
  SpectralState u = gauge_multiply(upsample(phi, factor), tau, +1);
  return gauge_multiply(dilated_fourier(u, tau, g), tau, +1);
}

/// Same map parametrized by reduced time tau = log t.
inline SpectralState mdfm_apply_tau(const SpectralState& phi, double tau, MdfmMode mode) {
  return mdfm_apply(phi, std::exp(tau), mode);
}

/// || (1 - chi_eps(x / log t)) state ||
inline double mass_below_cutoff(const SpectralState& state, double t, double eps) {
  detail::require_position(state, "mass_below_cutoff");
  require(t >= std::numbers::e * (1.0 - 1e-15), ErrorCode::InvalidArgument,
          "mass_below_cutoff requires t >= e");
  const CutoffFunction chi(eps);
  const double tau = std::log(t);
  double s = 0.0;
  for (std::size_t j = 0; j < state.values.size(); ++j) {
    const double w = 1.0 - chi(state.grid.x(j) / tau);
    s += w * w * std::norm(state.values[j]);
  }
  return std::sqrt(s * state.grid.spacing());
}

}  // namespace critscat
