#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "critscat/model/grid.hpp"
#include "critscat/spectral/fft.hpp"

namespace critscat {

enum class Side { position, momentum };

/**
 * Grid samples of a wavefunction.
 *
 * Position side: values[j] = u(x_j). Momentum side: values[m] = u^(k_m) in FFT
 * order, with the unitary convention u^(xi) = (2 pi)^{-1/2} int e^{-i xi x} u(x) dx.
 */
struct SpectralState {
  GridSpec grid;
  CVector values;
  Side side = Side::position;

  SpectralState() = default;
  SpectralState(GridSpec g, CVector v, Side s = Side::position)
      : grid(g), values(std::move(v)), side(s) {
    require(values.size() == grid.points, ErrorCode::InvalidArgument, "state size != grid points");
  }

  static SpectralState zeros(const GridSpec& g) { return {g, CVector(g.points), Side::position}; }

  double measure() const noexcept { return side == Side::position ? grid.spacing() : grid.dk(); }

  double norm() const noexcept {
    double s = 0.0;
    for (const auto& v : values) s += std::norm(v);
    return std::sqrt(s * measure());
  }
};

inline double l2_distance(const SpectralState& a, const SpectralState& b) {
  require(a.grid == b.grid && a.side == b.side, ErrorCode::InvalidArgument,
          "l2_distance: incompatible states");
  double s = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j) s += std::norm(a.values[j] - b.values[j]);
  return std::sqrt(s * a.measure());
}

inline double inner_norm_sq(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& z : v) s += std::norm(z);
  return s;
}

/// Position samples -> samples of the continuous unitary Fourier transform on the k grid.
inline SpectralState to_momentum(const SpectralState& s) {
  require(s.side == Side::position, ErrorCode::InvalidArgument, "to_momentum: not in position space");
  SpectralState out = s;
  Fft(s.grid.points).forward(out.values);
  const double scale = s.grid.spacing() / std::sqrt(2.0 * std::numbers::pi);
  const std::size_t n = s.grid.points;
  for (std::size_t m = 0; m < n; ++m) {
    // e^{-i k_m x_0} with x_0 = -L is (-1)^m
    const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
    out.values[m] *= scale * sgn;
  }
  out.side = Side::momentum;
  return out;
}

inline SpectralState to_position(const SpectralState& s) {
  require(s.side == Side::momentum, ErrorCode::InvalidArgument, "to_position: not in momentum space");
  SpectralState out = s;
  const std::size_t n = s.grid.points;
  const double scale = std::sqrt(2.0 * std::numbers::pi) / s.grid.spacing();
  for (std::size_t m = 0; m < n; ++m) {
    const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
    out.values[m] *= scale * sgn;
  }
  Fft(n).backward(out.values);
  out.side = Side::position;
  return out;
}

/// Phase reduced to [-pi, pi] in long double before rounding to double.
inline double reduced_phase(long double phase) {
  constexpr long double two_pi = 6.283185307179586476925286766559005768L;
  return static_cast<double>(std::remainder(phase, two_pi));
}

/**
 * Centered scaled DFT: S_m = sum_j a_j exp(-i alpha m j) for j in [-N_in/2, N_in/2) and
 * m in [-N_out/2, N_out/2), evaluated with Bluestein's factorization
 * m j = (m^2 + j^2 - (m-j)^2)/2. Input and output are indexed by j + N_in/2, m + N_out/2.
 */
inline CVector scaled_dft(std::span<const cplx> a, long double alpha, std::size_t n_out = 0) {
  const std::size_t n = a.size();
  if (n_out == 0) n_out = n;
  std::size_t p = 1;
  while (p < n + n_out) p <<= 1;
  // Phases grow like alpha N^2; reduce them in extended precision.
  const long double half_alpha = 0.5L * alpha;
  auto chirp = [half_alpha](std::ptrdiff_t q) {
    return std::polar(1.0, reduced_phase(half_alpha * static_cast<long double>(q) *
                                         static_cast<long double>(q)));
  };
  const auto in_half = static_cast<std::ptrdiff_t>(n / 2);
  const auto out_half = static_cast<std::ptrdiff_t>(n_out / 2);

  CVector x(p), y(p);
  for (std::size_t j = 0; j < n; ++j)
    x[j] = a[j] * std::conj(chirp(static_cast<std::ptrdiff_t>(j) - in_half));
  // m - j = (m' - j') + in_half - out_half, with m' - j' in [-(N_in-1), N_out-1]
  const auto lag0 = -static_cast<std::ptrdiff_t>(n - 1) + in_half - out_half;
  for (std::size_t k = 0; k + 1 < n + n_out; ++k) y[k] = chirp(static_cast<std::ptrdiff_t>(k) + lag0);
  Fft fft(p);
  fft.forward(x);
  fft.forward(y);
  for (std::size_t k = 0; k < p; ++k) x[k] *= y[k];
  fft.backward(x);

  CVector out(n_out);
  for (std::size_t m = 0; m < n_out; ++m)
    out[m] = std::conj(chirp(static_cast<std::ptrdiff_t>(m) - out_half)) * x[m + n - 1];
  return out;
}

/// Band-limited resampling of a position state onto the same box with `factor` x points.
inline SpectralState upsample(const SpectralState& s, std::size_t factor) {
  require(s.side == Side::position, ErrorCode::InvalidArgument, "upsample: wrong side");
  if (factor == 1) return s;
  const std::size_t n = s.grid.points, nf = n * factor;
  CVector c = s.values;
  Fft(n).forward(c);
  CVector f(nf);
  for (std::size_t m = 0; m < n; ++m) {
    const std::size_t dst = m <= n / 2 ? m : nf - (n - m);
    f[dst] = c[m] * static_cast<double>(factor);
  }
  Fft(nf).backward(f);
  GridSpec g = s.grid;
  g.points = nf;
  return {g, std::move(f), Side::position};
}

/// <x>, <x^2> on the position side (state need not be normalized).
struct Moments {
  double mass = 0.0;
  double first = 0.0;
  double second = 0.0;
};

inline Moments position_moments(const SpectralState& s) {
  require(s.side == Side::position, ErrorCode::InvalidArgument, "position_moments: wrong side");
  Moments m;
  for (std::size_t j = 0; j < s.values.size(); ++j) {
    const double w = std::norm(s.values[j]);
    const double x = s.grid.x(j);
    m.mass += w;
    m.first += w * x;
    m.second += w * x * x;
  }
  m.first /= m.mass;
  m.second /= m.mass;
  m.mass *= s.grid.spacing();
  return m;
}

inline Moments momentum_moments(const SpectralState& s) {
  const SpectralState p = s.side == Side::momentum ? s : to_momentum(s);
  Moments m;
  for (std::size_t j = 0; j < p.values.size(); ++j) {
    const double w = std::norm(p.values[j]);
    const double k = p.grid.k(j);
    m.mass += w;
    m.first += w * k;
    m.second += w * k * k;
  }
  m.first /= m.mass;
  m.second /= m.mass;
  m.mass *= p.grid.dk();
  return m;
}

/// Relative spectral mass with |k| above `fraction` of the Nyquist wavenumber.
inline double spectral_mass_above(const SpectralState& s, double fraction) {
  const SpectralState p = s.side == Side::momentum ? s : to_momentum(s);
  const double cut = fraction * p.grid.nyquist();
  double hi = 0.0, total = 0.0;
  for (std::size_t j = 0; j < p.values.size(); ++j) {
    const double w = std::norm(p.values[j]);
    total += w;
    if (std::abs(p.grid.k(j)) >= cut) hi += w;
  }
  return total > 0.0 ? hi / total : 0.0;
}

}  // namespace critscat
