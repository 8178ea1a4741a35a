#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "critscat/model/grid.hpp"
#include "critscat/spectral/state.hpp"

namespace critscat {

/// Packet momentum profile must stay below this fraction of the Nyquist wavenumber.
inline constexpr double kNyquistMargin = 0.8;

struct PacketShape {
  enum class Profile {
    gaussian,  ///< Gaussian ring; Fourier mass outside the annulus below 1e-13
    compact,   ///< C-infinity bump exp(-1/(1-u^2)), exactly supported in the annulus
  };
  enum class Lobes { both, positive, negative };

  Profile profile = Profile::gaussian;
  Lobes lobes = Lobes::both;
  /// Gaussian ring: annulus half-width measured in ring standard deviations.
  double sigmas = 5.2;

  bool operator==(const PacketShape&) const = default;
};

inline std::string_view to_string(PacketShape::Profile p) {
  return p == PacketShape::Profile::gaussian ? "gaussian" : "compact";
}
inline std::string_view to_string(PacketShape::Lobes l) {
  switch (l) {
    case PacketShape::Lobes::both: return "both";
    case PacketShape::Lobes::positive: return "positive";
    case PacketShape::Lobes::negative: return "negative";
  }
  return "both";
}

inline PacketShape::Profile parse_profile(std::string_view s) {
  if (s == "gaussian") return PacketShape::Profile::gaussian;
  if (s == "compact") return PacketShape::Profile::compact;
  throw Error(ErrorCode::ConfigError, "unknown packet profile '" + std::string(s) + "'");
}
inline PacketShape::Lobes parse_lobes(std::string_view s) {
  if (s == "both") return PacketShape::Lobes::both;
  if (s == "positive") return PacketShape::Lobes::positive;
  if (s == "negative") return PacketShape::Lobes::negative;
  throw Error(ErrorCode::ConfigError, "unknown packet lobes '" + std::string(s) + "'");
}

/**
 * Unit-norm test state whose Fourier transform lives in the annulus 2 eps <= |xi| <= R.
 */
struct WavePacket {
  double eps = 0.5;
  double R = 4.0;
  PacketShape shape{};
  SpectralState state;

  const GridSpec& grid() const noexcept { return state.grid; }

  /// Unnormalized momentum profile at xi.
  double profile(double xi) const noexcept {
    const bool pos = xi >= 0.0;
    if (shape.lobes == PacketShape::Lobes::positive && !pos) return 0.0;
    if (shape.lobes == PacketShape::Lobes::negative && pos) return 0.0;
    const double center = 0.5 * (2.0 * eps + R);
    const double half = 0.5 * (R - 2.0 * eps);
    const double u = (std::abs(xi) - center) / half;
    if (shape.profile == PacketShape::Profile::gaussian) {
      const double z = u * shape.sigmas;
      return std::exp(-0.5 * z * z);
    }
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - u * u));
  }
};

inline WavePacket make_packet(double eps, double R, const GridSpec& grid, PacketShape shape = {}) {
  grid.validate();
  require(std::isfinite(eps) && eps > 0.0, ErrorCode::InvalidArgument, "eps must be > 0");
  require(2.0 * eps < R, ErrorCode::AnnulusEmpty, "annulus empty: 2*eps >= R");
  require(R < kNyquistMargin * grid.nyquist(), ErrorCode::AnnulusTooWide,
          "R exceeds the grid Nyquist margin");
  require(shape.sigmas > 0.0, ErrorCode::InvalidArgument, "shape.sigmas must be > 0");

  WavePacket p;
  p.eps = eps;
  p.R = R;
  p.shape = shape;
  CVector spec(grid.points);
  for (std::size_t m = 0; m < grid.points; ++m) spec[m] = p.profile(grid.k(m));
  SpectralState mom(grid, std::move(spec), Side::momentum);
  p.state = to_position(mom);
  const double nrm = p.state.norm();
  for (auto& v : p.state.values) v /= nrm;
  return p;
}

}  // namespace critscat
