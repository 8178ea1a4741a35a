#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "critscat/errors.hpp"

namespace critscat {

/// Periodic grid on [-L, L) with N samples, x_j = -L + j dx.
struct GridSpec {
  int dimension = 1;
  double half_width = 200.0;
  std::size_t points = 4096;

  GridSpec() = default;
  GridSpec(double L, std::size_t n, int dim = 1) : dimension(dim), half_width(L), points(n) {
    validate();
  }

  void validate() const {
    // TODO: two-dimensional grids need a 2D transform plan and separable chirp-z dilation.
    require(dimension == 1, ErrorCode::InvalidArgument, "only dimension 1 is supported");
    require(std::isfinite(half_width) && half_width > 0.0, ErrorCode::InvalidArgument,
            "half_width must be positive");
    require(points >= 8 && std::has_single_bit(points), ErrorCode::InvalidArgument,
            "points must be a power of two >= 8");
  }

  double spacing() const noexcept { return 2.0 * half_width / static_cast<double>(points); }
  double x(std::size_t j) const noexcept {
    return -half_width + static_cast<double>(j) * spacing();
  }
  double dk() const noexcept { return std::numbers::pi / half_width; }
  double nyquist() const noexcept { return std::numbers::pi / spacing(); }

  /// Angular wavenumber of FFT bin j in standard (unshifted) order.
  double k(std::size_t j) const noexcept {
    const auto n = static_cast<std::ptrdiff_t>(points);
    auto m = static_cast<std::ptrdiff_t>(j);
    if (m >= n / 2) m -= n;
    return static_cast<double>(m) * dk();
  }

  std::vector<double> positions() const {
    std::vector<double> xs(points);
    for (std::size_t j = 0; j < points; ++j) xs[j] = x(j);
    return xs;
  }

  std::vector<double> wavenumbers() const {
    std::vector<double> ks(points);
    for (std::size_t j = 0; j < points; ++j) ks[j] = k(j);
    return ks;
  }

  bool operator==(const GridSpec&) const = default;
};

}  // namespace critscat
