#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "critscat/errors.hpp"

namespace critscat {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

namespace detail {

/// Global lock: FFTW's planner is not re-entrant, execution with new arrays is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwPlans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit FftwPlans(std::size_t n) {
    std::lock_guard lock(fftw_planner_mutex());
    // ESTIMATE keeps the chosen algorithm (and hence every output bit) independent of timing.
    auto* buf = fftw_alloc_complex(n);
    const auto flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, flags);
    backward = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_BACKWARD, flags);
    fftw_free(buf);
    if (!forward || !backward) throw Error(ErrorCode::InvalidArgument, "FFTW planning failed");
  }
  ~FftwPlans() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  FftwPlans(const FftwPlans&) = delete;
  FftwPlans& operator=(const FftwPlans&) = delete;
};

inline std::shared_ptr<const FftwPlans> plans_for(std::size_t n) {
  // The planner mutex must outlive the cache, so construct it first.
  [[maybe_unused]] static std::mutex& planner = fftw_planner_mutex();
  static std::mutex cache_mutex;
  static std::map<std::size_t, std::shared_ptr<const FftwPlans>> cache;
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const FftwPlans>(n);
  return slot;
}

}  // namespace detail

/// Unnormalized in-place DFT of length n: X_k = sum_j x_j e^{-2 pi i jk/n}.
/// Plans are cached per length and shared read-only across threads.
class Fft {
 public:
  explicit Fft(std::size_t n) : n_(n), plans_(detail::plans_for(n)) {}

  std::size_t size() const noexcept { return n_; }

  void forward(std::span<cplx> data) const { run(plans_->forward, data); }

  /// Inverse transform including the 1/n factor.
  void backward(std::span<cplx> data) const {
    run(plans_->backward, data);
    const double s = 1.0 / static_cast<double>(n_);
    for (auto& v : data) v *= s;
  }

 private:
  void run(fftw_plan plan, std::span<cplx> data) const {
    require(data.size() == n_, ErrorCode::InvalidArgument, "FFT length mismatch");
    auto* p = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, p, p);
  }

  std::size_t n_;
  std::shared_ptr<const detail::FftwPlans> plans_;
};

}  // namespace critscat
