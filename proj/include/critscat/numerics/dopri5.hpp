#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "critscat/errors.hpp"

namespace critscat::numerics {

/**
 * Dormand-Prince 5(4) integrator with step-size control and continuous output
 * (Hairer/Norsett/Wanner, "Solving ODEs I", routine DOPRI5).
 *
 * The whole trajectory is retained as a sequence of dense-output segments so the
 * solution can be evaluated anywhere in [t0, t1] to roughly the requested tolerance.
 */
template <std::size_t N>
class Dopri5 {
 public:
  using State = std::array<double, N>;

  struct Options {
    double rtol = 1e-10;
    double atol = 1e-12;
    double initial_step = 0.0;  ///< 0: pick automatically
    std::size_t max_steps = 5'000'000;
  };

  struct Segment {
    double t0;
    double h;
    std::array<State, 5> r;
  };

  /// Integrates y' = f(t, y) from (t0, y0) to t1 > t0.
  template <class F>
  Dopri5(F&& f, double t0, const State& y0, double t1, const Options& opt) {
    require(t1 > t0, ErrorCode::InvalidArgument, "Dopri5: t1 must exceed t0");
    integrate(f, t0, y0, t1, opt);
  }

  double t_begin() const noexcept { return segments_.front().t0; }
  double t_end() const noexcept { return segments_.back().t0 + segments_.back().h; }
  std::size_t steps() const noexcept { return segments_.size(); }
  std::size_t rejected() const noexcept { return rejected_; }
  const State& final_state() const noexcept { return y_end_; }

  State operator()(double t) const {
    auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                               [](double v, const Segment& s) { return v < s.t0; });
    if (it != segments_.begin()) --it;
    const Segment& s = *it;
    const double th = std::clamp((t - s.t0) / s.h, 0.0, 1.0);
    const double th1 = 1.0 - th;
    State y;
    for (std::size_t i = 0; i < N; ++i)
      y[i] = s.r[0][i] + th * (s.r[1][i] + th1 * (s.r[2][i] + th * (s.r[3][i] + th1 * s.r[4][i])));
    return y;
  }

 private:
  template <class F>
  void integrate(F& f, double t0, State y, double t1, const Options& opt) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432.0,
                            d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0,
                            d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    double t = t0;
    State k1 = f(t, y), k2, k3, k4, k5, k6, k7, ytmp, ynew;
    double h = opt.initial_step > 0.0 ? opt.initial_step : 1e-3 * (t1 - t0);
    double err_old = 1e-4;
    bool last_rejected = false;

    auto axpy = [](const State& base, double hh, std::initializer_list<std::pair<double, const State*>> terms) {
      State out = base;
      for (const auto& [c, k] : terms)
        for (std::size_t i = 0; i < N; ++i) out[i] += hh * c * (*k)[i];
      return out;
    };

    const double t_slack = 1e-13 * std::max(1.0, std::abs(t1));
    for (std::size_t step = 0; t1 - t > t_slack; ++step) {
      require(step < opt.max_steps, ErrorCode::ToleranceNotMet, "Dopri5: step budget exhausted");
      require(h > 1e-14 * std::max(1.0, std::abs(t)), ErrorCode::ToleranceNotMet,
              "Dopri5: step size underflow");
      if (t + h > t1 || t1 - (t + h) < t_slack) h = t1 - t;

      ytmp = axpy(y, h, {{a21, &k1}});
      k2 = f(t + c2 * h, ytmp);
      ytmp = axpy(y, h, {{a31, &k1}, {a32, &k2}});
      k3 = f(t + c3 * h, ytmp);
      ytmp = axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
      k4 = f(t + c4 * h, ytmp);
      ytmp = axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
      k5 = f(t + c5 * h, ytmp);
      ytmp = axpy(y, h, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
      k6 = f(t + h, ytmp);
      ynew = axpy(y, h, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
      k7 = f(t + h, ynew);

      double err = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double ei =
            h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        err += (ei / sc) * (ei / sc);
      }
      err = std::sqrt(err / static_cast<double>(N));

      if (err <= 1.0) {
        Segment seg{t, h, {}};
        for (std::size_t i = 0; i < N; ++i) {
          const double dy = ynew[i] - y[i];
          const double bspl = h * k1[i] - dy;
          seg.r[0][i] = y[i];
          seg.r[1][i] = dy;
          seg.r[2][i] = bspl;
          seg.r[3][i] = dy - h * k7[i] - bspl;
          seg.r[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                             d7 * k7[i]);
        }
        segments_.push_back(seg);
        t += h;
        y = ynew;
        k1 = k7;
        // PI step control
        double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.7 / 5.0) * std::pow(err_old, 0.4 / 5.0);
        fac = std::clamp(fac, 0.2, 10.0);
        if (last_rejected) fac = std::min(fac, 1.0);
        err_old = std::max(err, 1e-4);
        h *= fac;
        last_rejected = false;
      } else {
        ++rejected_;
        h *= std::max(0.2, 0.9 * std::pow(err, -1.0 / 5.0));
        last_rejected = true;
      }
    }
    y_end_ = y;
  }

  std::vector<Segment> segments_;
  std::size_t rejected_ = 0;
  State y_end_{};
};

}  // namespace critscat::numerics
