#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "critscat/classical/zeta.hpp"
#include "critscat/evolution/full.hpp"
#include "critscat/model/packet.hpp"

using namespace critscat;

namespace {

const GridSpec kGrid{200.0, 4096};

SpectralState gaussian(const GridSpec& g, double w, double chirp = 0.0) {
  auto s = SpectralState::zeros(g);
  for (std::size_t j = 0; j < g.points; ++j) {
    const double x = g.x(j);
    s.values[j] = std::polar(std::exp(-0.5 * x * x / (w * w)), 0.5 * chirp * x * x);
  }
  const double n = s.norm();
  for (auto& v : s.values) v /= n;
  return s;
}

ReducedEvolverConfig reduced_cfg(PotentialSpec p, double dtau = 0.05, double tol = 1e-8) {
  ReducedEvolverConfig c;
  c.potential = p;
  c.grid = kGrid;
  c.dtau = dtau;
  c.tol = tol;
  return c;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

}  // namespace

TEST(Reduced, ZeroPotentialIsFreeFlow) {
  const auto phi = make_packet(0.5, 4.0, kGrid).state;
  const auto cfg = reduced_cfg(PotentialSpec::none());
  for (double tau : {1.0, 3.5, 20.0}) {
    const auto u = evolve_reduced(phi, 1.0, tau, cfg);
    EXPECT_LT(l2_distance(u, free_reduced_propagate(phi, tau - 1.0)), 1e-10);
  }
}

TEST(Reduced, ZeroPotentialMatchesMdfmAcrossCheckpoints) {
  const auto phi = make_packet(0.5, 4.0, kGrid).state;
  auto cfg = reduced_cfg(PotentialSpec::none());
  cfg.checkpoints = {2.0, 5.0, 10.0, 20.0};
  EvolutionState s{mdfm_apply_tau(phi, 1.0, MdfmMode::full), 1.0};
  evolve_through_checkpoints(s, cfg, [&](const EvolutionState& e) {
    EXPECT_LT(l2_distance(e.state, mdfm_apply_tau(phi, e.tau, MdfmMode::full)), 1e-9) << e.tau;
  });
}

TEST(Reduced, NormAfterManySteps) {
  const auto phi = make_packet(0.5, 4.0, kGrid).state;
  auto cfg = reduced_cfg(PotentialSpec::log_power(0.5, 0.1), 1e-3);
  cfg.refine = false;
  const auto out = evolve_reduced(EvolutionState{phi, 1.0}, 11.0, cfg);
  EXPECT_EQ(out.steps_taken, 10000u);
  EXPECT_LE(std::abs(out.state.norm() - 1.0), 1e-12);
  EXPECT_LE(out.norm_drift, cfg.tol * static_cast<double>(out.steps_taken));
}

// Seeded like a sweep segment: U(e^5) phi sits away from the origin spike of W.
TEST(Reduced, SelfConvergenceSecondOrder) {
  const GridSpec g{1000.0, 4096};
  const auto phi = make_packet(0.5, 4.0, g).state;
  const auto u0 = mdfm_apply_tau(phi, 5.0, MdfmMode::truncated);
  for (double kappa : {0.0, 0.5, 1.0, 1.5}) {
    ReducedEvolverConfig cfg;
    cfg.grid = g;
    cfg.potential = PotentialSpec::log_power(kappa, 0.5);
    cfg.refine = false;
    std::vector<SpectralState> u;
    for (double h : {0.5, 0.25, 0.125}) {
      cfg.dtau = h;
      u.push_back(evolve_reduced(u0, 5.0, 10.0, cfg));
    }
    const double r = l2_distance(u[0], u[1]) / l2_distance(u[1], u[2]);
    EXPECT_GE(r, 3.5) << kappa;
  }
}

TEST(Reduced, RefinementMeetsTolerance) {
  const GridSpec g{1000.0, 4096};
  const auto phi = make_packet(0.5, 4.0, g).state;
  const auto u0 = mdfm_apply_tau(phi, 5.0, MdfmMode::truncated);
  ReducedEvolverConfig cfg;
  cfg.grid = g;
  cfg.potential = PotentialSpec::log_power(1.0, 0.5);
  cfg.dtau = 0.5;
  cfg.tol = 1e-7;
  const auto out = evolve_reduced(EvolutionState{u0, 5.0}, 10.0, cfg);
  EXPECT_LE(out.error_estimate, 1e-7);
  auto fine = cfg;
  fine.dtau = out.dtau_used / 4;
  fine.refine = false;
  // the accepted state is closer to a much finer solution than the tolerance
  EXPECT_LT(l2_distance(out.state, evolve_reduced(u0, 5.0, 10.0, fine)), 1e-7);
}

// Started on the origin with a coarse step, the potential spike feeds the Nyquist band.
TEST(Reduced, CoarseStepOnSpikeIsCaught) {
  const auto phi = make_packet(0.5, 4.0, kGrid).state;
  auto cfg = reduced_cfg(PotentialSpec::log_power(1.5, 0.5), 0.2);
  cfg.refine = false;
  try {
    evolve_reduced(phi, 1.0, 6.0, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AliasingDetected);
  }
}

TEST(Reduced, Errors) {
  const auto phi = make_packet(0.5, 4.0, kGrid).state;
  auto cfg = reduced_cfg(PotentialSpec::log_power(0.5, 0.1), 0.5, 1e-15);
  cfg.min_dtau = 0.05;
  try {
    evolve_reduced(phi, 1.0, 3.0, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::StepUnderflow);
  }
  // plane-wave content just under Nyquist
  auto hot = SpectralState::zeros(kGrid);
  const double k0 = 0.97 * kGrid.nyquist();
  for (std::size_t j = 0; j < kGrid.points; ++j) {
    const double x = kGrid.x(j) / 20.0;
    hot.values[j] = std::polar(std::exp(-0.5 * x * x), k0 * kGrid.x(j));
  }
  try {
    evolve_reduced(hot, 1.0, 1.5, reduced_cfg(PotentialSpec::none()));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AliasingDetected);
  }
  EXPECT_THROW(evolve_reduced(phi, 2.0, 1.0, reduced_cfg(PotentialSpec::none())), Error);
  EXPECT_THROW(evolve_reduced(phi, 1.0, 70.0, reduced_cfg(PotentialSpec::none())), Error);
}

TEST(Reduced, EffectivePotentialSlope) {
  for (double kappa : {0.0, 1.0}) {
    const auto p = PotentialSpec::log_power(kappa, 0.1);
    std::vector<double> taus, w;
    for (double tau = 10.0; tau <= 30.0; tau += 2.0) {
      taus.push_back(tau);
      w.push_back(effective_potential_sup(p, GridSpec{1000.0, 8192}, tau, 0.5));
    }
    EXPECT_NEAR(slope(taus, w), -2.0 + kappa, 0.1) << kappa;
  }
}

TEST(Full, FreeGaussianClosedForm) {
  const double w = 1.0;
  const auto psi0 = gaussian(kGrid, w);
  const auto psi = evolve_full(psi0, 0.0, 10.0, CoefficientSchedule(0.0), PotentialSpec::none());
  double err = 0.0;
  for (std::size_t j = 0; j < kGrid.points; ++j) {
    const double x = kGrid.x(j);
    const cplx a = 1.0 + cplx(0, 10.0 / (w * w));
    const cplx ref = std::pow(std::numbers::pi * w * w, -0.25) / std::sqrt(a) * std::exp(-x * x / (2.0 * w * w * a));
    err += std::norm(psi.values[j] - ref);
  }
  EXPECT_LT(std::sqrt(err * kGrid.spacing()), 1e-6);
}

TEST(Full, IdentityAtEqualTimes) {
  const auto psi0 = gaussian(kGrid, 1.0);
  EXPECT_EQ(l2_distance(evolve_full(psi0, 2.0, 2.0, CoefficientSchedule(0.25), PotentialSpec::none()), psi0), 0.0);
}

TEST(Full, CriticalMomentTransport) {
  const CoefficientSchedule sch(0.25);
  const double w = 1.5, beta = 0.3;
  const auto psi0 = gaussian(kGrid, w, beta);
  const double x2 = 0.5 * w * w;
  const double p2 = 0.5 / (w * w) + beta * beta * x2;
  const double xp = beta * x2;  // <(xp + px)/2>
  const double t = std::exp(2.0);
  const auto z = solve_zeta(sch, 10.0).at(t);
  const double expected = z.z1 * z.z1 * x2 + z.z2 * z.z2 * p2 + 2.0 * z.z1 * z.z2 * xp;
  const auto psi = evolve_full(psi0, 0.0, t, sch, PotentialSpec::none());
  EXPECT_NEAR(position_moments(psi).second / expected, 1.0, 0.01);
  EXPECT_NEAR(position_moments(psi0).second, x2, 1e-12);
}

TEST(Full, DomainEscape) {
  const auto psi0 = gaussian(GridSpec{40.0, 1024}, 0.3);
  try {
    evolve_full(psi0, 0.0, 60.0, CoefficientSchedule(0.0), PotentialSpec::none(), {.dt = 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DomainEscape);
  }
}

// psi(t, x) = t^{-1/4} e^{i x^2/(4t)} u(log t, x / t^{1/2}) carries the reduced flow into the
// critical full flow on t >= r0 = 1.
TEST(Full, IntertwinesWithReducedFlow) {
  const CoefficientSchedule sch(0.25);
  const auto phi = make_packet(0.5, 4.0, kGrid).state;
  for (double kappa : {0.5, 1.5}) {
    const auto pot = PotentialSpec::log_power(kappa, 0.5);
    const auto psi1 = gauge_multiply(phi, 2.0, +1);
    const double t = std::exp(1.5);
    const auto psi = evolve_full(psi1, 1.0, t, sch, pot, {.dt = 0.005, .tol = 1e-8});
    auto cfg = reduced_cfg(pot, 0.01);
    const auto u = evolve_reduced(phi, 0.0, 1.5, cfg);
    auto mapped = gauge_multiply(dilate(u, std::sqrt(t)), 2.0 * t, +1);
    for (auto& v : mapped.values) v *= std::polar(1.0, std::numbers::pi / 4);
    EXPECT_LT(l2_distance(psi, mapped), 1e-6) << kappa;
  }
}
