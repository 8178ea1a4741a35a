#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <optional>

#include "critscat/scattering/sweep.hpp"

using namespace critscat;

namespace {

const GridSpec kWide{1000.0, 4096};

ReducedEvolverConfig evolver(const PotentialSpec& p, const GridSpec& g = kWide) {
  ReducedEvolverConfig c;
  c.potential = p;
  c.grid = g;
  c.dtau = 0.1;
  c.tol = 1e-7;
  return c;
}

}  // namespace

TEST(ITheta, ClosedForms) {
  EXPECT_NEAR(i_theta(0.0, 2.0), 1.0 / std::log(2.0), 1e-15);
  EXPECT_NEAR(i_theta(0.0, 2.0), 1.442695, 1e-6);
  EXPECT_NEAR(i_theta(0.5, 2.0), 2.0 / std::sqrt(std::log(2.0)), 1e-15);
  EXPECT_NEAR(i_theta(0.5, 2.0), 2.402245, 1e-6);
  try {
    i_theta(1.0, 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DivergentIntegral);
  }
  EXPECT_THROW(i_theta(1.5, 2.0), Error);
  EXPECT_THROW(i_theta(0.0, 1.5), Error);
}

TEST(ITheta, MatchesQuadrature) {
  // substitute tau = log t; integrate tau^{-2+theta} on [log a, T] plus the analytic tail
  for (double theta : {0.0, 0.3, 0.7}) {
    const double a = 3.0, lo = std::log(a), T = 200.0;
    double s = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
      const double u = lo + (T - lo) * (i + 0.5) / n;
      s += std::pow(u, -2.0 + theta);
    }
    s *= (T - lo) / n;
    s += std::pow(T, theta - 1.0) / (1.0 - theta);
    EXPECT_NEAR(i_theta(theta, a), s, 1e-7 * s) << theta;
  }
}

TEST(JTerms, LowerBoundExamples) {
  const auto phi = make_packet(0.5, 4.0, kWide);
  const double C = 0.5;
  const auto a1 = j_terms(phi, PotentialSpec::log_power(1.0, C), 10.0, 20.0);
  EXPECT_NEAR(a1.j1_lower, 0.125 / 16.0 * C * std::log(2.0), 1e-15);
  const auto a15 = j_terms(phi, PotentialSpec::log_power(1.5, C), 10.0, 20.0);
  EXPECT_NEAR(a15.j1_lower, 2.0 * (std::sqrt(20.0) - std::sqrt(10.0)) * std::pow(2.0, -3.5) / 16.0 * C, 1e-15);
  EXPECT_GE(a1.j1_numeric, a1.j1_lower);
  EXPECT_GE(a15.j1_numeric, a15.j1_lower);
  // J3 budget and delta probes
  EXPECT_NEAR(a1.j3_bound, 0.5 * cook_constants(phi).x2_norm / std::log(2.0), 1e-12);
  ASSERT_EQ(a1.probes.size(), 3u);
  for (const auto& pr : a1.probes) {
    EXPECT_NEAR(pr.gamma, a1.constants.gamma0 - 4.0 * pr.delta * a1.constants.C_tilde_L / 0.25, 1e-15);
    EXPECT_GT(pr.j2_envelope, 0.0);
  }
  EXPECT_NEAR(a1.constants.gamma0 - 4.0 * a1.delta_critical * a1.constants.C_tilde_L / 0.25, 0.0, 1e-15);
}

TEST(JTerms, ShortRangeRejected) {
  const auto phi = make_packet(0.5, 4.0, kWide);
  try {
    j_terms(phi, PotentialSpec::log_power(0.5, 0.5), 10.0, 20.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShortRangeInput);
  }
}

TEST(JTerms, NumericMatchesDirectQuadrature) {
  const auto phi = make_packet(0.5, 4.0, kWide);
  const auto p = PotentialSpec::log_power(1.5, 0.5);
  // independent oracle: midpoint rule in tau, pointwise W in xi
  const auto mom = to_momentum(phi.state);
  double s = 0.0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    const double tau = 10.0 + 10.0 * (i + 0.5) / n;
    double inner = 0.0;
    for (std::size_t m = 0; m < kWide.points; ++m)
      inner += p.reduced(tau, tau * kWide.k(m)) * std::norm(mom.values[m]);
    s += inner * kWide.dk();
  }
  s *= 10.0 / n;
  EXPECT_NEAR(j1_numeric(phi, p, 10.0, 20.0), s, 1e-6 * s);
}

TEST(JTerms, DominanceAlongSchedule) {
  const auto phi = make_packet(0.5, 4.0, kWide);
  for (double kappa : {1.0, 1.2, 1.5, 2.0}) {
    const auto p = PotentialSpec::log_power(kappa, 0.5);
    const auto c = j_constants(phi, p);
    for (double tau : {10.0, 20.0, 40.0})
      EXPECT_GE(j1_numeric(phi, p, 5.0, tau), j1_lower_bound(c, 5.0, tau)) << kappa << " " << tau;
    // analytic divergence to tau = 40
    EXPECT_GT(j1_lower_bound(c, 5.0, 40.0), j1_lower_bound(c, 5.0, 20.0));
  }
}

TEST(Growth, Classes) {
  const std::vector<double> taus{5, 10, 20, 40, 60};
  std::vector<double> lg, pw, bd;
  for (double t : taus) {
    lg.push_back(std::log(t / 5.0));
    pw.push_back(std::sqrt(t) - std::sqrt(5.0));
    bd.push_back(1.0 / 5.0 - 1.0 / t);
  }
  double beta = 0.0;
  EXPECT_EQ(growth_class(taus, lg, &beta), GrowthClass::logarithmic);
  EXPECT_NEAR(beta, 0.0, 1e-12);
  EXPECT_EQ(growth_class(taus, pw, &beta), GrowthClass::polynomial);
  EXPECT_NEAR(beta, 0.5, 0.02);
  EXPECT_EQ(growth_class(taus, bd, &beta), GrowthClass::bounded);
}

TEST(Cauchy, EqualTimesIsZero) {
  const auto phi = make_packet(0.5, 4.0, kWide).state;
  EXPECT_EQ(cauchy_difference(phi, 10.0, 10.0, evolver(PotentialSpec::log_power(1.0, 0.5))), 0.0);
}

TEST(Cauchy, FreeFlowVanishes) {
  const auto phi = make_packet(0.5, 4.0, kWide).state;
  const auto cfg = evolver(PotentialSpec::none());
  EXPECT_LT(cauchy_difference(phi, 10.0, 20.0, cfg), 1e-9);
  // the truncated map differs from the free flow only by its M(log t) tail
  const double x2 = cook_constants(make_packet(0.5, 4.0, kWide)).x2_norm;
  const double dt = cauchy_difference(phi, 10.0, 20.0, cfg, MdfmMode::truncated);
  EXPECT_LE(dt, x2 / (2.0 * 10.0) + x2 / (2.0 * 20.0));
  EXPECT_GT(dt, 0.0);
}

TEST(Cauchy, ShortRangeTailRatio) {
  const auto phi = make_packet(0.5, 4.0, kWide).state;
  auto cfg = evolver(PotentialSpec::log_power(0.5, 0.1));
  cfg.tau_max = 40.0;
  const auto m = cauchy_matrix(phi, {10.0, 20.0, 40.0}, cfg);
  const double ratio = m.d[0][1] / m.d[1][2];
  EXPECT_NEAR(ratio, std::sqrt(2.0), 0.3 * std::sqrt(2.0));
}

TEST(Cauchy, LongRangeStaysAboveFloor) {
  const auto wp = make_packet(0.5, 4.0, kWide);
  const auto pot = PotentialSpec::log_power(1.5, 0.5);
  auto cfg = evolver(pot);
  cfg.tau_max = 40.0;
  const auto m = cauchy_matrix(wp.state, {10.0, 20.0, 40.0}, cfg);
  const double g0 = j_constants(wp, pot).gamma0;
  const double floor1 = 0.5 * g0 * tau_power_integral(1.5, 10.0, 20.0);
  const double floor2 = 0.5 * g0 * tau_power_integral(1.5, 20.0, 40.0);
  EXPECT_GE(m.d[0][1], floor1);
  EXPECT_GE(m.d[1][2], floor2);
  EXPECT_GE(m.d[1][2], 0.8 * m.d[0][1]);  // no decay toward 0
}

TEST(Cauchy, TriangleConsistency) {
  const auto wp = make_packet(0.5, 4.0, kWide);
  const double x2 = cook_constants(wp).x2_norm;
  for (double kappa : {0.5, 1.5}) {
    auto cfg = evolver(PotentialSpec::log_power(kappa, 0.5));
    cfg.tau_max = 40.0;
    const std::vector<double> taus{8.0, 12.0, 18.0, 27.0, 40.0};
    const auto m = cauchy_matrix(wp.state, taus, cfg);
    for (std::size_t i = 0; i < taus.size(); ++i)
      for (std::size_t j = i + 1; j < taus.size(); ++j)
        for (std::size_t k = j + 1; k < taus.size(); ++k) {
          const double slack = 2.0 * (x2 / (2.0 * taus[i]) + x2 / (2.0 * taus[j]));
          EXPECT_LE(m.d[i][k], m.d[i][j] + m.d[j][k] + slack);
          // without the truncation tail the triangle holds up to the splitting error
          EXPECT_LE(m.d[i][k], m.d[i][j] + m.d[j][k] + 1e-6);
        }
    for (std::size_t i = 0; i < taus.size(); ++i)
      for (std::size_t j = 0; j < taus.size(); ++j) EXPECT_GE(m.d[i][j], 0.0);
  }
}

namespace {
struct MapStore : CheckpointStore {
  std::map<std::pair<double, double>, EvolutionState> m;
  int loads = 0, stores = 0;
  std::optional<EvolutionState> load(double a, double b) override {
    auto it = m.find({a, b});
    if (it == m.end()) return std::nullopt;
    ++loads;
    return it->second;
  }
  void store(double a, double b, const EvolutionState& s) override {
    ++stores;
    m.emplace(std::pair{a, b}, s);
  }
};
}  // namespace

TEST(Cauchy, StoreReuseIsIdentical) {
  const auto phi = make_packet(0.5, 4.0, kWide).state;
  auto cfg = evolver(PotentialSpec::log_power(1.0, 0.5));
  cfg.tau_max = 27.0;
  MapStore store;
  const std::vector<double> taus{8.0, 12.0, 18.0, 27.0};
  const auto a = cauchy_matrix(phi, taus, cfg, MdfmMode::full, &store);
  EXPECT_EQ(store.stores, 6);
  const auto b = cauchy_matrix(phi, taus, cfg, MdfmMode::full, &store);
  EXPECT_EQ(b.cache_hits, 6u);
  EXPECT_EQ(a.d, b.d);
  EXPECT_EQ(a.splitting_error, b.splitting_error);
  EXPECT_EQ(a.steps, b.steps);
}

TEST(Cook, EnvelopesHold) {
  const auto wp = make_packet(0.5, 4.0, kWide);
  for (double kappa : {0.0, 0.5, 0.9}) {
    const auto p = PotentialSpec::log_power(kappa, 0.5);
    for (double tau : {5.0, 10.0, 20.0}) {
      const auto s = cook_integrand(wp, tau, p);
      EXPECT_LE(s.term_D / s.bound_D, 1.0) << tau;
      EXPECT_LE(s.term_x2 / s.bound_x2, 1.0) << tau;
      EXPECT_GT(s.term_x2, 0.0);
    }
  }
}

TEST(Cook, FreeHasNoPotentialTerm) {
  const auto wp = make_packet(0.5, 4.0, kWide);
  for (double tau : {5.0, 10.0, 20.0}) EXPECT_EQ(cook_integrand(wp, tau, PotentialSpec::none()).term_V, 0.0);
}

TEST(Cook, GridAndMomentumFormsAgree) {
  const auto wp = make_packet(0.5, 4.0, kWide);
  const auto p = PotentialSpec::log_power(0.9, 0.5);
  for (double tau : {8.0, 15.0, 30.0}) {
    const double grid = std::exp(tau) * cook_integrand(wp, tau, p).term_V;
    EXPECT_NEAR(grid / scaled_potential_term(wp, tau, p), 1.0, 1e-6) << tau;
  }
}

TEST(Cook, ShortRangeSlope) {
  const auto wp = make_packet(0.5, 4.0, kWide);
  std::vector<CookSample> samples;
  for (double tau = 8.0; tau <= 30.0; tau += 1.0)
    samples.push_back(cook_integrand(wp, tau, PotentialSpec::log_power(0.0, 0.5)));
  EXPECT_NEAR(cook_slope(samples, 8.0, 30.0), -2.0, 0.05);
}

// The tau^{-2+kappa} law is asymptotic: on the support |y| ~ tau xi the log factor is
// (tau/2 + log(tau xi)) rather than tau, so the exponent is reached only for tau >> log tau.
TEST(Cook, AsymptoticSlope) {
  const auto wp = make_packet(0.5, 4.0, kWide);
  for (double kappa : {0.5, 0.9}) {
    const auto p = PotentialSpec::log_power(kappa, 0.5);
    std::vector<double> x, y;
    for (double tau = 1e3; tau <= 1e4; tau *= 1.25) {
      x.push_back(tau);
      y.push_back(scaled_potential_term(wp, tau, p));
    }
    EXPECT_NEAR(loglog_slope(x, y), -2.0 + kappa, 0.05) << kappa;
  }
}

TEST(Verdict, RulesOnSyntheticReports) {
  ConvergenceReport r;
  r.checkpoints = {8, 12, 18, 27, 40};
  r.cauchy.taus = r.checkpoints;
  r.cauchy.d.assign(5, std::vector<double>(5, 0.0));
  auto set = [&](std::vector<double> d) {
    for (std::size_t i = 0; i < d.size(); ++i) r.cauchy.d[i][i + 1] = d[i];
  };
  r.x2_norm = 10.0;
  r.gamma0 = 1e-3;
  r.point.kappa = 0.5;
  set({1e-2, 8e-3, 6e-3, 4e-3});
  evaluate_verdict(r);
  EXPECT_EQ(r.verdict, Verdict::convergent) << r.verdict_basis;
  set({1e-2, 1e-2, 1e-2, 1e-2});  // flat: no decay
  evaluate_verdict(r);
  EXPECT_EQ(r.verdict, Verdict::inconclusive);

  r.point.kappa = 1.5;
  r.j1_growth = GrowthClass::polynomial;
  r.j1_curve = {{8, 0, 0}, {40, 1, 2}};
  set({0.1, 0.1, 0.1, 0.1});
  evaluate_verdict(r);
  EXPECT_EQ(r.verdict, Verdict::divergent) << r.verdict_basis;
  set({0.1, 0.1, 1e-6, 0.1});  // dips under the floor
  evaluate_verdict(r);
  EXPECT_EQ(r.verdict, Verdict::inconclusive);
  set({0.1, 0.1, 0.1, 0.1});
  r.j1_curve = {{8, 0, 0}, {40, 2, 1}};  // witness violated
  evaluate_verdict(r);
  EXPECT_EQ(r.verdict, Verdict::inconclusive);
  // deterministic: re-evaluation reproduces the stored basis
  const auto basis = r.verdict_basis;
  evaluate_verdict(r);
  EXPECT_EQ(basis, r.verdict_basis);
}

TEST(Sweep, ThresholdDichotomy) {
  SweepConfig cfg;
  const std::vector<double> kappas{0.0, 0.5, 0.9, 1.0, 1.5};
  const auto reports = threshold_sweep(kappas, {0.5}, cfg);
  ASSERT_EQ(reports.size(), kappas.size());
  for (const auto& r : reports) {
    EXPECT_EQ(r.verdict, expected_verdict(r.point.kappa)) << r.point.kappa << ": " << r.verdict_basis;
    EXPECT_LT(r.cauchy.norm_drift, 1e-11);
    if (r.point.kappa < 1.0) {
      const auto d = r.cauchy.consecutive();
      for (std::size_t k = 1; k < d.size(); ++k) EXPECT_LT(d[k], d[k - 1]);
    }
  }
  EXPECT_EQ(reports[3].j1_growth, GrowthClass::logarithmic);
  EXPECT_EQ(reports[4].j1_growth, GrowthClass::polynomial);
  EXPECT_THROW(threshold_sweep({}, {0.5}, cfg), Error);
}
