#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "critscat/scattering/cauchy.hpp"
#include "critscat/scattering/cook.hpp"
#include "critscat/scattering/jterms.hpp"

namespace critscat {

enum class Verdict { convergent, divergent, inconclusive };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::convergent: return "Convergent";
    case Verdict::divergent: return "Divergent";
    case Verdict::inconclusive: return "Inconclusive";
  }
  return "";
}

/// What the short-/long-range dichotomy predicts for a log power kappa.
inline Verdict expected_verdict(double kappa) { return kappa < 1.0 ? Verdict::convergent : Verdict::divergent; }

struct SweepPoint {
  double kappa = 0.0;
  double amplitude = 0.5;
};

struct SweepConfig {
  GridSpec grid{1000.0, 4096};
  double eps = 0.5;
  double R = 4.0;
  PacketShape shape{};
  int sign = 1;
  std::vector<double> checkpoints{8.0, 12.0, 18.0, 27.0, 40.0};
  /// used instead for kappa in [1, 1.1], where divergence is only logarithmic
  std::vector<double> long_checkpoints{8.0, 12.0, 18.0, 27.0, 40.0, 60.0};
  double dtau = 0.1;
  double tol = 1e-7;
  MdfmMode mode = MdfmMode::full;
  bool grid_core = true;

  const std::vector<double>& schedule_for(double kappa) const {
    return (kappa >= 1.0 && kappa <= 1.1) ? long_checkpoints : checkpoints;
  }
  double tau_max() const {
    return std::max(checkpoints.empty() ? 0.0 : checkpoints.back(),
                    long_checkpoints.empty() ? 0.0 : long_checkpoints.back());
  }

  void validate() const {
    grid.validate();
    for (const auto* s : {&checkpoints, &long_checkpoints}) {
      require(s->size() >= 3, ErrorCode::ConfigError, "a checkpoint schedule needs >= 3 entries");
      require(std::is_sorted(s->begin(), s->end()) && s->front() >= 2.0, ErrorCode::ConfigError,
              "checkpoints must be sorted and >= 2");
    }
    // ballistic support tau R must stay well inside the box
    require(grid.half_width >= 4.0 * R * tau_max(), ErrorCode::ConfigError,
            "grid too small: need L >= 4 R tau_max");
    require(dtau > 0.0 && tol > 0.0, ErrorCode::ConfigError, "dtau and tol must be > 0");
  }
};

struct J1Sample {
  double tau = 0.0;
  double lower = 0.0;
  double numeric = 0.0;
};

struct ConvergenceReport {
  SweepPoint point;
  std::vector<double> checkpoints;
  CauchyMatrix cauchy;
  std::vector<CookSample> cook_samples;
  double cook_slope = 0.0;
  std::vector<J1Sample> j1_curve;
  std::optional<JTermAccount> witness;  ///< long range only
  GrowthClass j1_growth = GrowthClass::bounded;
  double j1_beta = 0.0;
  double x2_norm = 0.0;
  double gamma0 = 0.0;
  // derived by evaluate_verdict
  double tol_conv = 0.0;
  double tail_slope = 0.0;
  std::vector<double> floors;
  Verdict verdict = Verdict::inconclusive;
  std::string verdict_basis;

  double final_cauchy() const { return cauchy.consecutive().back(); }
};

namespace detail {
inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}
}  // namespace detail

/// Verdict rules; a deterministic function of the stored report data.
inline void evaluate_verdict(ConvergenceReport& r) {
  using detail::fmt;
  const double kappa = r.point.kappa;
  const auto d = r.cauchy.consecutive();
  const auto& taus = r.checkpoints;
  std::vector<double> starts(taus.begin(), taus.end() - 1);

  r.tol_conv = 10.0 * (r.cauchy.splitting_error + r.x2_norm / (2.0 * taus.back()));
  r.floors.clear();
  for (std::size_t k = 0; k + 1 < taus.size(); ++k)
    r.floors.push_back(0.5 * r.gamma0 * tau_power_integral(kappa, taus[k], taus[k + 1]));

  bool positive = true;
  for (double v : d) positive = positive && v > 0.0;
  r.tail_slope = positive ? loglog_slope(starts, d) : std::nan("");

  std::string b;
  if (kappa < 1.0) {
    const double need = -(1.0 - kappa) + 0.15;
    const bool slope_ok = positive && r.tail_slope <= need;
    const bool decreasing = d.size() < 2 || d[d.size() - 1] < d[d.size() - 2];
    const bool small = d.back() < r.tol_conv;
    b = "short range (kappa < 1); tail slope " + fmt("%.4f", r.tail_slope) + (slope_ok ? " <= " : " > ") +
        fmt("%.4f", need) + "; last step " + (decreasing ? "decreasing" : "not decreasing") +
        "; final difference " + fmt("%.6e", d.back()) + (small ? " < " : " >= ") + "tol_conv " +
        fmt("%.6e", r.tol_conv);
    r.verdict = slope_ok && decreasing && small ? Verdict::convergent : Verdict::inconclusive;
  } else {
    bool above = true;
    for (std::size_t k = 0; k < d.size(); ++k) above = above && d[k] >= r.floors[k];
    bool dominated = true;
    for (const auto& s : r.j1_curve) dominated = dominated && s.numeric >= s.lower;
    const bool diverges = r.j1_growth != GrowthClass::bounded;
    b = "long range (kappa >= 1); j1_lower growth " + std::string(to_string(r.j1_growth)) +
        " (beta " + fmt("%.4f", r.j1_beta) + "); min d/floor " ;
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < d.size(); ++k) ratio = std::min(ratio, d[k] / r.floors[k]);
    b += fmt("%.4f", ratio) + (above ? " >= 1" : " < 1") + "; j1_numeric >= j1_lower " +
         (dominated ? "everywhere" : "violated");
    r.verdict = above && diverges && dominated ? Verdict::divergent : Verdict::inconclusive;
  }
  r.verdict_basis = b;
}

/// One sweep point: Cauchy matrix, Cook samples, J1 curve, witness and verdict.
inline ConvergenceReport run_sweep_point(const SweepPoint& pt, const SweepConfig& cfg,
                                         CheckpointStore* cache = nullptr) {
  cfg.validate();
  const auto& taus = cfg.schedule_for(pt.kappa);
  const WavePacket phi = make_packet(cfg.eps, cfg.R, cfg.grid, cfg.shape);
  const PotentialSpec pot = PotentialSpec::log_power(pt.kappa, pt.amplitude, cfg.sign);

  ReducedEvolverConfig ecfg;
  ecfg.potential = pot;
  ecfg.grid = cfg.grid;
  ecfg.dtau = cfg.dtau;
  ecfg.tol = cfg.tol;
  ecfg.grid_core = cfg.grid_core;
  ecfg.checkpoints = taus;
  ecfg.tau_max = taus.back();
  ecfg.validate();

  ConvergenceReport r;
  r.point = pt;
  r.checkpoints = taus;
  r.cauchy = cauchy_matrix(phi.state, taus, ecfg, cfg.mode, cache);
  for (double t : taus) r.cook_samples.push_back(cook_integrand(phi, t, pot));
  r.cook_slope = cook_slope(r.cook_samples, taus.front(), taus.back());

  const JConstants jc = j_constants(phi, pot);
  r.gamma0 = jc.gamma0;
  r.x2_norm = cook_constants(phi).x2_norm;
  std::vector<double> lower;
  double acc = 0.0;
  for (std::size_t k = 0; k < taus.size(); ++k) {
    if (k > 0) acc += j1_numeric(phi, pot, taus[k - 1], taus[k]);
    const double lo = j1_lower_bound(jc, taus.front(), taus[k]);
    r.j1_curve.push_back({taus[k], lo, acc});
    lower.push_back(lo);
  }
  r.j1_growth = growth_class(taus, lower, &r.j1_beta);
  if (pt.kappa >= 1.0) r.witness = j_terms(phi, pot, taus.front(), taus.back());
  evaluate_verdict(r);
  return r;
}

inline std::vector<ConvergenceReport> threshold_sweep(const std::vector<double>& kappas,
                                                      const std::vector<double>& amplitudes,
                                                      const SweepConfig& cfg) {
  require(!kappas.empty(), ErrorCode::ConfigError, "empty sweep list");
  require(amplitudes.size() == kappas.size() || amplitudes.size() == 1, ErrorCode::ConfigError,
          "amplitudes must match kappas (or be a single value)");
  std::vector<ConvergenceReport> out;
  for (std::size_t i = 0; i < kappas.size(); ++i) {
    require(kappas[i] >= 0.0, ErrorCode::ConfigError, "kappa must be >= 0");
    out.push_back(run_sweep_point({kappas[i], amplitudes.size() == 1 ? amplitudes[0] : amplitudes[i]}, cfg));
  }
  return out;
}

}  // namespace critscat
