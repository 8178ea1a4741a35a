#pragma once

#include <array>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "critscat/model/packet.hpp"
#include "critscat/model/potential.hpp"
#include "critscat/scattering/cook.hpp"
#include "critscat/scattering/integrals.hpp"

namespace critscat {

inline constexpr std::array<double, 3> kDeltaProbes{0.1, 0.01, 0.001};

struct JConstants {
  double C_L = 0.0, C_tilde_L = 0.0, R = 0.0, eps = 0.0, kappa = 0.0;
  double gamma0 = 0.0;  ///< C_L 2^{-2-kappa} R^-2, the delta -> 0 limit of gamma
};

struct DeltaProbe {
  double delta = 0.0;
  double j2_envelope = 0.0;  ///< delta C~ 4 eps^-2 int tau^{-2+kappa}
  double gamma = 0.0;        ///< gamma0 - 4 delta C~ eps^-2 (may be negative)
};

struct JTermAccount {
  double tau1 = 0.0, tau2 = 0.0;
  double j1_lower = 0.0;
  double j1_numeric = 0.0;
  double j3_bound = 0.0;  ///< C (log 2)^-1 ||x^2 phi|| ||phi||, C = 1/2
  std::vector<DeltaProbe> probes;
  double delta_critical = 0.0;  ///< largest delta keeping gamma > 0
  JConstants constants;
};

inline JConstants j_constants(const WavePacket& phi, const PotentialSpec& p) {
  JConstants c;
  c.C_L = p.amplitude_low;
  c.C_tilde_L = p.amplitude_high * p.modulation.sup();
  c.R = phi.R;
  c.eps = phi.eps;
  c.kappa = p.kappa;
  c.gamma0 = c.C_L * std::pow(2.0, -2.0 - c.kappa) / (c.R * c.R);
  return c;
}

/// 2^{-2-kappa} R^-2 C_L ||phi||^2 int_{tau1}^{tau2} tau^{-2+kappa} d tau (phi normalized).
inline double j1_lower_bound(const JConstants& c, double tau1, double tau2) {
  return c.gamma0 * tau_power_integral(c.kappa, tau1, tau2);
}

/// int_{tau1}^{tau2} int W(tau, tau xi) |phi^(xi)|^2 d xi d tau: J_1 with U(t)* x U(t) = tau p.
inline double j1_numeric(const WavePacket& phi, const PotentialSpec& p, double tau1, double tau2) {
  if (tau2 <= tau1 || p.is_zero()) return 0.0;
  const auto mom = to_momentum(phi.state);
  const auto& g = phi.grid();
  std::vector<double> ks, weights;
  for (std::size_t m = 0; m < g.points; ++m) {
    const double w = std::norm(mom.values[m]) * g.dk();
    if (w > 1e-30) {
      ks.push_back(g.k(m));
      weights.push_back(w);
    }
  }
  std::vector<double> xs(ks.size()), wv(ks.size());
  auto inner = [&](double tau) {
    for (std::size_t i = 0; i < ks.size(); ++i) xs[i] = tau * ks[i];
    p.reduced_row(tau, xs, wv);
    double s = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) s += wv[i] * weights[i];
    return s;
  };
  using boost::math::quadrature::gauss_kronrod;
  return std::abs(gauss_kronrod<double, 31>::integrate(inner, tau1, tau2, 12, 1e-12));
}

inline JTermAccount j_terms(const WavePacket& phi, const PotentialSpec& p, double tau1, double tau2) {
  require(!p.is_zero() && p.kappa >= 1.0, ErrorCode::ShortRangeInput,
          "the divergence witness needs a long-range potential (kappa >= 1)");
  require(tau1 >= 1.0 && tau2 >= tau1, ErrorCode::InvalidArgument, "j_terms needs 1 <= tau1 <= tau2");
  JTermAccount a;
  a.tau1 = tau1;
  a.tau2 = tau2;
  a.constants = j_constants(phi, p);
  const auto& c = a.constants;
  const double I = tau_power_integral(c.kappa, tau1, tau2);
  a.j1_lower = c.gamma0 * I;
  a.j1_numeric = j1_numeric(phi, p, tau1, tau2);
  a.j3_bound = 0.5 * cook_constants(phi).x2_norm / std::log(2.0);
  const double per_delta = 4.0 * c.C_tilde_L / (c.eps * c.eps);
  for (double d : kDeltaProbes) a.probes.push_back({d, d * per_delta * I, c.gamma0 - d * per_delta});
  a.delta_critical = c.gamma0 / per_delta;
  return a;
}

enum class GrowthClass { bounded, logarithmic, polynomial };

inline std::string_view to_string(GrowthClass g) {
  switch (g) {
    case GrowthClass::bounded: return "bounded";
    case GrowthClass::logarithmic: return "logarithmic";
    case GrowthClass::polynomial: return "polynomial";
  }
  return "";
}

/**
 * Classifies a cumulative curve J(tau_k) by the exponent beta of its increments per unit
 * log tau, dJ / d log tau ~ tau^beta: beta ~ 0 is log growth, beta > 0 polynomial,
 * beta < 0 convergent.
 */
inline GrowthClass growth_class(const std::vector<double>& taus, const std::vector<double>& curve,
                                double* beta_out = nullptr) {
  require(taus.size() == curve.size() && taus.size() >= 3, ErrorCode::InvalidArgument,
          "growth_class needs >= 3 samples");
  std::vector<double> mid, rate;
  for (std::size_t i = 0; i + 1 < taus.size(); ++i) {
    const double dj = curve[i + 1] - curve[i];
    const double dl = std::log(taus[i + 1] / taus[i]);
    if (dj > 0.0 && dl > 0.0) {
      mid.push_back(std::sqrt(taus[i] * taus[i + 1]));
      rate.push_back(dj / dl);
    }
  }
  require(mid.size() >= 2, ErrorCode::InvalidArgument, "growth_class: curve is not increasing");
  const double beta = loglog_slope(mid, rate);
  if (beta_out) *beta_out = beta;
  if (std::abs(beta) < 0.05) return GrowthClass::logarithmic;
  return beta > 0.0 ? GrowthClass::polynomial : GrowthClass::bounded;
}

}  // namespace critscat
