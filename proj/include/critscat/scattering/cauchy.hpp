#pragma once

#include <optional>
#include <vector>

#include "critscat/evolution/reduced.hpp"
#include "critscat/model/packet.hpp"

namespace critscat {

/// Persistence hook for evolved checkpoint states, keyed by (tau_from, tau_to).
class CheckpointStore {
 public:
  virtual ~CheckpointStore() = default;
  virtual std::optional<EvolutionState> load(double tau_from, double tau_to) = 0;
  virtual void store(double tau_from, double tau_to, const EvolutionState& s) = 0;
};

/// ||U(e^{tau2}) phi - U_S(e^{tau2}, e^{tau1}) U(e^{tau1}) phi||
inline double cauchy_difference(const SpectralState& phi, double tau1, double tau2,
                                const ReducedEvolverConfig& cfg, MdfmMode mode = MdfmMode::full) {
  require(tau1 >= 1.0 && tau1 <= tau2 && tau2 <= cfg.tau_max, ErrorCode::InvalidArgument,
          "cauchy_difference needs 1 <= tau1 <= tau2 <= tau_max");
  if (tau1 == tau2) return 0.0;
  const auto s = evolve_reduced(EvolutionState{mdfm_apply_tau(phi, tau1, mode), tau1}, tau2, cfg);
  return l2_distance(mdfm_apply_tau(phi, tau2, mode), s.state);
}

struct CauchyMatrix {
  std::vector<double> taus;
  std::vector<std::vector<double>> d;  ///< d[i][j] for j > i; zero on and below the diagonal
  double splitting_error = 0.0;        ///< largest accumulated Richardson estimate
  double norm_drift = 0.0;
  std::size_t steps = 0;
  std::size_t cache_hits = 0;

  std::vector<double> consecutive() const {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < taus.size(); ++i) out.push_back(d[i][i + 1]);
    return out;
  }
};

/**
 * All pairwise differences over the checkpoints: one evolution per starting checkpoint,
 * recorded at every later checkpoint.
 */
inline CauchyMatrix cauchy_matrix(const SpectralState& phi, const std::vector<double>& taus,
                                  const ReducedEvolverConfig& cfg, MdfmMode mode = MdfmMode::full,
                                  CheckpointStore* cache = nullptr) {
  require(taus.size() >= 2 && std::is_sorted(taus.begin(), taus.end()), ErrorCode::InvalidArgument,
          "cauchy_matrix needs >= 2 sorted checkpoints");
  require(taus.front() >= 1.0 && taus.back() <= cfg.tau_max, ErrorCode::InvalidArgument,
          "checkpoints outside [1, tau_max]");
  CauchyMatrix m;
  m.taus = taus;
  const std::size_t n = taus.size();
  m.d.assign(n, std::vector<double>(n, 0.0));
  std::vector<SpectralState> ref;
  ref.reserve(n);
  for (double t : taus) ref.push_back(mdfm_apply_tau(phi, t, mode));

  for (std::size_t i = 0; i + 1 < n; ++i) {
    EvolutionState s{ref[i], taus[i]};
    for (std::size_t j = i + 1; j < n; ++j) {
      std::optional<EvolutionState> hit = cache ? cache->load(taus[i], taus[j]) : std::nullopt;
      if (hit) {
        s = std::move(*hit);
        ++m.cache_hits;
      } else {
        s = evolve_reduced(std::move(s), taus[j], cfg);
        if (cache) cache->store(taus[i], taus[j], s);
      }
      m.d[i][j] = l2_distance(ref[j], s.state);
      m.splitting_error = std::max(m.splitting_error, s.error_estimate);
      m.norm_drift = std::max(m.norm_drift, s.norm_drift);
    }
    m.steps += s.steps_taken;
  }
  return m;
}

}  // namespace critscat
