#pragma once

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <string>

#include "critscat/io/csv.hpp"
#include "critscat/scattering/sweep.hpp"

namespace critscat::io {

using Json = nlohmann::ordered_json;

inline Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json json_list(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

/// JSON text with a trailing newline; nlohmann prints doubles in shortest round-trip form.
inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline void write_json(const std::filesystem::path& p, const Json& j) { CsvTable::write_text(p, dump(j)); }

inline Json provenance(const std::string& config_hash) {
  Json j;
  j["config_hash"] = config_hash;
  j["tool_version"] = std::string(kToolVersion);
  return j;
}

inline Metadata csv_meta(const std::string& config_hash, const std::string& what) {
  return {{"config_hash", config_hash}, {"tool_version", std::string(kToolVersion)}, {"content", what}};
}

inline Json report_json(const ConvergenceReport& r) {
  Json j;
  j["kappa"] = r.point.kappa;
  j["amplitude"] = r.point.amplitude;
  j["range_class"] = r.point.kappa < 1.0 ? "short" : "long";
  j["checkpoints"] = json_list(r.checkpoints);
  Json c;
  Json rows = Json::array();
  for (const auto& row : r.cauchy.d) rows.push_back(json_list(row));
  c["d"] = rows;
  c["consecutive"] = json_list(r.cauchy.consecutive());
  c["splitting_error"] = number(r.cauchy.splitting_error);
  c["norm_drift"] = number(r.cauchy.norm_drift);
  c["steps"] = r.cauchy.steps;
  j["cauchy"] = c;
  j["cook_slope"] = number(r.cook_slope);
  Json jc = Json::array();
  for (const auto& s : r.j1_curve) jc.push_back({{"tau", s.tau}, {"j1_lower", s.lower}, {"j1_numeric", s.numeric}});
  j["j1_curve"] = jc;
  j["j1_growth_class"] = std::string(to_string(r.j1_growth));
  j["j1_growth_beta"] = number(r.j1_beta);
  j["x2_norm"] = number(r.x2_norm);
  j["gamma0"] = number(r.gamma0);
  if (r.witness) {
    const auto& w = *r.witness;
    Json wj;
    wj["tau1"] = w.tau1;
    wj["tau2"] = w.tau2;
    wj["j1_lower"] = number(w.j1_lower);
    wj["j1_numeric"] = number(w.j1_numeric);
    wj["j3_bound"] = number(w.j3_bound);
    wj["note"] = "j3 budget is a bound assuming existence, with ||W phi|| replaced by ||phi|| = 1";
    Json probes = Json::array();
    for (const auto& p : w.probes)
      probes.push_back({{"delta", p.delta}, {"j2_envelope", number(p.j2_envelope)}, {"gamma", number(p.gamma)}});
    wj["delta_probes"] = probes;
    wj["delta_critical"] = number(w.delta_critical);
    wj["constants"] = {{"C_L", w.constants.C_L},     {"C_tilde_L", w.constants.C_tilde_L},
                       {"R", w.constants.R},         {"eps", w.constants.eps},
                       {"kappa", w.constants.kappa}, {"gamma0", w.constants.gamma0}};
    j["witness"] = wj;
  } else {
    j["witness"] = nullptr;
  }
  j["tol_conv"] = number(r.tol_conv);
  j["tail_slope"] = number(r.tail_slope);
  j["floors"] = json_list(r.floors);
  j["verdict"] = std::string(to_string(r.verdict));
  j["expected"] = std::string(to_string(expected_verdict(r.point.kappa)));
  j["verdict_basis"] = r.verdict_basis;
  return j;
}

inline CsvTable cauchy_table(const ConvergenceReport& r, const std::string& hash) {
  CsvTable t({"tau_i", "tau_j", "d"}, csv_meta(hash, "Cauchy differences d(tau_i, tau_j); tau = log t"));
  for (std::size_t i = 0; i < r.checkpoints.size(); ++i)
    for (std::size_t j = i + 1; j < r.checkpoints.size(); ++j)
      t.add({r.checkpoints[i], r.checkpoints[j], r.cauchy.d[i][j]});
  return t;
}

inline CsvTable cook_table(const std::vector<CookSample>& samples, const std::string& hash) {
  CsvTable t({"tau", "term_V", "term_D", "term_x2", "bound_V", "bound_D", "bound_x2", "t_term_V"},
             csv_meta(hash, "Cook integrand norms at t = e^tau; t_term_V = e^tau term_V"));
  for (const auto& s : samples)
    t.add({s.tau, s.term_V, s.term_D, s.term_x2, s.bound_V, s.bound_D, s.bound_x2, std::exp(s.tau) * s.term_V});
  return t;
}

inline CsvTable j1_table(const ConvergenceReport& r, const std::string& hash) {
  CsvTable t({"tau", "j1_lower", "j1_numeric"},
             csv_meta(hash, "J1 partial sums from the first checkpoint; tau = log t"));
  for (const auto& s : r.j1_curve) t.add({s.tau, s.lower, s.numeric});
  return t;
}

}  // namespace critscat::io
