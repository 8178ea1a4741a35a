#pragma once

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "critscat/classical/zeta.hpp"
#include "critscat/io/format.hpp"
#include "critscat/scattering/sweep.hpp"

namespace critscat::io {

struct ZetaSection {
  double t_max = std::exp(10.0);
  double fit_lo = std::exp(5.0);
  double fit_hi = std::exp(10.0);
  double tol = 1e-12;
  std::size_t samples = 400;
};

struct CookSection {
  double tau_min = 5.0;
  double tau_max = 30.0;
  double tau_step = 1.0;
  double fit_lo = 8.0;
  double fit_hi = 30.0;
};

/// Everything one run needs. Output location and caching do not enter the hash.
struct ExperimentConfig {
  CoefficientSchedule schedule{0.25};
  ZetaSection zeta;
  PotentialSpec potential = PotentialSpec::log_power(0.5, 0.5);
  std::vector<SweepPoint> sweep{{0.0, 0.5}, {0.5, 0.5}, {0.9, 0.5}, {1.0, 0.5}, {1.5, 0.5}};
  SweepConfig run;  ///< grid, packet and evolution settings shared by sweep and cook
  CookSection cook;
  std::string output_dir = "out";
  bool cache = true;
  std::string cache_dir;  ///< empty: <output_dir>/cache

  std::filesystem::path cache_path() const {
    return cache_dir.empty() ? std::filesystem::path(output_dir) / "cache" : std::filesystem::path(cache_dir);
  }

  /// Cross-checks the sections as a whole.
  void validate() const {
    potential.validate();
    run.validate();
    require(!sweep.empty(), ErrorCode::ConfigError, "sweep: empty kappa list");
    for (const auto& p : sweep) {
      require(std::isfinite(p.kappa) && p.kappa >= 0.0, ErrorCode::ConfigError, "sweep: kappa must be >= 0");
      require(std::isfinite(p.amplitude) && p.amplitude > 0.0, ErrorCode::ConfigError,
              "sweep: amplitude must be > 0");
    }
    // Nyquist margin for the packet annulus
    try {
      (void)make_packet(run.eps, run.R, run.grid, run.shape);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, std::string("packet: ") + e.what());
    }
    require(cook.tau_min >= 2.0 && cook.tau_max > cook.tau_min && cook.tau_step > 0.0, ErrorCode::ConfigError,
            "cook: need 2 <= tau_min < tau_max and tau_step > 0");
    require(cook.fit_lo < cook.fit_hi, ErrorCode::ConfigError, "cook: fit_lo must be < fit_hi");
    require(zeta.t_max >= schedule.r0() && zeta.fit_hi <= zeta.t_max, ErrorCode::ConfigError,
            "zeta: need r0 <= fit_hi <= t_max");
    require(zeta.samples >= 2, ErrorCode::ConfigError, "zeta: samples must be >= 2");
  }

  /// Stable text form of every result-relevant field; input of the config hash.
  std::string canonical() const {
    std::string s;
    auto kv = [&](const std::string& k, const std::string& v) { s += k + "=" + v + "\n"; };
    auto num = [&](const std::string& k, double v) { kv(k, format_double(v)); };
    num("schedule.sigma", schedule.sigma());
    num("schedule.r0", schedule.r0());
    num("schedule.mass", schedule.mass());
    kv("schedule.interior", std::string(to_string(schedule.interior())));
    num("zeta.t_max", zeta.t_max);
    num("zeta.fit_lo", zeta.fit_lo);
    num("zeta.fit_hi", zeta.fit_hi);
    num("zeta.tol", zeta.tol);
    kv("zeta.samples", std::to_string(zeta.samples));
    kv("potential.kind", potential.is_zero() ? "none" : "log_power");
    num("potential.kappa", potential.kappa);
    num("potential.amplitude", potential.amplitude_low);
    num("potential.amplitude_high", potential.amplitude_high);
    kv("potential.sign", std::to_string(potential.sign));
    kv("potential.modulation", potential.modulation.kind == TimeModulation::Kind::constant ? "constant" : "cosine");
    num("potential.modulation.depth", potential.modulation.depth);
    num("potential.modulation.frequency", potential.modulation.frequency);
    for (std::size_t i = 0; i < sweep.size(); ++i)
      kv("sweep." + std::to_string(i), format_double(sweep[i].kappa) + "," + format_double(sweep[i].amplitude));
    s += run_canonical(run);
    num("cook.tau_min", cook.tau_min);
    num("cook.tau_max", cook.tau_max);
    num("cook.tau_step", cook.tau_step);
    num("cook.fit_lo", cook.fit_lo);
    num("cook.fit_hi", cook.fit_hi);
    return s;
  }

  static std::string run_canonical(const SweepConfig& r) {
    std::string s;
    auto kv = [&](const std::string& k, const std::string& v) { s += k + "=" + v + "\n"; };
    auto list = [&](const std::string& k, const std::vector<double>& v) {
      std::string t;
      for (double x : v) t += (t.empty() ? "" : ",") + format_double(x);
      kv(k, t);
    };
    kv("grid.half_width", format_double(r.grid.half_width));
    kv("grid.points", std::to_string(r.grid.points));
    kv("packet.eps", format_double(r.eps));
    kv("packet.R", format_double(r.R));
    kv("packet.profile", std::string(to_string(r.shape.profile)));
    kv("packet.lobes", std::string(to_string(r.shape.lobes)));
    kv("packet.sigmas", format_double(r.shape.sigmas));
    kv("potential.sign", std::to_string(r.sign));
    list("evolution.checkpoints", r.checkpoints);
    list("evolution.long_checkpoints", r.long_checkpoints);
    kv("evolution.dtau", format_double(r.dtau));
    kv("evolution.tol", format_double(r.tol));
    kv("evolution.mode", r.mode == MdfmMode::full ? "full" : "truncated");
    kv("evolution.grid_core", r.grid_core ? "true" : "false");
    return s;
  }

  std::string hash() const { return hex64(fnv1a(canonical())); }

  /// Cache key of one sweep point: everything upstream of its evolutions.
  std::string point_key(const SweepPoint& p) const {
    return hex64(fnv1a(run_canonical(run) + "kappa=" + format_double(p.kappa) +
                       "\namplitude=" + format_double(p.amplitude) + "\nversion=" + std::string(kToolVersion) + "\n"));
  }
};

namespace detail {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Node& n, const std::string& field, const std::string& what) const {
    std::string where = source_;
    if (n.IsDefined() && n.Mark().line >= 0)
      where += ":" + std::to_string(n.Mark().line + 1) + ":" + std::to_string(n.Mark().column + 1);
    throw Error(ErrorCode::ConfigError, where + ": field '" + field + "': " + what);
  }

  void keys(const YAML::Node& n, const std::string& prefix, std::initializer_list<std::string_view> allowed) const {
    if (!n.IsDefined() || n.IsNull()) return;
    if (!n.IsMap()) fail(n, prefix, "expected a mapping");
    for (const auto& kv : n) {
      const auto k = kv.first.as<std::string>();
      bool ok = false;
      for (auto a : allowed) ok = ok || a == k;
      if (!ok) fail(kv.first, prefix.empty() ? k : prefix + "." + k, "unknown key");
    }
  }

  double number(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected a number");
    const std::string s = n.Scalar();
    double v = 0.0;
    if (!parse_double(s, v)) {
      if (auto e = exp_form(s)) return *e;
      fail(n, field, "not a decimal number: '" + s + "'");
    }
    if (!std::isfinite(v)) fail(n, field, "must be finite");
    return v;
  }

  long long integer(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected an integer");
    long long v = 0;
    if (!parse_int(n.Scalar(), v)) fail(n, field, "not an integer: '" + n.Scalar() + "'");
    return v;
  }

  bool boolean(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected true/false");
    const auto& s = n.Scalar();
    if (s == "true" || s == "on" || s == "yes") return true;
    if (s == "false" || s == "off" || s == "no") return false;
    fail(n, field, "expected true/false, got '" + s + "'");
  }

  std::string text(const YAML::Node& n, const std::string& field) const {
    if (!n.IsScalar()) fail(n, field, "expected a string");
    return n.Scalar();
  }

  std::vector<double> numbers(const YAML::Node& n, const std::string& field) const {
    std::vector<double> out;
    if (n.IsScalar()) return {number(n, field)};
    if (!n.IsSequence()) fail(n, field, "expected a list of numbers");
    for (std::size_t i = 0; i < n.size(); ++i) out.push_back(number(n[i], field + "[" + std::to_string(i) + "]"));
    return out;
  }

  template <class F>
  void opt(const YAML::Node& parent, const char* key, const std::string& prefix, F&& f) const {
    const auto n = parent[key];
    if (n.IsDefined() && !n.IsNull()) f(n, prefix + key);
  }

  /// Accepts "e^5" / "exp(5)" for times given in logarithmic form.
  static std::optional<double> exp_form(const std::string& s) {
    std::string_view v = s;
    if (v.starts_with("e^")) v.remove_prefix(2);
    else if (v.starts_with("exp(") && v.ends_with(")")) v = v.substr(4, v.size() - 5);
    else return std::nullopt;
    double x = 0.0;
    if (!parse_double(v, x)) return std::nullopt;
    return std::exp(x);
  }

 private:
  std::string source_;
};

/// Wraps a validation error with the section it came from.
template <class F>
void section(const Reader& r, const YAML::Node& n, const std::string& name, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigError) throw;
    r.fail(n, name, e.what());
  }
}

}  // namespace detail

/**
 * Parses a YAML experiment config. Missing sections keep their defaults; unknown keys and
 * malformed numbers are rejected with file:line:column diagnostics.
 */
inline ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>") {
  detail::Reader r(source);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::ConfigError, source + ":" + std::to_string(e.mark.line + 1) + ":" +
                                            std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  ExperimentConfig c;
  if (!root.IsDefined() || root.IsNull()) {
    c.validate();
    return c;
  }
  r.keys(root, "", {"schedule", "zeta", "potential", "sweep", "grid", "packet", "evolution", "cook", "output"});

  if (auto n = root["schedule"]) {
    r.keys(n, "schedule", {"sigma", "r0", "mass", "interior"});
    double sigma = c.schedule.sigma(), r0 = c.schedule.r0(), mass = c.schedule.mass();
    auto interior = c.schedule.interior();
    r.opt(n, "sigma", "schedule.", [&](auto v, auto f) { sigma = r.number(v, f); });
    r.opt(n, "r0", "schedule.", [&](auto v, auto f) { r0 = r.number(v, f); });
    r.opt(n, "mass", "schedule.", [&](auto v, auto f) { mass = r.number(v, f); });
    r.opt(n, "interior", "schedule.", [&](auto v, auto f) {
      try {
        interior = parse_interior(r.text(v, f));
      } catch (const Error& e) {
        r.fail(v, f, e.what());
      }
    });
    detail::section(r, n, "schedule", [&] { c.schedule = CoefficientSchedule(sigma, r0, mass, interior); });
  }

  if (auto n = root["zeta"]) {
    r.keys(n, "zeta", {"t_max", "fit_lo", "fit_hi", "tol", "samples"});
    r.opt(n, "t_max", "zeta.", [&](auto v, auto f) { c.zeta.t_max = r.number(v, f); });
    r.opt(n, "fit_lo", "zeta.", [&](auto v, auto f) { c.zeta.fit_lo = r.number(v, f); });
    r.opt(n, "fit_hi", "zeta.", [&](auto v, auto f) { c.zeta.fit_hi = r.number(v, f); });
    r.opt(n, "tol", "zeta.", [&](auto v, auto f) { c.zeta.tol = r.number(v, f); });
    r.opt(n, "samples", "zeta.", [&](auto v, auto f) {
      const auto k = r.integer(v, f);
      if (k < 2) r.fail(v, f, "must be >= 2");
      c.zeta.samples = static_cast<std::size_t>(k);
    });
  }

  if (auto n = root["potential"]) {
    r.keys(n, "potential", {"kind", "kappa", "amplitude", "amplitude_high", "sign", "modulation"});
    PotentialSpec p = c.potential;
    bool high_given = false;
    r.opt(n, "kind", "potential.", [&](auto v, auto f) {
      const auto k = r.text(v, f);
      if (k == "none") p = PotentialSpec::none();
      else if (k != "log_power") r.fail(v, f, "expected log_power or none");
    });
    if (!p.is_zero()) {
      r.opt(n, "kappa", "potential.", [&](auto v, auto f) { p.kappa = r.number(v, f); });
      r.opt(n, "amplitude", "potential.", [&](auto v, auto f) { p.amplitude_low = r.number(v, f); });
      r.opt(n, "amplitude_high", "potential.", [&](auto v, auto f) {
        p.amplitude_high = r.number(v, f);
        high_given = true;
      });
      r.opt(n, "sign", "potential.", [&](auto v, auto f) {
        const auto s = r.integer(v, f);
        if (s != 1 && s != -1) r.fail(v, f, "must be +1 or -1");
        p.sign = static_cast<int>(s);
      });
      if (auto m = n["modulation"]) {
        r.keys(m, "potential.modulation", {"kind", "depth", "frequency"});
        r.opt(m, "kind", "potential.modulation.", [&](auto v, auto f) {
          const auto k = r.text(v, f);
          if (k == "constant") p.modulation.kind = TimeModulation::Kind::constant;
          else if (k == "cosine") p.modulation.kind = TimeModulation::Kind::cosine;
          else r.fail(v, f, "expected constant or cosine");
        });
        r.opt(m, "depth", "potential.modulation.", [&](auto v, auto f) { p.modulation.depth = r.number(v, f); });
        r.opt(m, "frequency", "potential.modulation.",
              [&](auto v, auto f) { p.modulation.frequency = r.number(v, f); });
      }
      if (!high_given) p.amplitude_high = 2.0 * p.amplitude_low * p.modulation.sup();
    }
    detail::section(r, n, "potential", [&] { p.validate(); });
    c.potential = p;
    c.run.sign = p.is_zero() ? 1 : p.sign;
  }

  if (auto n = root["sweep"]) {
    r.keys(n, "sweep", {"kappas", "amplitudes"});
    std::vector<double> kappas, amps{0.5};
    r.opt(n, "kappas", "sweep.", [&](auto v, auto f) { kappas = r.numbers(v, f); });
    r.opt(n, "amplitudes", "sweep.", [&](auto v, auto f) { amps = r.numbers(v, f); });
    if (kappas.empty()) r.fail(n["kappas"].IsDefined() ? n["kappas"] : n, "sweep.kappas", "empty sweep list");
    if (amps.size() != 1 && amps.size() != kappas.size())
      r.fail(n["amplitudes"], "sweep.amplitudes", "must have one entry or one per kappa");
    c.sweep.clear();
    for (std::size_t i = 0; i < kappas.size(); ++i) c.sweep.push_back({kappas[i], amps.size() == 1 ? amps[0] : amps[i]});
  }

  if (auto n = root["grid"]) {
    r.keys(n, "grid", {"dimension", "half_width", "points"});
    GridSpec g = c.run.grid;
    r.opt(n, "dimension", "grid.", [&](auto v, auto f) { g.dimension = static_cast<int>(r.integer(v, f)); });
    r.opt(n, "half_width", "grid.", [&](auto v, auto f) { g.half_width = r.number(v, f); });
    r.opt(n, "points", "grid.", [&](auto v, auto f) {
      const auto k = r.integer(v, f);
      if (k <= 0) r.fail(v, f, "must be positive");
      g.points = static_cast<std::size_t>(k);
    });
    detail::section(r, n, "grid", [&] { g.validate(); });
    c.run.grid = g;
  }

  if (auto n = root["packet"]) {
    r.keys(n, "packet", {"eps", "R", "profile", "lobes", "sigmas"});
    r.opt(n, "eps", "packet.", [&](auto v, auto f) { c.run.eps = r.number(v, f); });
    r.opt(n, "R", "packet.", [&](auto v, auto f) { c.run.R = r.number(v, f); });
    r.opt(n, "sigmas", "packet.", [&](auto v, auto f) { c.run.shape.sigmas = r.number(v, f); });
    r.opt(n, "profile", "packet.", [&](auto v, auto f) {
      try {
        c.run.shape.profile = parse_profile(r.text(v, f));
      } catch (const Error& e) {
        r.fail(v, f, e.what());
      }
    });
    r.opt(n, "lobes", "packet.", [&](auto v, auto f) {
      try {
        c.run.shape.lobes = parse_lobes(r.text(v, f));
      } catch (const Error& e) {
        r.fail(v, f, e.what());
      }
    });
  }

  if (auto n = root["evolution"]) {
    r.keys(n, "evolution", {"checkpoints", "long_checkpoints", "dtau", "tol", "mode", "grid_core"});
    r.opt(n, "checkpoints", "evolution.", [&](auto v, auto f) { c.run.checkpoints = r.numbers(v, f); });
    r.opt(n, "long_checkpoints", "evolution.", [&](auto v, auto f) { c.run.long_checkpoints = r.numbers(v, f); });
    r.opt(n, "dtau", "evolution.", [&](auto v, auto f) { c.run.dtau = r.number(v, f); });
    r.opt(n, "tol", "evolution.", [&](auto v, auto f) { c.run.tol = r.number(v, f); });
    r.opt(n, "grid_core", "evolution.", [&](auto v, auto f) { c.run.grid_core = r.boolean(v, f); });
    r.opt(n, "mode", "evolution.", [&](auto v, auto f) {
      const auto m = r.text(v, f);
      if (m == "full") c.run.mode = MdfmMode::full;
      else if (m == "truncated") c.run.mode = MdfmMode::truncated;
      else r.fail(v, f, "expected full or truncated");
    });
  }

  if (auto n = root["cook"]) {
    r.keys(n, "cook", {"tau_min", "tau_max", "tau_step", "fit_lo", "fit_hi"});
    r.opt(n, "tau_min", "cook.", [&](auto v, auto f) { c.cook.tau_min = r.number(v, f); });
    r.opt(n, "tau_max", "cook.", [&](auto v, auto f) { c.cook.tau_max = r.number(v, f); });
    r.opt(n, "tau_step", "cook.", [&](auto v, auto f) { c.cook.tau_step = r.number(v, f); });
    r.opt(n, "fit_lo", "cook.", [&](auto v, auto f) { c.cook.fit_lo = r.number(v, f); });
    r.opt(n, "fit_hi", "cook.", [&](auto v, auto f) { c.cook.fit_hi = r.number(v, f); });
  }

  if (auto n = root["output"]) {
    r.keys(n, "output", {"dir", "cache", "cache_dir"});
    r.opt(n, "dir", "output.", [&](auto v, auto f) { c.output_dir = r.text(v, f); });
    r.opt(n, "cache", "output.", [&](auto v, auto f) { c.cache = r.boolean(v, f); });
    r.opt(n, "cache_dir", "output.", [&](auto v, auto f) { c.cache_dir = r.text(v, f); });
  }

  try {
    c.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, source + ": " + e.what());
  }
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  require(static_cast<bool>(f), ErrorCode::ConfigError, "cannot open config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), path.string());
}

/// Caps every tau range at tau_max; schedules keep only checkpoints <= tau_max.
inline void apply_tau_max(ExperimentConfig& c, double tau_max) {
  require(std::isfinite(tau_max) && tau_max > 2.0, ErrorCode::ConfigError, "--tau-max must be > 2");
  for (auto* s : {&c.run.checkpoints, &c.run.long_checkpoints})
    std::erase_if(*s, [&](double t) { return t > tau_max; });
  c.cook.tau_max = std::min(c.cook.tau_max, tau_max);
  c.cook.fit_hi = std::min(c.cook.fit_hi, tau_max);
  c.validate();
}

inline void apply_grid_points(ExperimentConfig& c, std::size_t points) {
  c.run.grid.points = points;
  try {
    c.run.grid.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, std::string("--grid-points: ") + e.what());
  }
  c.validate();
}

}  // namespace critscat::io
