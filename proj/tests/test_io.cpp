#include <gtest/gtest.h>

#include <clocale>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <locale>

#include "critscat/io/cache.hpp"
#include "critscat/io/config.hpp"
#include "critscat/io/report.hpp"

using namespace critscat;
using namespace critscat::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("critscat_test_io_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string config_error(const std::string& yaml) {
  try {
    parse_config(yaml, "cfg.yaml");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigError);
    return e.what();
  }
  ADD_FAILURE() << "no error for:\n" << yaml;
  return {};
}

}  // namespace

TEST(Format, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 1e-320, 0.3981570}) {
    double back = 0.0;
    ASSERT_TRUE(parse_double(format_double(v), back));
    EXPECT_EQ(back, v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(std::nan("")), "nan");
  double x = 0.0;
  EXPECT_FALSE(parse_double("1,5", x));
  EXPECT_FALSE(parse_double("1.5x", x));
  EXPECT_TRUE(parse_double("+2.5", x));
  EXPECT_EQ(x, 2.5);
}

TEST(Format, Fnv1aVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(hex64(0xaf63dc4c8601ec8cULL), "af63dc4c8601ec8c");
}

TEST(Csv, Rfc4180) {
  CsvTable t({"name", "value"}, {{"config_hash", "abc"}});
  t.add({std::string("plain"), 1.5});
  t.add({std::string("with,comma"), 2LL});
  t.add({std::string("say \"hi\""), -0.0});
  const auto s = t.str();
  EXPECT_EQ(s,
            "# config_hash: abc\r\n"
            "name,value\r\n"
            "plain,1.5\r\n"
            "\"with,comma\",2\r\n"
            "\"say \"\"hi\"\"\",0\r\n");
  const auto rows = read_csv(s);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[2][0], "with,comma");
  EXPECT_EQ(rows[3][0], "say \"hi\"");
  EXPECT_THROW(t.add({1.0}), Error);
}

TEST(StateDump, BitExactRoundTrip) {
  const auto phi = make_packet(0.5, 4.0, GridSpec(200.0, 1024));
  EvolutionState s{phi.state, 12.5};
  s.error_estimate = 3.25e-9;
  s.norm_drift = -1e-15;
  s.steps_taken = 77;
  s.dtau_used = 0.0125;
  const auto bytes = encode_state({s, 8.0});
  EXPECT_EQ(bytes.size(), 8 + 4 * 4 + 8 + 8 + 5 * 8 + 8 + 1024 * 16u);
  const auto r = decode_state(bytes);
  EXPECT_EQ(r.tau_from, 8.0);
  EXPECT_EQ(r.state.tau, 12.5);
  EXPECT_EQ(r.state.error_estimate, s.error_estimate);
  EXPECT_EQ(r.state.norm_drift, s.norm_drift);
  EXPECT_EQ(r.state.steps_taken, 77u);
  EXPECT_EQ(r.state.dtau_used, 0.0125);
  EXPECT_EQ(r.state.state.grid, phi.state.grid);
  EXPECT_EQ(std::memcmp(r.state.state.values.data(), phi.state.values.data(), 1024 * sizeof(cplx)), 0);
  // little-endian header: version 1 right after the magic
  EXPECT_EQ(bytes.substr(0, 8), "CRSCSTAT");
  EXPECT_EQ(bytes[8], 1);
  EXPECT_EQ(bytes[9], 0);
}

TEST(StateDump, SinglePrecisionAndErrors) {
  const auto phi = make_packet(0.5, 4.0, GridSpec(50.0, 256));
  const auto bytes = encode_state({{phi.state, 3.0}, 1.0}, 8);
  const auto r = decode_state(bytes);
  EXPECT_LT(l2_distance(r.state.state, phi.state), 1e-6);
  EXPECT_THROW(encode_state({{phi.state, 3.0}, 1.0}, 4), Error);
  try {
    decode_state("NOTSTATE" + bytes.substr(8));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
  EXPECT_THROW(decode_state(bytes.substr(0, bytes.size() - 3)), Error);
}

TEST(Cache, StoreLoadAndMiss) {
  const auto dir = scratch("cache");
  const auto phi = make_packet(0.5, 4.0, GridSpec(100.0, 512));
  FileCheckpointStore a(dir, "k1");
  EXPECT_FALSE(a.load(8.0, 12.0).has_value());
  EvolutionState s{phi.state, 12.0};
  s.steps_taken = 5;
  a.store(8.0, 12.0, s);
  const auto hit = a.load(8.0, 12.0);
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->steps_taken, 5u);
  EXPECT_EQ(hit->state.values, phi.state.values);
  EXPECT_EQ(a.hits(), 1u);
  // other key, other interval
  FileCheckpointStore b(dir, "k2");
  EXPECT_FALSE(b.load(8.0, 12.0).has_value());
  EXPECT_FALSE(a.load(8.0, 18.0).has_value());
  // a damaged entry is a miss, not an error
  { std::ofstream(a.path(8.0, 12.0), std::ios::trunc) << "junk"; }
  EXPECT_FALSE(a.load(8.0, 12.0).has_value());
  for (const auto& e : fs::directory_iterator(dir)) EXPECT_NE(e.path().extension(), ".tmp");
}

TEST(Config, EmptyMeansDefaults) {
  const auto c = parse_config("");
  EXPECT_EQ(c.schedule.sigma(), 0.25);
  EXPECT_EQ(c.sweep.size(), 5u);
  EXPECT_EQ(c.run.grid.points, 4096u);
  EXPECT_EQ(c.hash(), ExperimentConfig{}.hash());
}

TEST(Config, FullDocument) {
  const auto c = parse_config(R"(
schedule: {sigma: 0.1875, r0: 1, interior: quadratic}
zeta: {t_max: e^8, fit_lo: e^4, fit_hi: e^8}
potential:
  kappa: 1.5
  amplitude: 0.25
  sign: -1
  modulation: {kind: cosine, depth: 0.5, frequency: 2}
sweep: {kappas: [0, 1.5], amplitudes: [0.1, 0.2]}
grid: {half_width: 2000, points: 8192}
packet: {eps: 0.5, R: 4, profile: compact, lobes: positive}
evolution: {checkpoints: [8, 16, 32], long_checkpoints: [8, 16, 32, 48], dtau: 0.05, tol: 1e-8}
cook: {tau_min: 6, tau_max: 20, tau_step: 0.5}
output: {dir: results, cache: off}
)");
  EXPECT_EQ(c.schedule.sigma(), 0.1875);
  EXPECT_EQ(c.schedule.interior(), InteriorProfile::quadratic);
  EXPECT_NEAR(c.zeta.t_max, std::exp(8.0), 1e-9);
  EXPECT_EQ(c.potential.sign, -1);
  EXPECT_EQ(c.run.sign, -1);
  EXPECT_EQ(c.potential.amplitude_high, 2.0 * 0.25 * 1.5);
  ASSERT_EQ(c.sweep.size(), 2u);
  EXPECT_EQ(c.sweep[1].amplitude, 0.2);
  EXPECT_EQ(c.run.grid.points, 8192u);
  EXPECT_EQ(c.run.shape.profile, PacketShape::Profile::compact);
  EXPECT_EQ(c.run.checkpoints.back(), 32.0);
  EXPECT_EQ(c.cook.tau_step, 0.5);
  EXPECT_EQ(c.output_dir, "results");
  EXPECT_FALSE(c.cache);
}

TEST(Config, Diagnostics) {
  auto e = config_error("grid:\n  points: 4096\n  halfwidth: 10\n");
  EXPECT_NE(e.find("cfg.yaml:3:3"), std::string::npos) << e;
  EXPECT_NE(e.find("grid.halfwidth"), std::string::npos) << e;
  e = config_error("packet:\n  eps: 0,5\n");
  EXPECT_NE(e.find("packet.eps"), std::string::npos) << e;
  EXPECT_NE(e.find(":2:"), std::string::npos) << e;
  e = config_error("sweep: {kappas: []}\n");
  EXPECT_NE(e.find("empty sweep list"), std::string::npos) << e;
  e = config_error("schedule: {sigma: 0.3}\n");
  EXPECT_NE(e.find("sigma"), std::string::npos) << e;
  e = config_error("grid: {points: 1000}\n");
  EXPECT_NE(e.find("power of two"), std::string::npos) << e;
  e = config_error("grid: {half_width: 100}\n");  // L >= 4 R tau_max violated
  EXPECT_NE(e.find("grid too small"), std::string::npos) << e;
  e = config_error("packet: {eps: 2, R: 3}\n");
  EXPECT_NE(e.find("annulus empty"), std::string::npos) << e;
  e = config_error("sweep: {kappas: [0, 1], amplitudes: [1, 2, 3]}\n");
  EXPECT_NE(e.find("sweep.amplitudes"), std::string::npos) << e;
  e = config_error("grid: [1, 2\n");
  EXPECT_NE(e.find("cfg.yaml:"), std::string::npos) << e;
  e = config_error("evolution: {checkpoints: [8, 12]}\n");
  EXPECT_NE(e.find(">= 3"), std::string::npos) << e;
}

namespace {
struct CommaDecimal : std::numpunct<char> {
  char do_decimal_point() const override { return ','; }
  char do_thousands_sep() const override { return '.'; }
  std::string do_grouping() const override { return "\3"; }
};
}  // namespace

TEST(Config, LocaleIndependent) {
  const std::string yaml = "packet: {eps: 0.25, R: 3.5}\nzeta: {tol: 1e-11}\n";
  const auto before = parse_config(yaml);
  const auto old = std::locale::global(std::locale(std::locale::classic(), new CommaDecimal));
  const auto after = parse_config(yaml);
  const auto text = format_double(0.25);
  CsvTable t({"x"});
  t.add({1234.5});
  const auto csv = t.str();
  std::locale::global(old);
  EXPECT_EQ(after.run.eps, 0.25);
  EXPECT_EQ(after.zeta.tol, 1e-11);
  EXPECT_EQ(after.hash(), before.hash());
  EXPECT_EQ(text, "0.25");
  EXPECT_EQ(csv, "x\r\n1234.5\r\n");
}

TEST(Config, HashTracksResults) {
  const auto a = parse_config("grid: {points: 4096}\npacket: {eps: 0.5}\n");
  const auto b = parse_config("packet: {eps: 0.5}\ngrid: {points: 4096}\n");
  EXPECT_EQ(a.hash(), b.hash());
  const auto c = parse_config("output: {dir: elsewhere, cache: false}\n");
  EXPECT_EQ(a.hash(), c.hash());
  const auto d = parse_config("evolution: {dtau: 0.05}\n");
  EXPECT_NE(a.hash(), d.hash());
  EXPECT_NE(a.point_key({0.5, 0.5}), a.point_key({0.5, 0.25}));
  EXPECT_NE(a.point_key({0.5, 0.5}), d.point_key({0.5, 0.5}));
  EXPECT_EQ(a.hash().size(), 16u);
}

TEST(Config, Overrides) {
  auto c = parse_config("");
  apply_tau_max(c, 30.0);
  EXPECT_EQ(c.run.checkpoints, (std::vector<double>{8, 12, 18, 27}));
  EXPECT_EQ(c.cook.tau_max, 30.0);
  EXPECT_THROW(apply_tau_max(c, 15.0), Error);  // fewer than 3 checkpoints left
  auto d = parse_config("");
  apply_grid_points(d, 8192);
  EXPECT_EQ(d.run.grid.points, 8192u);
  EXPECT_THROW(apply_grid_points(d, 3000), Error);
}

TEST(Report, JsonIsDeterministic) {
  ConvergenceReport r;
  r.point = {1.5, 0.5};
  r.checkpoints = {8, 12, 18};
  r.cauchy.taus = r.checkpoints;
  r.cauchy.d = {{0, 0.1, 0.2}, {0, 0, 0.15}, {0, 0, 0}};
  r.j1_curve = {{8, 0, 0}, {12, 0.01, 0.02}, {18, 0.02, 0.05}};
  r.tail_slope = std::nan("");
  evaluate_verdict(r);
  const auto a = dump(report_json(r));
  const auto b = dump(report_json(r));
  EXPECT_EQ(a, b);
  const auto j = Json::parse(a);
  EXPECT_EQ(j["kappa"], 1.5);
  EXPECT_EQ(j["cauchy"]["consecutive"][1], 0.15);
  EXPECT_TRUE(j["witness"].is_null());
  EXPECT_EQ(j.begin().key(), "kappa");  // insertion order kept
  const auto t = cauchy_table(r, "h").str();
  EXPECT_NE(t.find("# config_hash: h\r\n"), std::string::npos);
  EXPECT_NE(t.find("8,18,0.2\r\n"), std::string::npos);
}
