#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ikzm/config.hpp"
#include "ikzm/errors.hpp"
#include "ikzm/figures.hpp"
#include "ikzm/record.hpp"
#include "ikzm/sweep.hpp"

using namespace ikzm;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "ikzm_harness" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  REQUIRE(bool(out));
  out << text;
}

const char* kFullConfig = R"(# full-surface config
[chain]
L = 24
q = 3            ; trailing comment
end_ratio = 0.25
J0 = 2.5

[quench]
tau_min = 0.5
tau_max = 32
tau_count = 7
dt = 0.005
samples = 120

[backend]
backend = mps
chi = 48
trunc_budget = 0.01
seed = 99
trotter_order = 4

[output]
out_dir = somewhere/deep
workers = 3
)";

RunConfig small_fermion_config(const fs::path& out) {
  RunConfig cfg;
  cfg.L = 12;
  cfg.q = 2.0;
  cfg.end_ratio = 0.2;
  cfg.tau_min = 0.5;
  cfg.tau_max = 4.0;
  cfg.tau_count = 4;
  cfg.backend = RunConfig::Backend::fermion;
  cfg.out_dir = out.string();
  return cfg;
}

// chi = 3 cannot carry the entanglement of slow ramps at L = 10; the
// cumulative discarded weight grows monotonically with tau_Q, so a budget
// slices the grid into passing and failing points at a known spot
RunConfig starved_mps_config(const fs::path& out, double budget) {
  RunConfig cfg;
  cfg.L = 10;
  cfg.q = 2.0;
  cfg.tau_min = 0.4;
  cfg.tau_max = 4.0;
  cfg.tau_count = 5;
  cfg.dt = 0.01;
  cfg.backend = RunConfig::Backend::mps;
  cfg.chi = 3;
  cfg.trunc_budget = budget;
  cfg.out_dir = out.string();
  return cfg;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config files parse fully and reject surprises") {
  RunConfig cfg = parse_config_text(kFullConfig);
  CHECK(cfg.L == 24);
  CHECK(cfg.q == 3.0);
  CHECK(cfg.end_ratio.value() == 0.25);
  CHECK(!cfg.alpha.has_value());
  CHECK(cfg.J0 == 2.5);
  CHECK(cfg.tau_min == 0.5);
  CHECK(cfg.tau_max == 32.0);
  CHECK(cfg.tau_count == 7);
  CHECK(cfg.dt.value() == 0.005);
  CHECK(cfg.samples == 120);
  CHECK(cfg.backend == RunConfig::Backend::mps);
  CHECK(cfg.chi == 48);
  CHECK(cfg.trunc_budget == 0.01);
  CHECK(cfg.seed == 99);
  CHECK(cfg.trotter_order == 4);
  CHECK(cfg.out_dir == "somewhere/deep");
  CHECK(cfg.workers == 3);
  CHECK(cfg.chain().alpha == doctest::Approx(0.75 / 1728.0).epsilon(1e-14));

  CHECK_THROWS_AS(parse_config_text("[chain]\nL = 10\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[nonsense]\nL = 10\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[chain]\nL = 10\nL = 12\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[chain]\nL 10\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("L = 10\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[chain]\nL =\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[chain]\nq = fast\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("[chain]\nalpha = 0.001\nend_ratio = 0.2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_file("/no/such/file.ini"), ConfigError);

  RunConfig bad;
  bad.samples = 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RunConfig{};
  bad.chi = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RunConfig{};
  bad.trotter_order = 3;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RunConfig{};
  bad.workers = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RunConfig{};
  bad.tau_count = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RunConfig{};
  bad.tau_count = 1;  // needs tau_min == tau_max
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RunConfig{};
  bad.tau_max = 0.5 * bad.tau_min;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = RunConfig{};
  bad.dt = -0.01;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("tau grids are log spaced with exact endpoints") {
  RunConfig cfg;
  cfg.tau_min = 2.0;
  cfg.tau_max = 200.0;
  cfg.tau_count = 7;
  std::vector<double> grid = cfg.tau_grid();
  REQUIRE(grid.size() == 7);
  CHECK(grid.front() == 2.0);
  CHECK(grid.back() == 200.0);
  for (int i = 1; i + 1 < 7; ++i)
    CHECK(grid[i + 1] / grid[i] == doctest::Approx(grid[1] / grid[0]).epsilon(1e-12));

  cfg.tau_min = cfg.tau_max = 5.0;
  cfg.tau_count = 1;
  grid = cfg.tau_grid();
  REQUIRE(grid.size() == 1);
  CHECK(grid[0] == 5.0);
}

TEST_CASE("canonical snapshots pin the physics and split by backend") {
  RunConfig cfg;
  cfg.L = 10;
  cfg.q = 2.0;
  cfg.alpha = 0.03125;
  cfg.J0 = 1.0;
  cfg.dt = 0.0078125;
  cfg.chi = 16;
  cfg.seed = 7;

  // every value here is exactly representable, so the string is stable
  std::string fermion = cfg.canonical_snapshot(2.0, RunConfig::Backend::fermion);
  CHECK(fermion == "L=10;q=2;alpha=0.03125;J0=1;tau_Q=2;dt=0.0078125;samples=200;backend=fermion");
  CHECK(hash_hex(fnv1a64(fermion)) == "00b4476cea8223fa");

  std::string mps = cfg.canonical_snapshot(2.0, RunConfig::Backend::mps);
  CHECK(mps.substr(0, fermion.size() - 7) == fermion.substr(0, fermion.size() - 7));
  CHECK(mps.find(";chi=16;") != std::string::npos);
  CHECK(mps.find(";seed=7;") != std::string::npos);
  CHECK(mps.find(";trotter_order=2") != std::string::npos);
  CHECK(fermion.find("chi=") == std::string::npos);  // fermion ignores mps knobs

  // a chi change must not invalidate fermion records
  RunConfig other = cfg;
  other.chi = 64;
  CHECK(other.canonical_snapshot(2.0, RunConfig::Backend::fermion) == fermion);
  CHECK(other.canonical_snapshot(2.0, RunConfig::Backend::mps) != mps);

  CHECK_THROWS_AS(cfg.canonical_snapshot(2.0, RunConfig::Backend::both), ConfigError);

  RecordSnapshot snap = RecordSnapshot::make(cfg, 2.0, RunConfig::Backend::mps);
  CHECK(snap.canonical() == mps);
  CHECK(snap.to_config().canonical_snapshot(2.0, RunConfig::Backend::mps) == mps);
}

TEST_CASE("records survive a disk round trip and reject tampering") {
  fs::path dir = fresh_dir("records_roundtrip");
  RunConfig cfg;
  cfg.L = 8;
  cfg.q = 2.0;
  cfg.end_ratio = 0.2;
  cfg.backend = RunConfig::Backend::fermion;

  QuenchRecord rec = run_single(cfg, 1.0, RunConfig::Backend::fermion);
  validate_record(rec);
  CHECK(rec.times.size() == 200);
  CHECK(rec.final_density == rec.density.back());
  CHECK(rec.ground_energy < 0.0);
  CHECK(rec.wall_seconds > 0.0);

  std::string path = save_record(rec, dir.string());
  CHECK(slurp(path) == rec.to_json());

  auto cached = load_cached_record(dir.string(), rec.snapshot);
  REQUIRE(cached.has_value());
  CHECK(cached->to_json() == rec.to_json());

  // unknown snapshot misses the cache
  RunConfig other = cfg;
  other.samples = 150;
  std::string why;
  CHECK(!load_cached_record(dir.string(), RecordSnapshot::make(other, 1.0, cfg.backend), &why));

  // breaking the stored hash is detected and treated as a cache miss
  std::string text = slurp(path);
  auto pos = text.find("\"hash\": \"");
  REQUIRE(pos != std::string::npos);
  text[pos + 9] = text[pos + 9] == '0' ? '1' : '0';
  spit(path, text);
  CHECK_THROWS_AS(QuenchRecord::from_json(text), SimulationError);
  why.clear();
  CHECK(!load_cached_record(dir.string(), rec.snapshot, &why));
  CHECK(!why.empty());

  QuenchRecord broken = rec;
  broken.density[3] = 1.5;  // above the (L-1)/L ceiling
  CHECK_THROWS_AS(validate_record(broken), SimulationError);
  broken = rec;
  broken.density.pop_back();
  broken.times.pop_back();
  CHECK_THROWS_AS(validate_record(broken), SimulationError);
  broken = rec;
  broken.times.back() += 0.5;
  CHECK_THROWS_AS(validate_record(broken), SimulationError);
  broken = rec;
  broken.final_density += 1e-3;
  CHECK_THROWS_AS(validate_record(broken), SimulationError);
}

TEST_CASE("sweeps are deterministic, cached and resumable") {
  fs::path dir_a = fresh_dir("sweep_a");
  fs::path dir_b = fresh_dir("sweep_b");

  RunConfig cfg_a = small_fermion_config(dir_a);
  cfg_a.workers = 1;
  SweepResult first = run_sweep(cfg_a);
  CHECK(first.records.size() == 4);
  CHECK(first.failures.empty());
  CHECK(first.reused == 0);
  std::string curve_a = slurp(first.curve_path);
  CHECK(curve_a.rfind("# schema=1\n", 0) == 0);
  CHECK(curve_a.find("tau_Q,d_final,backend,L,q,alpha_q,J0,chi,dt,trunc_err,purity_drift\n") !=
        std::string::npos);

  RunConfig cfg_b = small_fermion_config(dir_b);
  cfg_b.workers = 3;  // worker count must not leak into the bytes
  SweepResult parallel = run_sweep(cfg_b);
  CHECK(slurp(parallel.curve_path) == curve_a);

  SweepResult again = run_sweep(cfg_a);
  CHECK(again.reused == 4);
  CHECK(slurp(again.curve_path) == curve_a);

  // records alone are enough to regenerate the curve byte for byte
  fs::remove(first.curve_path);
  SweepResult rebuilt = run_sweep(cfg_a);
  CHECK(rebuilt.reused == 4);
  CHECK(slurp(rebuilt.curve_path) == curve_a);

  // curve rows parse back and are sorted by ramp time
  std::vector<CurveRow> rows = read_sweep_curve(first.curve_path);
  REQUIRE(rows.size() == 4);
  CHECK(std::is_sorted(rows.begin(), rows.end(),
                       [](const CurveRow& x, const CurveRow& y) { return x.tau_Q < y.tau_Q; }));
  CHECK(rows[0].backend == "fermion");
  CHECK(rows[0].L == 12);
  CHECK(rows[0].alpha_q == doctest::Approx(0.8 / 36.0).epsilon(1e-14));
  for (const auto& row : rows) CHECK(row.purity_drift < 1e-9);

  std::vector<QuenchRecord> stored = load_record_dir((dir_a / "records").string());
  CHECK(stored.size() == 4);
  CHECK(std::is_sorted(stored.begin(), stored.end(), [](const auto& x, const auto& y) {
    return x.snapshot.tau_Q < y.snapshot.tau_Q;
  }));
}

TEST_CASE("a one point grid makes exactly one record") {
  fs::path dir = fresh_dir("sweep_single");
  RunConfig cfg = small_fermion_config(dir);
  cfg.tau_min = cfg.tau_max = 2.0;
  cfg.tau_count = 1;
  SweepResult result = run_sweep(cfg);
  CHECK(result.records.size() == 1);
  CHECK(result.records[0].snapshot.tau_Q == 2.0);
  CHECK(read_sweep_curve(result.curve_path).size() == 1);
}

TEST_CASE("failed points are skipped until the ceiling, then the sweep fails") {
  fs::path dir = fresh_dir("sweep_partial");
  std::ostringstream log;
  RunConfig cfg = starved_mps_config(dir, 3e-4);  // only tau_Q = 4 blows the budget
  SweepResult result = run_sweep(cfg, &log);
  CHECK(result.records.size() == 4);
  REQUIRE(result.failures.size() == 1);  // 1 of 5 is at the 20% limit, tolerated
  CHECK(result.failures[0].tau_Q == doctest::Approx(4.0));
  CHECK(result.failures[0].message.find("truncation error budget") != std::string::npos);
  CHECK(log.str().find("warning") != std::string::npos);
  CHECK(read_sweep_curve(result.curve_path).size() == 4);  // failed point excluded

  fs::path dir2 = fresh_dir("sweep_too_many");
  RunConfig strict = starved_mps_config(dir2, 1.5e-4);  // two failures, 40% > 20%
  CHECK_THROWS_AS(run_sweep(strict), SimulationError);
  // the passing points were still persisted before the sweep gave up
  CHECK(load_record_dir((dir2 / "records").string()).size() == 3);
}

TEST_CASE("cross validation flags a starved bond dimension") {
  fs::path ok_dir = fresh_dir("validate_ok");
  RunConfig cfg;
  cfg.L = 10;
  cfg.q = 2.0;
  cfg.end_ratio = 0.2;
  cfg.tau_min = cfg.tau_max = 1.0;
  cfg.tau_count = 1;
  cfg.dt = 0.02;
  cfg.backend = RunConfig::Backend::both;
  cfg.chi = 64;
  cfg.out_dir = ok_dir.string();

  ValidationReport good = cross_validate(cfg, 1e-3);
  REQUIRE(good.rows.size() == 1);
  CHECK(!good.any_flagged);
  CHECK(good.worst_gap < 1e-4);

  RunConfig starved = cfg;
  starved.out_dir = fresh_dir("validate_starved").string();
  starved.chi = 2;
  starved.trunc_budget = 1.0;  // let the truncation happen instead of aborting
  ValidationReport bad = cross_validate(starved, 1e-3);
  CHECK(bad.any_flagged);
  CHECK(bad.worst_gap > 1e-3);

  RunConfig wrong = cfg;
  wrong.backend = RunConfig::Backend::fermion;
  CHECK_THROWS_AS(cross_validate(wrong, 1e-3), ConfigError);
}

TEST_CASE("curve files reject structural damage") {
  fs::path dir = fresh_dir("curve_parse");
  std::string header = "tau_Q,d_final,backend,L,q,alpha_q,J0,chi,dt,trunc_err,purity_drift\n";
  std::string row = "1,0.1,fermion,8,2,0,1,0,0.01,0,0\n";

  spit(dir / "good.csv", "# schema=1\n" + header + row);
  CHECK(read_sweep_curve((dir / "good.csv").string()).size() == 1);

  spit(dir / "noschema.csv", header + row);
  CHECK_THROWS_AS(read_sweep_curve((dir / "noschema.csv").string()), ConfigError);
  spit(dir / "badheader.csv", "# schema=1\ntau,d\n" + row);
  CHECK_THROWS_AS(read_sweep_curve((dir / "badheader.csv").string()), ConfigError);
  spit(dir / "short.csv", "# schema=1\n" + header + "1,0.1,fermion\n");
  CHECK_THROWS_AS(read_sweep_curve((dir / "short.csv").string()), ConfigError);
  spit(dir / "junkbackend.csv", "# schema=1\n" + header + "1,0.1,psychic,8,2,0,1,0,0.01,0,0\n");
  CHECK_THROWS_AS(read_sweep_curve((dir / "junkbackend.csv").string()), ConfigError);
  spit(dir / "nan.csv", "# schema=1\n" + header + "1,zero,fermion,8,2,0,1,0,0.01,0,0\n");
  CHECK_THROWS_AS(read_sweep_curve((dir / "nan.csv").string()), ConfigError);
  CHECK_THROWS_AS(read_sweep_curve((dir / "missing.csv").string()), ConfigError);
}

TEST_CASE("figures emit data plus well formed svg and refuse empty input") {
  fs::path dir = fresh_dir("figures");

  // fabricated but structurally honest records: a ramp family over tau
  std::vector<QuenchRecord> records;
  for (double tau : {1.0, 2.0, 4.0, 8.0}) {
    QuenchRecord rec;
    rec.snapshot.L = 16;
    rec.snapshot.tau_Q = tau;
    rec.snapshot.dt = 0.01;
    rec.snapshot.samples = 50;
    for (int i = 0; i < 50; ++i) {
      double t = -tau + 2.0 * tau * i / 49.0;
      rec.times.push_back(t);
      rec.density.push_back(0.3 / std::sqrt(tau) / (1.0 + std::exp(-4.0 * t / tau)));
    }
    rec.final_density = rec.density.back();
    records.push_back(rec);
  }
  FigurePaths heat = figure_heatmap(records, (dir / "heat").string());
  std::string svg = slurp(heat.svg_path);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);  // the t_c(0) marker
  CHECK(slurp(heat.data_path).find("# columns: tau_Q,time,scaled_time,density") !=
        std::string::npos);

  // synthetic two-regime curves for q = 2 and q = 3 plus a flat reference
  std::vector<CurveRow> rows;
  auto push_series = [&rows](double q, double alpha, double tau_star, double beta_slow) {
    for (int i = 0; i < 14; ++i) {
      double tau = 0.2 * std::pow(10.0, 2.2 * i / 13.0);
      CurveRow r;
      r.tau_Q = tau;
      r.backend = "fermion";
      r.L = 50;
      r.q = q;
      r.alpha_q = alpha;
      r.J0 = 5.0;
      r.dt = 0.01;
      double beta = tau < tau_star ? 0.5 : beta_slow;
      double knee = std::pow(tau_star, -0.5);
      r.d_final = alpha == 0.0 ? 0.2 * std::pow(tau, -0.5)
                               : 0.2 * knee * std::pow(tau / tau_star, -beta);
      rows.push_back(r);
    }
  };
  // alphas chosen so the edge coupling stays positive at L = 50; the knees
  // sit at each profile's own crossover ramp time
  push_series(2.0, 0.00128, 1.5625, 1.5);
  push_series(3.0, 5.12e-5, 1.0 / 0.96, 1.0);
  push_series(2.0, 0.0, 0.0, 0.5);

  FigurePaths scal = figure_scaling(rows, (dir / "scal").string());
  svg = slurp(scal.svg_path);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(slurp(scal.data_path).find("# fit") != std::string::npos);

  FigurePaths expo = figure_exponents(rows, (dir / "expo").string());
  std::string csv = slurp(expo.data_path);
  CHECK(csv.find("beta_theory") != std::string::npos);
  CHECK(csv.find("1.500000") != std::string::npos);  // q = 2 theory value
  CHECK(csv.find("1.000000") != std::string::npos);  // q = 3 theory value

  FigurePaths over = figure_overlay(rows, (dir / "over").string());
  CHECK(slurp(over.svg_path).find("</svg>") != std::string::npos);

  CHECK_THROWS_AS(figure_heatmap({}, (dir / "empty").string()), ConfigError);
  CHECK_THROWS_AS(figure_scaling({}, (dir / "empty").string()), ConfigError);
  CHECK_THROWS_AS(figure_exponents({}, (dir / "empty").string()), ConfigError);
  CHECK_THROWS_AS(figure_overlay({}, (dir / "empty").string()), ConfigError);

  // curves without any graded series cannot make the exponent figure
  std::vector<CurveRow> flat_only(rows.end() - 14, rows.end());
  CHECK_THROWS_AS(figure_exponents(flat_only, (dir / "flat").string()), ConfigError);
}

}  // TEST_SUITE
