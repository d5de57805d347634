#include "ikzm/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "ikzm/dmrg.hpp"
#include "ikzm/errors.hpp"
#include "ikzm/fermion.hpp"
#include "ikzm/quadratic.hpp"
#include "ikzm/tebd.hpp"

namespace fs = std::filesystem;

namespace ikzm {

namespace {

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// DMRG is only used to seed the ramp; cap its bonds independently of the
// evolution cap, which can be pushed much higher.
constexpr int kDmrgChiCap = 500;

QuenchRecord run_fermion_point(const RunConfig& cfg, double tau_Q) {
  ChainSpec spec = cfg.chain();
  QuenchProtocol ramp = cfg.protocol(tau_Q);
  EvolveOptions opts;
  opts.samples = cfg.samples;
  FermionTrajectory traj = run_fermion_quench(spec, ramp, opts);

  QuenchRecord rec;
  rec.snapshot = RecordSnapshot::make(cfg, tau_Q, RunConfig::Backend::fermion);
  rec.times = std::move(traj.times);
  rec.density = std::move(traj.density);
  rec.final_density = traj.final_density;
  rec.purity_drift = traj.max_purity_error;
  rec.ground_energy = ground_state(build_quadratic(spec, field_at(ramp.t_start(), ramp, spec))).energy;
  return rec;
}

QuenchRecord run_mps_point(const RunConfig& cfg, double tau_Q) {
  ChainSpec spec = cfg.chain();
  QuenchProtocol ramp = cfg.protocol(tau_Q);

  DmrgOptions dopts;
  dopts.chi_max = std::min(cfg.chi, kDmrgChiCap);
  dopts.seed = cfg.seed;
  DmrgResult gs = dmrg_ground_state(spec, field_at(ramp.t_start(), ramp, spec), dopts);

  TebdOptions topts;
  topts.chi_max = cfg.chi;
  topts.trunc_budget = cfg.trunc_budget;
  topts.samples = cfg.samples;
  topts.order = cfg.trotter_order;
  TebdTrajectory traj = tebd_evolve(std::move(gs.state), spec, ramp, topts);

  QuenchRecord rec;
  rec.snapshot = RecordSnapshot::make(cfg, tau_Q, RunConfig::Backend::mps);
  rec.times = std::move(traj.times);
  rec.density = std::move(traj.density);
  rec.final_density = traj.final_density;
  rec.trunc_err = traj.trunc_cumulative.empty() ? 0.0 : traj.trunc_cumulative.back();
  rec.max_bond = traj.max_bond.empty() ? 0 : *std::max_element(traj.max_bond.begin(), traj.max_bond.end());
  rec.ground_energy = gs.energy;
  return rec;
}

struct Point {
  double tau_Q;
  RunConfig::Backend which;
};

std::vector<Point> sweep_points(const RunConfig& cfg) {
  std::vector<Point> points;
  for (double tau : cfg.tau_grid()) {
    if (cfg.backend == RunConfig::Backend::fermion || cfg.backend == RunConfig::Backend::both)
      points.push_back({tau, RunConfig::Backend::fermion});
    if (cfg.backend == RunConfig::Backend::mps || cfg.backend == RunConfig::Backend::both)
      points.push_back({tau, RunConfig::Backend::mps});
  }
  return points;
}

std::string curve_stem(const std::vector<Point>& points, const RunConfig& cfg) {
  std::string identity;
  for (const auto& p : points) identity += RecordSnapshot::make(cfg, p.tau_Q, p.which).canonical() + "\n";
  return "curve_" + hash_hex(fnv1a64(identity)).substr(0, 8);
}

}  // namespace

QuenchRecord run_single(const RunConfig& cfg, double tau_Q, RunConfig::Backend which) {
  auto t0 = std::chrono::steady_clock::now();
  QuenchRecord rec;
  switch (which) {
    case RunConfig::Backend::fermion: rec = run_fermion_point(cfg, tau_Q); break;
    case RunConfig::Backend::mps: rec = run_mps_point(cfg, tau_Q); break;
    case RunConfig::Backend::both: throw ConfigError("run_single needs a concrete backend");
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  validate_record(rec);
  return rec;
}

SweepResult run_sweep(const RunConfig& cfg, std::ostream* log) {
  cfg.validate();
  std::vector<Point> points = sweep_points(cfg);
  std::string records_dir = (fs::path(cfg.out_dir) / "records").string();
  fs::create_directories(records_dir);

  std::vector<std::optional<QuenchRecord>> slots(points.size());
  SweepResult result;
  std::mutex io;  // one writer for files and the log, shared nothing else
  std::atomic<size_t> cursor{0};

  auto work = [&]() {
    while (true) {
      size_t i = cursor.fetch_add(1);
      if (i >= points.size()) break;
      const Point& pt = points[i];
      RecordSnapshot snap = RecordSnapshot::make(cfg, pt.tau_Q, pt.which);
      std::string why;
      if (auto cached = load_cached_record(records_dir, snap, &why)) {
        std::lock_guard<std::mutex> lock(io);
        slots[i] = std::move(*cached);
        ++result.reused;
        continue;
      }
      if (!why.empty() && log) {
        std::lock_guard<std::mutex> lock(io);
        *log << "warning: discarding stale record (" << why << ")\n";
      }
      try {
        QuenchRecord rec = run_single(cfg, pt.tau_Q, pt.which);
        std::lock_guard<std::mutex> lock(io);
        save_record(rec, records_dir);
        slots[i] = std::move(rec);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(io);
        result.failures.push_back({pt.tau_Q, backend_name(pt.which), e.what()});
        if (log)
          *log << "warning: point tau_Q=" << fmt_g17(pt.tau_Q) << " backend=" << backend_name(pt.which)
               << " failed: " << e.what() << "\n";
      }
    }
  };

  int nworkers = std::min<int>(cfg.workers, static_cast<int>(points.size()));
  if (nworkers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nworkers);
    for (int w = 0; w < nworkers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  for (auto& slot : slots)
    if (slot) result.records.push_back(std::move(*slot));
  std::sort(result.failures.begin(), result.failures.end(),
            [](const SweepFailure& a, const SweepFailure& b) {
              if (a.tau_Q != b.tau_Q) return a.tau_Q < b.tau_Q;
              return a.backend < b.backend;
            });

  if (result.failures.size() * 5 > points.size()) {
    std::ostringstream msg;
    msg << result.failures.size() << " of " << points.size()
        << " sweep points failed (limit is 20%); first failure at tau_Q="
        << fmt_g17(result.failures.front().tau_Q) << ": " << result.failures.front().message;
    throw SimulationError(msg.str());
  }

  result.curve_path = write_sweep_curve(result.records, cfg.out_dir, curve_stem(points, cfg));
  return result;
}

std::string write_sweep_curve(const std::vector<QuenchRecord>& records, const std::string& out_dir,
                              const std::string& stem) {
  fs::create_directories(out_dir);
  fs::path target = fs::path(out_dir) / (stem + ".csv");
  fs::path tmp = fs::path(out_dir) / ("." + stem + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SimulationError("cannot write sweep curve " + tmp.string());
    out << "# schema=1\n";
    out << "tau_Q,d_final,backend,L,q,alpha_q,J0,chi,dt,trunc_err,purity_drift\n";
    for (const auto& rec : records) {
      const RecordSnapshot& s = rec.snapshot;
      out << fmt_g17(s.tau_Q) << ',' << fmt_g17(rec.final_density) << ',' << backend_name(s.backend)
          << ',' << s.L << ',' << fmt_g17(s.q) << ',' << fmt_g17(s.alpha) << ',' << fmt_g17(s.J0)
          << ',' << s.chi << ',' << fmt_g17(s.dt) << ',' << fmt_g17(rec.trunc_err) << ','
          << fmt_g17(rec.purity_drift) << '\n';
    }
    if (!out.flush()) throw SimulationError("short write on sweep curve " + tmp.string());
  }
  fs::rename(tmp, target);
  return target.string();
}

std::vector<CurveRow> read_sweep_curve(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open sweep curve '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != "# schema=1")
    throw ConfigError(path + ": missing '# schema=1' marker");
  if (!std::getline(in, line) ||
      line != "tau_Q,d_final,backend,L,q,alpha_q,J0,chi,dt,trunc_err,purity_drift")
    throw ConfigError(path + ": unexpected curve header");
  std::vector<CurveRow> rows;
  int lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 11)
      throw ConfigError(path + ": line " + std::to_string(lineno) + " has " +
                        std::to_string(fields.size()) + " fields, expected 11");
    try {
      CurveRow row;
      row.tau_Q = std::stod(fields[0]);
      row.d_final = std::stod(fields[1]);
      row.backend = fields[2];
      backend_from_name(row.backend);  // reject junk
      row.L = std::stoi(fields[3]);
      row.q = std::stod(fields[4]);
      row.alpha_q = std::stod(fields[5]);
      row.J0 = std::stod(fields[6]);
      row.chi = std::stoi(fields[7]);
      row.dt = std::stod(fields[8]);
      row.trunc_err = std::stod(fields[9]);
      row.purity_drift = std::stod(fields[10]);
      rows.push_back(row);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError(path + ": line " + std::to_string(lineno) + " is not numeric");
    }
  }
  return rows;
}

ValidationReport cross_validate(const RunConfig& cfg, double tolerance, std::ostream* log) {
  if (cfg.backend != RunConfig::Backend::both)
    throw ConfigError("cross-validation needs backend = both");
  SweepResult sweep = run_sweep(cfg, log);
  if (!sweep.failures.empty())
    throw SimulationError("cross-validation needs every point; " +
                          std::to_string(sweep.failures.size()) + " failed");

  ValidationReport report;
  report.tolerance = tolerance;
  for (double tau : cfg.tau_grid()) {
    const QuenchRecord* fr = nullptr;
    const QuenchRecord* mr = nullptr;
    for (const auto& rec : sweep.records) {
      if (rec.snapshot.tau_Q != tau) continue;
      if (rec.snapshot.backend == RunConfig::Backend::fermion) fr = &rec;
      if (rec.snapshot.backend == RunConfig::Backend::mps) mr = &rec;
    }
    if (!fr || !mr) throw SimulationError("missing backend record at tau_Q=" + fmt_g17(tau));
    if (fr->times.size() != mr->times.size())
      throw SimulationError("backends sampled different grids at tau_Q=" + fmt_g17(tau));
    ValidationRow row;
    row.tau_Q = tau;
    double sum = 0.0;
    for (size_t i = 0; i < fr->times.size(); ++i) {
      if (fr->times[i] != mr->times[i])
        throw SimulationError("sample rasters disagree at tau_Q=" + fmt_g17(tau));
      double gap = std::abs(fr->density[i] - mr->density[i]);
      row.max_gap = std::max(row.max_gap, gap);
      sum += gap;
    }
    row.mean_gap = sum / double(fr->times.size());
    row.flagged = row.max_gap > tolerance;
    report.any_flagged = report.any_flagged || row.flagged;
    report.worst_gap = std::max(report.worst_gap, row.max_gap);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace ikzm
