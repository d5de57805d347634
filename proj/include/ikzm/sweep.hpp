#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ikzm/config.hpp"
#include "ikzm/record.hpp"

namespace ikzm {

// One quench with the given backend: ground state at h(-tau_Q), ramp to
// h = 0, sampled kink density. Throws SimulationError subclasses on
// non-convergence or a blown truncation budget.
QuenchRecord run_single(const RunConfig& cfg, double tau_Q, RunConfig::Backend which);

struct SweepFailure {
  double tau_Q = 0.0;
  std::string backend;
  std::string message;
};

struct SweepResult {
  std::vector<QuenchRecord> records;  // sorted by tau_Q, fermion before mps
  std::vector<SweepFailure> failures;
  int reused = 0;  // points served from the on-disk record cache
  std::string curve_path;
};

// Runs the config's tau grid (both backends when backend = both) with a
// shared-nothing worker pool; all file writes go through one mutex.
// Completed points are cached as records under <out_dir>/records and
// reused by snapshot hash on re-runs. Failed points are skipped with a
// note; the sweep itself fails only when more than 20% of points fail.
// Output bytes are independent of the worker count.
SweepResult run_sweep(const RunConfig& cfg, std::ostream* log = nullptr);

// Assembled sweep curve: "# schema=1" line, header, then one row per
// record with columns tau_Q, d_final, backend, L, q, alpha_q, J0, chi,
// dt, trunc_err, purity_drift. Returns the file path.
std::string write_sweep_curve(const std::vector<QuenchRecord>& records, const std::string& out_dir,
                              const std::string& stem);

struct CurveRow {
  double tau_Q = 0.0;
  double d_final = 0.0;
  std::string backend;
  int L = 0;
  double q = 0.0;
  double alpha_q = 0.0;
  double J0 = 0.0;
  int chi = 0;
  double dt = 0.0;
  double trunc_err = 0.0;
  double purity_drift = 0.0;
};

std::vector<CurveRow> read_sweep_curve(const std::string& path);

struct ValidationRow {
  double tau_Q = 0.0;
  double max_gap = 0.0;   // max_t |d_fermion(t) - d_mps(t)|
  double mean_gap = 0.0;
  bool flagged = false;
};

struct ValidationReport {
  double tolerance = 1e-3;
  std::vector<ValidationRow> rows;
  bool any_flagged = false;
  double worst_gap = 0.0;
};

// Runs every grid point through both backends on the shared sampling
// raster and compares the trajectories pointwise. Requires backend=both.
ValidationReport cross_validate(const RunConfig& cfg, double tolerance = 1e-3,
                                std::ostream* log = nullptr);

}  // namespace ikzm
