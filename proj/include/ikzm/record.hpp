#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ikzm/config.hpp"

namespace ikzm {

// Everything needed to reproduce (and re-validate) one quench, detached
// from the RunConfig that created it. Backend-irrelevant fields are zero
// for fermion records and excluded from the canonical string.
struct RecordSnapshot {
  int L = 2;
  double q = 2.0;
  double alpha = 0.0;
  double J0 = 1.0;
  double tau_Q = 1.0;
  double dt = 1e-3;
  int samples = 200;
  RunConfig::Backend backend = RunConfig::Backend::fermion;
  int chi = 0;
  double trunc_budget = 0.0;
  std::uint64_t seed = 0;
  int trotter_order = 0;

  static RecordSnapshot make(const RunConfig& cfg, double tau_Q, RunConfig::Backend which);
  RunConfig to_config() const;  // single-point grid config reproducing this run
  std::string canonical() const;
  std::uint64_t hash() const { return fnv1a64(canonical()); }
};

struct QuenchRecord {
  RecordSnapshot snapshot;
  std::vector<double> times;
  std::vector<double> density;
  double final_density = 0.0;
  double purity_drift = 0.0;   // fermion: max |2 purity deficit| over the run
  double trunc_err = 0.0;      // mps: cumulative discarded weight
  int max_bond = 0;            // mps: largest bond dimension reached
  double ground_energy = 0.0;  // initial-state energy at h(t_start)
  double wall_seconds = 0.0;

  std::string to_json() const;
  static QuenchRecord from_json(const std::string& text);
};

// Structural checks against the model layer using only the snapshot:
// grid endpoints, sample count, density range, final-sample identity.
void validate_record(const QuenchRecord& rec);

std::string record_filename(const RecordSnapshot& snap);
std::string save_record(const QuenchRecord& rec, const std::string& dir);  // returns path
// Cache lookup for resume: nullopt when missing; corrupt or mismatched
// files are reported via `why` and treated as missing.
std::optional<QuenchRecord> load_cached_record(const std::string& dir, const RecordSnapshot& snap,
                                               std::string* why = nullptr);
std::vector<QuenchRecord> load_record_dir(const std::string& dir);  // sorted by tau_Q

}  // namespace ikzm
