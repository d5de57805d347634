#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ikzm/model.hpp"

namespace ikzm {

// Parsed run configuration. File format is a flat INI document with
// sections [chain], [quench], [backend], [output]; unknown sections or
// keys are hard errors.
struct RunConfig {
  enum class Backend { fermion, mps, both };

  // [chain]
  int L = 50;
  double q = 2.0;
  double J0 = 1.0;
  std::optional<double> alpha;      // at most one of alpha / end_ratio
  std::optional<double> end_ratio;  // J(edge)/J(center)

  // [quench]
  double tau_min = 1.0;
  double tau_max = 10.0;
  int tau_count = 5;
  std::optional<double> dt;  // default policy: min(0.01, tau_Q/1000)
  int samples = 200;

  // [backend]
  Backend backend = Backend::fermion;
  int chi = 256;
  double trunc_budget = 1e-4;
  std::uint64_t seed = 12345;
  int trotter_order = 2;

  // [output]
  std::string out_dir = "runs";
  int workers = 1;

  void validate() const;
  ChainSpec chain() const;
  std::vector<double> tau_grid() const;  // log-spaced, ascending
  QuenchProtocol protocol(double tau_Q) const;

  // Canonical per-record identity string: every field that affects the
  // result, fixed order, %.17g floats. Backend-irrelevant fields are
  // omitted so e.g. a chi change does not invalidate fermion records.
  std::string canonical_snapshot(double tau_Q, Backend which) const;
};

const char* backend_name(RunConfig::Backend b);
RunConfig::Backend backend_from_name(const std::string& name);

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// 64-bit FNV-1a, used to name record files after their snapshot.
std::uint64_t fnv1a64(const std::string& text);
std::string hash_hex(std::uint64_t value);

}  // namespace ikzm
