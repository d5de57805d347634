#pragma once

#include <stdexcept>
#include <string>

namespace ikzm {

// Bad physical parameters or out-of-domain arguments.
struct ModelError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed or inconsistent run configuration (files, CLI).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A simulation could not produce a trustworthy result.
struct SimulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateGroundState : SimulationError {
  double gap;
  explicit DegenerateGroundState(double g)
      : SimulationError("near-degenerate ground state, spectral gap " + std::to_string(g)),
        gap(g) {}
};

struct TruncationBudgetExceeded : SimulationError {
  double time_reached;
  double accumulated;
  TruncationBudgetExceeded(double t, double e)
      : SimulationError("truncation error budget exceeded at t = " + std::to_string(t) +
                        " (accumulated " + std::to_string(e) + ")"),
        time_reached(t), accumulated(e) {}
};

// Scaling fits rejected the data (too few points, degenerate abscissas, ...).
struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ikzm
