#pragma once

#include <cstdint>
#include <vector>

#include "ikzm/model.hpp"
#include "ikzm/mpo.hpp"
#include "ikzm/mps.hpp"

namespace ikzm {

struct DmrgOptions {
  int chi_max = 128;
  double sweep_tol = 1e-10;  // absolute energy change per sweep
  int max_sweeps = 50;
  double cutoff = 1e-12;
  std::uint64_t seed = 12345;  // random product-state initialization
};

struct DmrgResult {
  MpsState state;
  double energy = 0.0;
  bool converged = false;
  int sweeps = 0;
  std::vector<double> sweep_energies;
};

// Two-site DMRG for the transverse-field chain at fixed field h. Throws
// SimulationError with the last two sweep energies if max_sweeps is hit.
DmrgResult dmrg_ground_state(const ChainSpec& spec, double h, const DmrgOptions& opts = {});

}  // namespace ikzm
