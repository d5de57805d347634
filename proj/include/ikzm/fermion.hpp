#pragma once

// Ramp evolution of pure Gaussian states with uniformly sampled observables.

#include <functional>
#include <optional>

#include "ikzm/bdg.hpp"
#include "ikzm/quadratic.hpp"

namespace ikzm {

enum class FermionKernel { chebyshev, reference };

struct EvolveOptions {
  int samples = 200;
  FermionKernel kernel = FermionKernel::chebyshev;
  // orthonormality loss allowed per unit time before the run is rejected
  double purity_rate_tol = 1e-6;
};

// Read-only observable access to the propagated mode matrix; cheap views,
// no correlation matrices are materialized unless state() is called.
class GaussianView {
 public:
  explicit GaussianView(const bdg::ModeBlock& modes) : modes_(modes) {}

  int L() const { return modes_.rows() / 2; }
  std::vector<double> bond_zz() const;
  double kink_density() const;
  double purity_error() const;  // max |Phi^dag Phi - 1|
  FermionState state() const;

 private:
  const bdg::ModeBlock& modes_;
};

using FermionObserver = std::function<void(double t, const GaussianView&)>;

struct FermionTrajectory {
  std::vector<double> times;
  std::vector<double> density;
  double final_density = 0.0;
  double max_purity_error = 0.0;
  FermionState final_state;
};

// March the state across [-tau_Q, tau_Q], freezing the field at each substep
// midpoint. Sample times are hit exactly: each inter-sample interval is cut
// into equal substeps no longer than ramp.dt.
FermionTrajectory evolve(const FermionState& initial, const ChainSpec& spec,
                         const QuenchProtocol& ramp, const EvolveOptions& opts = {},
                         const FermionObserver& observer = {});

// ground state at the ramp start followed by evolve()
FermionTrajectory run_fermion_quench(const ChainSpec& spec, const QuenchProtocol& ramp,
                                     const EvolveOptions& opts = {},
                                     const FermionObserver& observer = {});

}  // namespace ikzm
