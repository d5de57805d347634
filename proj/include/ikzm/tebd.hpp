#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "ikzm/model.hpp"
#include "ikzm/mps.hpp"

namespace ikzm {

struct TebdOptions {
  int chi_max = 256;
  double cutoff = 1e-12;
  double trunc_budget = 1e-4;  // abort when cumulative discarded weight passes this
  int samples = 200;
  int order = 2;                       // Trotter order, 2 or 4
  std::ostream* diagnostics = nullptr;  // per-step CSV stream, optional
};

// One Trotter step at a frozen field: odd bonds (dt/2), even bonds (dt),
// odd bonds (dt/2). The transverse field is split half-and-half onto the
// two bonds adjacent to each interior site; edge sites put their full
// weight on their only bond. order=4 composes three such steps.
class TebdStepper {
 public:
  TebdStepper(const ChainSpec& spec, const TebdOptions& opts);

  // advances by dt at field h; returns the discarded weight of this step
  double step(MpsState& state, double h, double dt);

  const ChainSpec& spec() const { return spec_; }

 private:
  double strang_substep(MpsState& state, double h, double dt);
  void apply_layer(MpsState& state, int parity, double h, double dt, double& discarded);

  ChainSpec spec_;
  TebdOptions opts_;
  std::vector<double> bondJ_;
};

struct TebdTrajectory {
  std::vector<double> times;
  std::vector<double> density;
  std::vector<double> trunc_cumulative;  // state.trunc_total at each sample
  std::vector<int> max_bond;
  double final_density = 0.0;
  MpsState final_state;
};

using MpsObserver = std::function<void(double t, const MpsState&)>;

// Evolves through the ramp on the same sampling grid as the free-fermion
// backend. Throws TruncationBudgetExceeded when the accumulated discarded
// weight passes opts.trunc_budget.
TebdTrajectory tebd_evolve(MpsState state, const ChainSpec& spec, const QuenchProtocol& ramp,
                           const TebdOptions& opts = {}, const MpsObserver& observer = {});

}  // namespace ikzm
