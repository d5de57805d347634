#include "ikzm/tebd.hpp"

#include <cmath>
#include <complex>
#include <ostream>

#include "ikzm/errors.hpp"

namespace ikzm {

using Eigen::Matrix4cd;
using Eigen::Matrix4d;
using cd = std::complex<double>;

namespace {

// two-site generator -J zz - h (wl x1 + wr x2) in the basis 2*s1 + s2
Matrix4d bond_generator(double J, double h, double wl, double wr) {
  Matrix4d H = Matrix4d::Zero();
  const double zz[4] = {1.0, -1.0, -1.0, 1.0};
  for (int i = 0; i < 4; ++i) H(i, i) = -J * zz[i];
  for (int i = 0; i < 4; ++i) {
    H(i ^ 2, i) += -h * wl;  // x on the left site flips s1
    H(i ^ 1, i) += -h * wr;  // x on the right site flips s2
  }
  return H;
}

Matrix4cd bond_gate(double J, double h, double wl, double wr, double theta) {
  Eigen::SelfAdjointEigenSolver<Matrix4d> es(bond_generator(J, h, wl, wr));
  Eigen::Vector4cd phase;
  for (int i = 0; i < 4; ++i)
    phase(i) = std::exp(cd(0.0, -theta * es.eigenvalues()(i)));
  return es.eigenvectors().cast<cd>() * phase.asDiagonal() *
         es.eigenvectors().transpose().cast<cd>();
}

}  // namespace

TebdStepper::TebdStepper(const ChainSpec& spec, const TebdOptions& opts)
    : spec_(spec), opts_(opts), bondJ_(spec.bond_couplings()) {
  spec_.validate();
  if (opts_.chi_max < 1) throw ModelError("chi_max must be positive");
  if (!(opts_.cutoff >= 0.0)) throw ModelError("cutoff must be non-negative");
  if (opts_.order != 2 && opts_.order != 4) throw ModelError("Trotter order must be 2 or 4");
  if (spec_.L < 2) throw ModelError("tebd needs at least 2 sites");
}

void TebdStepper::apply_layer(MpsState& state, int parity, double h, double dt,
                              double& discarded) {
  const int L = spec_.L;
  if (parity > L - 2) return;
  auto weight_l = [&](int b) { return b == 0 ? 1.0 : 0.5; };
  auto weight_r = [&](int b) { return b == L - 2 ? 1.0 : 0.5; };
  if (state.center < 0) canonicalize(state, 0);
  const int last = parity + 2 * ((L - 2 - parity) / 2);
  // sweep toward whichever end is farther, starting from the nearer one
  if (std::abs(state.center - parity) <= std::abs(state.center - (last + 1))) {
    for (int b = parity; b <= last; b += 2) {
      Matrix4cd g = bond_gate(bondJ_[b], h, weight_l(b), weight_r(b), dt);
      discarded += apply_two_site_gate(state, b, g, opts_.chi_max, opts_.cutoff,
                                       GateMove::right);
    }
  } else {
    for (int b = last; b >= parity; b -= 2) {
      Matrix4cd g = bond_gate(bondJ_[b], h, weight_l(b), weight_r(b), dt);
      discarded += apply_two_site_gate(state, b, g, opts_.chi_max, opts_.cutoff,
                                       GateMove::left);
    }
  }
}

double TebdStepper::strang_substep(MpsState& state, double h, double dt) {
  double discarded = 0.0;
  apply_layer(state, 1, h, 0.5 * dt, discarded);  // odd bonds, half step
  apply_layer(state, 0, h, dt, discarded);        // even bonds, full step
  apply_layer(state, 1, h, 0.5 * dt, discarded);  // odd bonds, half step
  return discarded;
}

double TebdStepper::step(MpsState& state, double h, double dt) {
  if (opts_.order == 2) return strang_substep(state, h, dt);
  // Yoshida composition of three Strang substeps
  const double s1 = 1.0 / (2.0 - std::cbrt(2.0));
  const double s0 = 1.0 - 2.0 * s1;
  double discarded = 0.0;
  discarded += strang_substep(state, h, s1 * dt);
  discarded += strang_substep(state, h, s0 * dt);
  discarded += strang_substep(state, h, s1 * dt);
  return discarded;
}

TebdTrajectory tebd_evolve(MpsState state, const ChainSpec& spec, const QuenchProtocol& ramp,
                           const TebdOptions& opts, const MpsObserver& observer) {
  spec.validate();
  ramp.validate();
  if (state.L() != spec.L) throw SimulationError("state length does not match the chain");
  if (opts.samples < 2) throw SimulationError("need at least 2 samples");
  if (ramp.dt > 0.05) throw SimulationError("tebd requires dt <= 0.05");
  double n0 = norm(state);
  if (std::abs(n0 - 1.0) > 1e-8) throw SimulationError("initial state is not normalized");

  TebdStepper stepper(spec, opts);
  if (state.center < 0) canonicalize(state, 0);

  TebdTrajectory traj;
  const double t0 = ramp.t_start(), t1 = ramp.t_end();
  const int S = opts.samples;
  if (opts.diagnostics)
    *opts.diagnostics << "# schema=1 columns=time,step_discarded,cumulative,max_chi\n";

  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.density.push_back(measure_kink_density(state));
    traj.trunc_cumulative.push_back(state.trunc_total);
    traj.max_bond.push_back(state.max_bond_dim());
    if (observer) observer(t, state);
  };

  record(t0);
  double t = t0;
  const double span_all = t1 - t0;
  for (int k = 1; k < S; ++k) {
    double target = t0 + span_all * k / (S - 1);
    double delta = target - t;
    int nsub = std::max(1, static_cast<int>(std::ceil(delta / ramp.dt - 1e-9)));
    double sub = delta / nsub;
    for (int j = 0; j < nsub; ++j) {
      double h = field_at(t + (j + 0.5) * sub, ramp, spec);
      double step_err = stepper.step(state, h, sub);
      if (opts.diagnostics)
        *opts.diagnostics << t + (j + 1) * sub << "," << step_err << "," << state.trunc_total
                          << "," << state.max_bond_dim() << "\n";
      if (state.trunc_total > opts.trunc_budget)
        throw TruncationBudgetExceeded(t + (j + 1) * sub, state.trunc_total);
    }
    t = target;
    record(t);
  }
  traj.final_density = traj.density.back();
  traj.final_state = std::move(state);
  return traj;
}

}  // namespace ikzm
