#include "ikzm/fermion.hpp"

#include <cmath>

namespace ikzm {

namespace {

double row_dot(const bdg::RowMajorXd& M, int r1, int r2) {
  return M.row(r1).dot(M.row(r2));
}

}  // namespace

std::vector<double> GaussianView::bond_zz() const {
  const int L = this->L();
  std::vector<double> zz(L - 1);
  const auto& X = modes_.X;
  const auto& Y = modes_.Y;
  for (int b = 0; b < L - 1; ++b) {
    // 2 Re(G + F)_{b,b+1} expressed through mode-matrix rows
    double g = row_dot(X, L + b, L + b + 1) + row_dot(Y, L + b, L + b + 1);
    double f = row_dot(X, L + b, b + 1) + row_dot(Y, L + b, b + 1);
    zz[b] = 2.0 * (g + f);
  }
  return zz;
}

double GaussianView::kink_density() const {
  double sum = 0.0;
  for (double zz : bond_zz()) sum += 1.0 - zz;
  return sum / (2.0 * L());
}

double GaussianView::purity_error() const {
  const auto& X = modes_.X;
  const auto& Y = modes_.Y;
  Eigen::MatrixXd re = X.transpose() * X + Y.transpose() * Y;
  Eigen::MatrixXd im = X.transpose() * Y - Y.transpose() * X;
  re.diagonal().array() -= 1.0;
  return std::max(re.cwiseAbs().maxCoeff(), im.cwiseAbs().maxCoeff());
}

FermionState GaussianView::state() const {
  return FermionState::from_modes(modes_.to_complex());
}

FermionTrajectory evolve(const FermionState& initial, const ChainSpec& spec,
                         const QuenchProtocol& ramp, const EvolveOptions& opts,
                         const FermionObserver& observer) {
  spec.validate();
  ramp.validate();
  if (opts.samples < 2) throw SimulationError("need at least two sample times");
  if (initial.L() != spec.L) throw SimulationError("state size does not match the chain");

  // the protocol assumes we enter from the gapped paramagnet
  for (int i = 0; i < spec.L; ++i)
    if (epsilon(spec.site_coordinate(i), ramp.t_start(), spec, ramp) <= 0.0)
      throw SimulationError("initial field does not dominate the coupling everywhere");

  bdg::ModeBlock block = bdg::ModeBlock::from_complex(initial.to_modes());
  auto bondJ = spec.bond_couplings();
  bdg::ChebyshevPropagator prop(bondJ, block.cols());

  auto do_step = [&](double h_mid, double dt) {
    if (opts.kernel == FermionKernel::chebyshev) {
      prop.step(block, h_mid, dt);
    } else {
      Eigen::MatrixXcd Phi = block.to_complex();
      bdg::reference_step(bondJ, h_mid, dt, Phi);
      block = bdg::ModeBlock::from_complex(Phi);
    }
  };

  FermionTrajectory out;
  out.times.resize(opts.samples);
  out.density.resize(opts.samples);

  GaussianView view(block);
  const double t0 = ramp.t_start();
  const double span = ramp.t_end() - t0;

  out.times[0] = t0;
  out.density[0] = view.kink_density();
  out.max_purity_error = view.purity_error();
  if (observer) observer(t0, view);

  double t = t0;
  for (int s = 1; s < opts.samples; ++s) {
    double t_next = t0 + span * s / (opts.samples - 1);
    double delta = t_next - t;
    int nsub = std::max(1, int(std::ceil(delta / ramp.dt - 1e-9)));
    double sub = delta / nsub;
    for (int j = 0; j < nsub; ++j) {
      double h_mid = field_at(t + (j + 0.5) * sub, ramp, spec);
      do_step(h_mid, sub);
    }
    t = t_next;

    out.times[s] = t;
    out.density[s] = view.kink_density();
    double perr = view.purity_error();
    out.max_purity_error = std::max(out.max_purity_error, perr);
    if (perr > opts.purity_rate_tol * (t - t0))
      throw SimulationError("orthonormality drift exceeded the step-size budget at t = " +
                            std::to_string(t));
    if (observer) observer(t, view);
  }

  out.final_density = out.density.back();
  out.final_state = view.state();
  return out;
}

FermionTrajectory run_fermion_quench(const ChainSpec& spec, const QuenchProtocol& ramp,
                                     const EvolveOptions& opts,
                                     const FermionObserver& observer) {
  double h0 = field_at(ramp.t_start(), ramp, spec);
  GroundState gs = ground_state(build_quadratic(spec, h0));
  return evolve(gs.state, spec, ramp, opts, observer);
}

}  // namespace ikzm
