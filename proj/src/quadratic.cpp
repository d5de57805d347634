#include "ikzm/quadratic.hpp"

#include <cmath>

namespace ikzm {

QuadraticHamiltonian build_quadratic(const ChainSpec& spec, double h) {
  if (h < 0.0) throw ModelError("transverse field must be non-negative");
  QuadraticHamiltonian H;
  H.L = spec.L;
  H.h = h;
  H.bondJ = spec.bond_couplings();
  H.A = Eigen::MatrixXd::Zero(spec.L, spec.L);
  H.B = Eigen::MatrixXd::Zero(spec.L, spec.L);
  for (int i = 0; i < spec.L; ++i) H.A(i, i) = 2.0 * h;
  for (int b = 0; b < spec.L - 1; ++b) {
    H.A(b, b + 1) = -H.bondJ[b];
    H.A(b + 1, b) = -H.bondJ[b];
    H.B(b, b + 1) = -H.bondJ[b];
    H.B(b + 1, b) = H.bondJ[b];
  }
  return H;
}

Eigen::MatrixXd bdg_matrix(const QuadraticHamiltonian& H) {
  int L = H.L;
  Eigen::MatrixXd M(2 * L, 2 * L);
  M.topLeftCorner(L, L) = H.A;
  M.topRightCorner(L, L) = H.B;
  M.bottomLeftCorner(L, L) = -H.B;
  M.bottomRightCorner(L, L) = -H.A;
  return M;
}

std::vector<double> bdg_spectrum(const QuadraticHamiltonian& H) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(bdg_matrix(H), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

Eigen::MatrixXcd FermionState::covariance() const {
  int n = L();
  Eigen::MatrixXcd D(2 * n, 2 * n);
  D.topLeftCorner(n, n) = Eigen::MatrixXcd::Identity(n, n) - G.conjugate();
  D.topRightCorner(n, n) = -F.conjugate();
  D.bottomLeftCorner(n, n) = F;
  D.bottomRightCorner(n, n) = G;
  return D;
}

FermionState FermionState::from_modes(const Eigen::MatrixXcd& modes) {
  int L = int(modes.rows()) / 2;
  if (modes.rows() != 2 * L || modes.cols() != L)
    throw SimulationError("mode matrix must be 2L x L");
  FermionState s;
  auto top = modes.topRows(L);
  auto bot = modes.bottomRows(L);
  s.G = bot * bot.adjoint();
  s.F = bot * top.adjoint();
  return s;
}

Eigen::MatrixXcd FermionState::to_modes() const {
  int n = L();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(covariance());
  if (es.info() != Eigen::Success) throw SimulationError("covariance eigendecomposition failed");
  const auto& ev = es.eigenvalues();
  int occupied = 0;
  for (int k = 0; k < 2 * n; ++k) {
    if (ev[k] < -1e-8 || ev[k] > 1.0 + 1e-8)
      throw SimulationError("covariance eigenvalue outside [0, 1]");
    if (ev[k] > 0.5) ++occupied;
    if (ev[k] > 0.25 && ev[k] < 0.75)
      throw SimulationError("state is not a pure Gaussian state (fractional occupation)");
  }
  if (occupied != n) throw SimulationError("covariance is not a rank-L projector");
  return es.eigenvectors().rightCols(n);
}

double FermionState::hermiticity_error() const {
  return (G - G.adjoint()).cwiseAbs().maxCoeff();
}

double FermionState::antisymmetry_error() const {
  return (F + F.transpose()).cwiseAbs().maxCoeff();
}

double FermionState::purity_error() const {
  Eigen::MatrixXcd D = covariance();
  return (D * D - D).cwiseAbs().maxCoeff();
}

std::pair<double, double> FermionState::occupation_bounds() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.minCoeff(), ev.maxCoeff()};
}

std::vector<double> bond_zz(const FermionState& state) {
  int L = state.L();
  std::vector<double> zz(L - 1);
  for (int b = 0; b < L - 1; ++b)
    zz[b] = 2.0 * (state.G(b, b + 1) + state.F(b, b + 1)).real();
  return zz;
}

double kink_density(const FermionState& state) {
  int L = state.L();
  double sum = 0.0;
  for (double zz : bond_zz(state)) sum += 1.0 - zz;
  return sum / (2.0 * L);
}

double energy_expectation(const FermionState& state, const QuadraticHamiltonian& H) {
  double e = 0.0;
  for (int i = 0; i < H.L; ++i) e += H.A(i, i) * state.G(i, i).real();
  for (int b = 0; b < H.L - 1; ++b) {
    e += 2.0 * H.A(b, b + 1) * state.G(b, b + 1).real();
    e += 2.0 * H.B(b, b + 1) * state.F(b, b + 1).real();
  }
  return e - H.h * H.L;
}

GroundState ground_state(const QuadraticHamiltonian& H) {
  int L = H.L;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(bdg_matrix(H));
  if (es.info() != Eigen::Success) throw SimulationError("BdG eigendecomposition failed");
  const auto& ev = es.eigenvalues();
  double gap = std::min(std::abs(ev[L - 1]), std::abs(ev[L]));
  if (gap < 1e-12) throw DegenerateGroundState(gap);

  GroundState gs;
  gs.gap = gap;
  double sum = 0.0;
  for (int k = L; k < 2 * L; ++k) sum += ev[k];
  gs.energy = -0.5 * sum;
  // filling the positive-energy quasiparticle modes of <psi psi^dag>
  gs.state = FermionState::from_modes(es.eigenvectors().rightCols(L).cast<std::complex<double>>());
  return gs;
}

}  // namespace ikzm
