#pragma once

// Jordan-Wigner image of the spin chain and Gaussian (correlation-matrix)
// states. Conventions:
//
//   sigma^x_n = 1 - 2 c^dag_n c_n
//   sigma^z_n sigma^z_{n+1} = (c^dag_n - c_n)(c^dag_{n+1} + c_{n+1})
//
// so H_spin = sum A_ij c^dag_i c_j + 1/2 sum (B_ij c^dag_i c^dag_j + h.c.) - h L
// with A = 2h on the diagonal and -J(bond) on the first off-diagonals, and
// B antisymmetric with -J(bond) above the diagonal. Equivalently
// H_spin = 1/2 psi^dag H_bdg psi with psi = (c, c^dag)^T: the -hL constant is
// absorbed exactly, so BdG eigenvalue sums give total spin energies.

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "ikzm/model.hpp"

namespace ikzm {

struct QuadraticHamiltonian {
  int L = 0;
  double h = 0.0;
  std::vector<double> bondJ;
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
};

QuadraticHamiltonian build_quadratic(const ChainSpec& spec, double h);

// [[A, B], [-B, -A]], symmetric 2L x 2L
Eigen::MatrixXd bdg_matrix(const QuadraticHamiltonian& H);

// ascending single-particle spectrum (comes in +-epsilon pairs)
std::vector<double> bdg_spectrum(const QuadraticHamiltonian& H);

// Pure Gaussian state described by G_ij = <c^dag_i c_j> and
// F_ij = <c^dag_i c^dag_j>.
struct FermionState {
  Eigen::MatrixXcd G;
  Eigen::MatrixXcd F;

  int L() const { return int(G.rows()); }

  // D = <psi psi^dag> = [[1 - G*, -F*], [F, G]]; Hermitian, idempotent for
  // pure states
  Eigen::MatrixXcd covariance() const;

  // D = Phi Phi^dag for a 2L x L mode matrix with orthonormal columns
  static FermionState from_modes(const Eigen::MatrixXcd& modes);
  Eigen::MatrixXcd to_modes() const;  // throws SimulationError if not pure

  double hermiticity_error() const;   // max |G - G^dag|
  double antisymmetry_error() const;  // max |F + F^T|
  double purity_error() const;        // max |D^2 - D|
  std::pair<double, double> occupation_bounds() const;  // eigenvalue range of G
};

// <sigma^z_b sigma^z_{b+1}> for each bond
std::vector<double> bond_zz(const FermionState& state);

// kink density d = (1/2L) sum_b (1 - <sigma^z_b sigma^z_{b+1}>), in [0, (L-1)/L]
double kink_density(const FermionState& state);

double energy_expectation(const FermionState& state, const QuadraticHamiltonian& H);

struct GroundState {
  FermionState state;
  double energy = 0.0;
  double gap = 0.0;
};

// BdG ground state; throws DegenerateGroundState when the gap closes
GroundState ground_state(const QuadraticHamiltonian& H);

}  // namespace ikzm
