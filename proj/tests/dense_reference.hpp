#pragma once

// Brute-force 2^L reference in the sigma^z product basis, used as an
// independent oracle for both dynamical backends. Completely separate code
// path from the library: full wavefunction, complex Chebyshev expansion.

#include <Eigen/Dense>
#include <vector>

#include "ikzm/model.hpp"

namespace dense {

Eigen::MatrixXd hamiltonian(const ikzm::ChainSpec& spec, double h);

// lowest eigenpair of the full matrix
Eigen::VectorXd ground_state(const ikzm::ChainSpec& spec, double h, double* energy = nullptr);

double kink_density(const Eigen::VectorXcd& psi, int L);
std::vector<double> bond_zz(const Eigen::VectorXcd& psi, int L);
std::vector<double> magnetization_x(const Eigen::VectorXcd& psi, int L);
std::vector<double> magnetization_z(const Eigen::VectorXcd& psi, int L);
double energy(const Eigen::VectorXcd& psi, const ikzm::ChainSpec& spec, double h);

// ramp evolution with the same sampling rule as the backends: equal
// substeps per inter-sample interval, field frozen at substep midpoints
struct Trajectory {
  std::vector<double> times;
  std::vector<double> density;
  Eigen::VectorXcd final_psi;
};
Trajectory evolve_sampled(const ikzm::ChainSpec& spec, const ikzm::QuenchProtocol& ramp,
                          int samples);

}  // namespace dense
