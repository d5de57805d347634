#include "ikzm/mpo.hpp"

#include "ikzm/errors.hpp"

namespace ikzm {

using Eigen::Matrix2cd;
using Eigen::MatrixXcd;

namespace {

Matrix2cd pauli_x() {
  Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Matrix2cd pauli_z() {
  Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

}  // namespace

IsingMpo build_ising_mpo(const ChainSpec& spec, double h) {
  spec.validate();
  if (h < 0.0) throw ModelError("field must be non-negative");
  IsingMpo mpo;
  mpo.L = spec.L;
  mpo.site_terms.resize(spec.L);
  std::vector<double> J = spec.bond_couplings();
  const Matrix2cd id = Matrix2cd::Identity();
  for (int n = 0; n < spec.L; ++n) {
    auto& t = mpo.site_terms[n];
    t.push_back({0, 0, id});
    t.push_back({1, 0, pauli_z()});
    t.push_back({2, 0, -h * pauli_x()});
    if (n < spec.L - 1) t.push_back({2, 1, -J[n] * pauli_z()});
    t.push_back({2, 2, id});
  }
  return mpo;
}

double mpo_expectation(const MpsState& state, const IsingMpo& mpo) {
  if (state.L() != mpo.L) throw ModelError("mpo_expectation: length mismatch");
  // E[w](a_bra, a_ket); boundary selects MPO row 2
  std::vector<MatrixXcd> E(IsingMpo::kBondDim);
  for (auto& m : E) m = MatrixXcd::Zero(1, 1);
  E[2](0, 0) = 1.0;
  MatrixXcd N = MatrixXcd::Identity(1, 1);
  for (int n = 0; n < mpo.L; ++n) {
    const auto& A = state.site[n];
    const long chi_r = A[0].cols();
    std::vector<MatrixXcd> next(IsingMpo::kBondDim,
                                MatrixXcd::Zero(chi_r, chi_r));
    for (const IsingMpo::Term& t : mpo.site_terms[n]) {
      if (E[t.row].isZero(0.0)) continue;
      for (int sb = 0; sb < 2; ++sb)
        for (int sk = 0; sk < 2; ++sk) {
          std::complex<double> c = t.op(sb, sk);
          if (c == std::complex<double>(0.0, 0.0)) continue;
          next[t.col] += c * (A[sb].adjoint() * E[t.row] * A[sk]);
        }
    }
    E = std::move(next);
    N = A[0].adjoint() * N * A[0] + A[1].adjoint() * N * A[1];
  }
  double nrm2 = N(0, 0).real();
  if (nrm2 < 1e-300) throw SimulationError("mpo_expectation: zero-norm state");
  return E[0](0, 0).real() / nrm2;
}

}  // namespace ikzm
