#include "ikzm/mps.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

#include "ikzm/errors.hpp"

namespace ikzm {

using Eigen::MatrixXcd;
using Eigen::Vector2cd;
using Eigen::VectorXd;
using cd = std::complex<double>;

std::vector<int> MpsState::bond_dims() const {
  std::vector<int> dims;
  for (size_t i = 0; i + 1 < site.size(); ++i)
    dims.push_back(static_cast<int>(site[i][0].cols()));
  return dims;
}

int MpsState::max_bond_dim() const {
  int m = 1;
  for (int d : bond_dims()) m = std::max(m, d);
  return m;
}

MpsState product_state(const std::vector<Vector2cd>& amplitudes) {
  if (amplitudes.empty()) throw ModelError("product state needs at least one site");
  MpsState state;
  state.site.resize(amplitudes.size());
  for (size_t i = 0; i < amplitudes.size(); ++i) {
    Vector2cd a = amplitudes[i];
    double n = a.norm();
    if (n < 1e-300) throw ModelError("zero amplitude in product state");
    a /= n;
    state.site[i][0] = MatrixXcd::Constant(1, 1, a(0));
    state.site[i][1] = MatrixXcd::Constant(1, 1, a(1));
  }
  state.center = 0;
  return state;
}

MpsState x_polarized_state(int L) {
  const double r = 1.0 / std::numbers::sqrt2;
  return product_state(std::vector<Vector2cd>(L, Vector2cd(r, r)));
}

MpsState z_up_state(int L) {
  return product_state(std::vector<Vector2cd>(L, Vector2cd(1.0, 0.0)));
}

MpsState random_product_state(int L, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vector2cd> amps(L);
  for (int i = 0; i < L; ++i) amps[i] = Vector2cd(cd(g(rng), g(rng)), cd(g(rng), g(rng)));
  return product_state(amps);
}

namespace {

// transfer matrices: E' = sum_s A[s]^dag E A[s] going right,
// F' = sum_s conj(A[s]) F A[s]^T going left
MatrixXcd transfer_right(const MatrixXcd& E, const std::array<MatrixXcd, 2>& A) {
  return A[0].adjoint() * E * A[0] + A[1].adjoint() * E * A[1];
}

MatrixXcd transfer_left(const MatrixXcd& F, const std::array<MatrixXcd, 2>& A) {
  return A[0].conjugate() * F * A[0].transpose() + A[1].conjugate() * F * A[1].transpose();
}

// left-orthogonalize site i, pushing the remainder into site i+1
void orth_step_right(MpsState& state, int i) {
  auto& A = state.site[i];
  const long chi_l = A[0].rows(), chi_r = A[0].cols();
  MatrixXcd T(2 * chi_l, chi_r);
  T.topRows(chi_l) = A[0];
  T.bottomRows(chi_l) = A[1];
  Eigen::HouseholderQR<MatrixXcd> qr(T);
  const long k = std::min(2 * chi_l, chi_r);
  MatrixXcd Q = qr.householderQ() * MatrixXcd::Identity(2 * chi_l, k);
  MatrixXcd R = qr.matrixQR().topLeftCorner(k, chi_r).triangularView<Eigen::Upper>();
  A[0] = Q.topRows(chi_l);
  A[1] = Q.bottomRows(chi_l);
  state.site[i + 1][0] = R * state.site[i + 1][0];
  state.site[i + 1][1] = R * state.site[i + 1][1];
}

// right-orthogonalize site i, pushing the remainder into site i-1
void orth_step_left(MpsState& state, int i) {
  auto& A = state.site[i];
  const long chi_l = A[0].rows(), chi_r = A[0].cols();
  MatrixXcd T(chi_l, 2 * chi_r);
  T.leftCols(chi_r) = A[0];
  T.rightCols(chi_r) = A[1];
  Eigen::HouseholderQR<MatrixXcd> qr(T.adjoint());
  const long k = std::min(chi_l, 2 * chi_r);
  MatrixXcd Q = (qr.householderQ() * MatrixXcd::Identity(2 * chi_r, k)).adjoint();
  MatrixXcd Lm = qr.matrixQR().topLeftCorner(k, chi_l).triangularView<Eigen::Upper>().adjoint();
  A[0] = Q.leftCols(chi_r);
  A[1] = Q.rightCols(chi_r);
  state.site[i - 1][0] = state.site[i - 1][0] * Lm;
  state.site[i - 1][1] = state.site[i - 1][1] * Lm;
}

}  // namespace

double norm(const MpsState& state) {
  MatrixXcd E = MatrixXcd::Identity(1, 1);
  for (const auto& A : state.site) E = transfer_right(E, A);
  return std::sqrt(std::abs(E(0, 0).real()));
}

void canonicalize(MpsState& state, int center) {
  const int L = state.L();
  if (center < 0 || center >= L) throw ModelError("canonicalize: center out of range");
  for (int i = 0; i < center; ++i) orth_step_right(state, i);
  for (int i = L - 1; i > center; --i) orth_step_left(state, i);
  auto& C = state.site[center];
  double n = std::sqrt(C[0].squaredNorm() + C[1].squaredNorm());
  if (n < 1e-300) throw SimulationError("canonicalize: state has zero norm");
  C[0] /= n;
  C[1] /= n;
  state.center = center;
}

void move_center(MpsState& state, int target) {
  if (state.center < 0) throw SimulationError("move_center: no canonical form");
  if (target < 0 || target >= state.L()) throw ModelError("move_center: target out of range");
  while (state.center < target) {
    orth_step_right(state, state.center);
    ++state.center;
  }
  while (state.center > target) {
    orth_step_left(state, state.center);
    --state.center;
  }
}

double canonical_residual(const MpsState& state) {
  if (state.center < 0) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (int i = 0; i < state.center; ++i) {
    const auto& A = state.site[i];
    MatrixXcd G = A[0].adjoint() * A[0] + A[1].adjoint() * A[1];
    worst = std::max(worst, (G - MatrixXcd::Identity(G.rows(), G.cols())).norm());
  }
  for (int i = state.L() - 1; i > state.center; --i) {
    const auto& A = state.site[i];
    MatrixXcd G = A[0] * A[0].adjoint() + A[1] * A[1].adjoint();
    worst = std::max(worst, (G - MatrixXcd::Identity(G.rows(), G.cols())).norm());
  }
  return worst;
}

SvdSplit truncated_svd(const Eigen::MatrixXcd& M, int chi_max, double cutoff) {
  if (chi_max < 1) throw ModelError("truncated_svd: chi_max must be positive");
  Eigen::BDCSVD<MatrixXcd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sv = svd.singularValues();
  const long r = sv.size();
  double total = sv.squaredNorm();
  if (total <= 0.0) throw SimulationError("truncated_svd: zero matrix");

  // drop the smallest tail with relative weight below cutoff, then cap
  double tail = 0.0;
  long keep = r;
  while (keep > 1 && (tail + sv(keep - 1) * sv(keep - 1)) <= cutoff * total) {
    tail += sv(keep - 1) * sv(keep - 1);
    --keep;
  }
  keep = std::min(keep, static_cast<long>(chi_max));

  SvdSplit out;
  out.discarded = 0.0;
  for (long i = keep; i < r; ++i) out.discarded += sv(i) * sv(i);
  out.S = sv.head(keep);
  out.S /= out.S.norm();
  out.U = svd.matrixU().leftCols(keep);
  out.Vh = svd.matrixV().leftCols(keep).adjoint();
  return out;
}

double apply_two_site_gate(MpsState& state, int b, const Eigen::Matrix4cd& gate,
                           int chi_max, double cutoff, GateMove move) {
  const int L = state.L();
  if (b < 0 || b + 1 >= L) throw ModelError("apply_two_site_gate: bond out of range");
  if (state.center < 0) canonicalize(state, b);
  if (state.center < b) move_center(state, b);
  if (state.center > b + 1) move_center(state, b + 1);

  const auto& Al = state.site[b];
  const auto& Ar = state.site[b + 1];
  const long chi_l = Al[0].rows(), chi_r = Ar[0].cols();

  std::array<std::array<MatrixXcd, 2>, 2> block, rotated;
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2) block[s1][s2] = Al[s1] * Ar[s2];
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2) {
      rotated[s1][s2] = MatrixXcd::Zero(chi_l, chi_r);
      for (int t1 = 0; t1 < 2; ++t1)
        for (int t2 = 0; t2 < 2; ++t2) {
          cd g = gate(2 * s1 + s2, 2 * t1 + t2);
          if (g != cd(0.0, 0.0)) rotated[s1][s2] += g * block[t1][t2];
        }
    }

  MatrixXcd theta(2 * chi_l, 2 * chi_r);
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2)
      theta.block(s1 * chi_l, s2 * chi_r, chi_l, chi_r) = rotated[s1][s2];

  SvdSplit split = truncated_svd(theta, chi_max, cutoff);
  const long k = split.S.size();
  MatrixXcd left, right;
  if (move == GateMove::right) {
    left = split.U;
    right = split.S.asDiagonal() * split.Vh;
    state.center = b + 1;
  } else {
    left = split.U * split.S.asDiagonal();
    right = split.Vh;
    state.center = b;
  }
  state.site[b][0] = left.topRows(chi_l);
  state.site[b][1] = left.bottomRows(chi_l);
  state.site[b + 1][0] = right.leftCols(chi_r);
  state.site[b + 1][1] = right.rightCols(chi_r);
  state.trunc_total += split.discarded;
  return split.discarded;
}

namespace {

std::vector<MatrixXcd> right_environments(const MpsState& state) {
  const int L = state.L();
  std::vector<MatrixXcd> F(L + 1);
  F[L] = MatrixXcd::Identity(1, 1);
  for (int i = L - 1; i >= 0; --i) F[i] = transfer_left(F[i + 1], state.site[i]);
  return F;
}

}  // namespace

std::vector<double> measure_bond_zz(const MpsState& state) {
  const int L = state.L();
  if (L < 2) return {};
  std::vector<MatrixXcd> F = right_environments(state);
  const double nrm2 = std::abs(F[0](0, 0).real());
  if (nrm2 < 1e-300) throw SimulationError("measure_bond_zz: zero-norm state");
  std::vector<double> zz(L - 1);
  MatrixXcd E = MatrixXcd::Identity(1, 1);
  for (int b = 0; b < L - 1; ++b) {
    const auto& A = state.site[b];
    const auto& B = state.site[b + 1];
    MatrixXcd Ez = A[0].adjoint() * E * A[0] - A[1].adjoint() * E * A[1];
    MatrixXcd Ezz = B[0].adjoint() * Ez * B[0] - B[1].adjoint() * Ez * B[1];
    zz[b] = (Ezz.cwiseProduct(F[b + 2])).sum().real() / nrm2;
    E = transfer_right(E, A);
  }
  return zz;
}

double measure_kink_density(const MpsState& state) {
  const int L = state.L();
  double sum = 0.0;
  for (double zz : measure_bond_zz(state)) sum += 1.0 - zz;
  return sum / (2.0 * L);
}

Magnetization measure_magnetization(const MpsState& state, Axis axis) {
  const int L = state.L();
  std::vector<MatrixXcd> F = right_environments(state);
  const double nrm2 = std::abs(F[0](0, 0).real());
  if (nrm2 < 1e-300) throw SimulationError("measure_magnetization: zero-norm state");
  Magnetization out;
  out.per_site.resize(L);
  MatrixXcd E = MatrixXcd::Identity(1, 1);
  for (int i = 0; i < L; ++i) {
    const auto& A = state.site[i];
    MatrixXcd Eo;
    if (axis == Axis::z)
      Eo = A[0].adjoint() * E * A[0] - A[1].adjoint() * E * A[1];
    else
      Eo = A[0].adjoint() * E * A[1] + A[1].adjoint() * E * A[0];
    out.per_site[i] = (Eo.cwiseProduct(F[i + 1])).sum().real() / nrm2;
    out.average += out.per_site[i] / L;
    E = transfer_right(E, A);
  }
  return out;
}

std::complex<double> overlap(const MpsState& bra, const MpsState& ket) {
  if (bra.L() != ket.L()) throw ModelError("overlap: length mismatch");
  MatrixXcd E = MatrixXcd::Identity(1, 1);
  for (int i = 0; i < bra.L(); ++i)
    E = bra.site[i][0].adjoint() * E * ket.site[i][0] +
        bra.site[i][1].adjoint() * E * ket.site[i][1];
  return E(0, 0);
}

}  // namespace ikzm
