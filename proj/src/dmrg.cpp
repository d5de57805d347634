#include "ikzm/dmrg.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <sstream>

#include "ikzm/errors.hpp"

namespace ikzm {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using cd = std::complex<double>;

namespace {

// two-site wavefunction as four chi_l x chi_r slices indexed by (s1, s2)
struct Theta {
  std::array<MatrixXcd, 4> m;

  static Theta zero_like(const Theta& other) {
    Theta t;
    for (int i = 0; i < 4; ++i)
      t.m[i] = MatrixXcd::Zero(other.m[i].rows(), other.m[i].cols());
    return t;
  }
  double norm() const {
    double s = 0.0;
    for (const auto& b : m) s += b.squaredNorm();
    return std::sqrt(s);
  }
  void scale(double a) {
    for (auto& b : m) b *= a;
  }
  void axpy(cd a, const Theta& other) {
    for (int i = 0; i < 4; ++i) m[i] += a * other.m[i];
  }
  cd dot(const Theta& other) const {  // <this|other>
    cd s = 0.0;
    for (int i = 0; i < 4; ++i) s += (m[i].conjugate().cwiseProduct(other.m[i])).sum();
    return s;
  }
};

// environment stacks: env[w] has shape chi x chi with (bra, ket) indices
using Env = std::vector<MatrixXcd>;

Env initial_env(int chi = 1, int hot_index = 2) {
  Env e(IsingMpo::kBondDim, MatrixXcd::Zero(chi, chi));
  e[hot_index] = MatrixXcd::Identity(chi, chi);
  return e;
}

Env contract_left(const Env& E, const std::vector<IsingMpo::Term>& terms,
                  const std::array<MatrixXcd, 2>& A) {
  const long chi_r = A[0].cols();
  Env next(IsingMpo::kBondDim, MatrixXcd::Zero(chi_r, chi_r));
  for (const auto& t : terms) {
    if (E[t.row].isZero(0.0)) continue;
    for (int sb = 0; sb < 2; ++sb)
      for (int sk = 0; sk < 2; ++sk) {
        cd c = t.op(sb, sk);
        if (c == cd(0.0, 0.0)) continue;
        next[t.col] += c * (A[sb].adjoint() * E[t.row] * A[sk]);
      }
  }
  return next;
}

Env contract_right(const Env& F, const std::vector<IsingMpo::Term>& terms,
                   const std::array<MatrixXcd, 2>& A) {
  const long chi_l = A[0].rows();
  Env next(IsingMpo::kBondDim, MatrixXcd::Zero(chi_l, chi_l));
  for (const auto& t : terms) {
    if (F[t.col].isZero(0.0)) continue;
    for (int sb = 0; sb < 2; ++sb)
      for (int sk = 0; sk < 2; ++sk) {
        cd c = t.op(sb, sk);
        if (c == cd(0.0, 0.0)) continue;
        next[t.row] += c * (A[sb].conjugate() * F[t.col] * A[sk].transpose());
      }
  }
  return next;
}

// effective two-site Hamiltonian application
Theta apply_heff(const Env& L, const Env& R, const std::vector<IsingMpo::Term>& T1,
                 const std::vector<IsingMpo::Term>& T2, const Theta& in) {
  Theta out = Theta::zero_like(in);
  for (const auto& t1 : T1) {
    if (L[t1.row].isZero(0.0)) continue;
    for (const auto& t2 : T2) {
      if (t1.col != t2.row || R[t2.col].isZero(0.0)) continue;
      for (int sb1 = 0; sb1 < 2; ++sb1)
        for (int sk1 = 0; sk1 < 2; ++sk1) {
          cd c1 = t1.op(sb1, sk1);
          if (c1 == cd(0.0, 0.0)) continue;
          for (int sb2 = 0; sb2 < 2; ++sb2)
            for (int sk2 = 0; sk2 < 2; ++sk2) {
              cd c = c1 * t2.op(sb2, sk2);
              if (c == cd(0.0, 0.0)) continue;
              out.m[2 * sb1 + sb2] +=
                  c * (L[t1.row] * in.m[2 * sk1 + sk2] * R[t2.col].transpose());
            }
        }
    }
  }
  return out;
}

// Lanczos with full reorthogonalization for the lowest eigenpair
double lanczos_ground(const Env& L, const Env& R, const std::vector<IsingMpo::Term>& T1,
                      const std::vector<IsingMpo::Term>& T2, Theta& theta) {
  const long dim = 4 * theta.m[0].rows() * theta.m[0].cols();
  double nrm = theta.norm();
  if (nrm < 1e-14) {
    theta.m[0].setConstant(1.0);
    nrm = theta.norm();
  }
  theta.scale(1.0 / nrm);

  double value = 0.0;
  for (int restart = 0; restart < 3; ++restart) {
    const int kmax = static_cast<int>(std::min<long>(dim, 28));
    std::vector<Theta> basis;
    std::vector<double> alpha, beta;
    basis.push_back(theta);
    for (int k = 0; k < kmax; ++k) {
      Theta w = apply_heff(L, R, T1, T2, basis[k]);
      double a = basis[k].dot(w).real();
      alpha.push_back(a);
      w.axpy(-a, basis[k]);
      if (k > 0) w.axpy(-beta[k - 1], basis[k - 1]);
      for (const Theta& v : basis) w.axpy(-v.dot(w), v);  // reorthogonalize
      double b = w.norm();
      if (b < 1e-13 * (1.0 + std::abs(a)) || k + 1 == kmax) {
        beta.push_back(b);
        break;
      }
      beta.push_back(b);
      w.scale(1.0 / b);
      basis.push_back(std::move(w));
    }

    const int m = static_cast<int>(basis.size());
    MatrixXd tri = MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      tri(i, i) = alpha[i];
      if (i + 1 < m) tri(i, i + 1) = tri(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(tri);
    value = es.eigenvalues()(0);
    VectorXd coef = es.eigenvectors().col(0);
    Theta next = Theta::zero_like(theta);
    for (int i = 0; i < m; ++i) next.axpy(coef(i), basis[i]);
    next.scale(1.0 / next.norm());
    theta = std::move(next);

    Theta resid = apply_heff(L, R, T1, T2, theta);
    resid.axpy(-value, theta);
    if (resid.norm() < 1e-11 * (1.0 + std::abs(value))) break;
  }
  return value;
}

Theta merge_sites(const MpsState& state, int b) {
  Theta t;
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2)
      t.m[2 * s1 + s2] = state.site[b][s1] * state.site[b + 1][s2];
  return t;
}

// split theta at bond b; center ends on the `right` side or not
double split_theta(MpsState& state, int b, const Theta& theta, int chi_max, double cutoff,
                   bool right) {
  const long chi_l = theta.m[0].rows(), chi_r = theta.m[0].cols();
  MatrixXcd M(2 * chi_l, 2 * chi_r);
  for (int s1 = 0; s1 < 2; ++s1)
    for (int s2 = 0; s2 < 2; ++s2)
      M.block(s1 * chi_l, s2 * chi_r, chi_l, chi_r) = theta.m[2 * s1 + s2];
  SvdSplit split = truncated_svd(M, chi_max, cutoff);
  MatrixXcd left, rightm;
  if (right) {
    left = split.U;
    rightm = split.S.asDiagonal() * split.Vh;
    state.center = b + 1;
  } else {
    left = split.U * split.S.asDiagonal();
    rightm = split.Vh;
    state.center = b;
  }
  state.site[b][0] = left.topRows(chi_l);
  state.site[b][1] = left.bottomRows(chi_l);
  state.site[b + 1][0] = rightm.leftCols(chi_r);
  state.site[b + 1][1] = rightm.rightCols(chi_r);
  state.trunc_total += split.discarded;
  return split.discarded;
}

}  // namespace

DmrgResult dmrg_ground_state(const ChainSpec& spec, double h, const DmrgOptions& opts) {
  spec.validate();
  if (h < 0.0) throw ModelError("field must be non-negative");
  if (opts.chi_max < 1) throw ModelError("chi_max must be positive");
  if (!(opts.sweep_tol > 0.0) || opts.max_sweeps < 1) throw ModelError("bad dmrg options");
  const int L = spec.L;
  if (L < 2) throw ModelError("dmrg needs at least 2 sites");

  IsingMpo mpo = build_ising_mpo(spec, h);
  DmrgResult res;
  res.state = random_product_state(L, opts.seed);
  canonicalize(res.state, 0);

  std::vector<Env> lenv(L + 1), renv(L + 1);
  lenv[0] = initial_env(1, 2);
  renv[L] = initial_env(1, 0);
  for (int i = L - 1; i >= 1; --i)
    renv[i] = contract_right(renv[i + 1], mpo.site_terms[i], res.state.site[i]);

  double prev = 0.0;
  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    double energy = 0.0;
    for (int b = 0; b <= L - 2; ++b) {  // left to right
      Theta theta = merge_sites(res.state, b);
      energy = lanczos_ground(lenv[b], renv[b + 2], mpo.site_terms[b],
                              mpo.site_terms[b + 1], theta);
      split_theta(res.state, b, theta, opts.chi_max, opts.cutoff, true);
      lenv[b + 1] = contract_left(lenv[b], mpo.site_terms[b], res.state.site[b]);
    }
    for (int b = L - 2; b >= 0; --b) {  // right to left
      Theta theta = merge_sites(res.state, b);
      energy = lanczos_ground(lenv[b], renv[b + 2], mpo.site_terms[b],
                              mpo.site_terms[b + 1], theta);
      split_theta(res.state, b, theta, opts.chi_max, opts.cutoff, false);
      renv[b + 1] = contract_right(renv[b + 2], mpo.site_terms[b + 1],
                                   res.state.site[b + 1]);
    }
    res.sweep_energies.push_back(energy);
    res.sweeps = sweep;
    res.energy = energy;
    // second clause: change is at the floating-point floor of |E|
    if (sweep > 1 &&
        (std::abs(energy - prev) < opts.sweep_tol || std::abs(energy - prev) < 1e-13 * std::abs(energy))) {
      res.converged = true;
      break;
    }
    prev = energy;
  }

  if (!res.converged) {
    std::ostringstream msg;
    msg.precision(15);
    msg << "dmrg did not converge after " << opts.max_sweeps << " sweeps; last energies ";
    size_t n = res.sweep_energies.size();
    if (n >= 2) msg << res.sweep_energies[n - 2] << ", ";
    msg << res.sweep_energies[n - 1];
    throw SimulationError(msg.str());
  }
  return res;
}

}  // namespace ikzm
