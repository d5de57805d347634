#include "ikzm/bdg.hpp"

#include <cmath>
#include <complex>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ikzm/errors.hpp"

namespace ikzm::bdg {

namespace {

bool use_threads() {
#ifdef _OPENMP
  return omp_get_max_threads() > 1;
#else
  return false;
#endif
}

// One Chebyshev recurrence term fused with the coefficient accumulation:
//   tn = fac * (Hs tc) - sub * tp,   acc += coef * tn
// Hs is the generator divided by the scale: +-diag on the number blocks and
// the coupling stencil between them. Rows are processed in (i, L+i) pairs;
// the two share the coupling subexpressions and no pair writes another
// pair's rows, which keeps the update bit-stable under any thread count.
void cheb_pass(int L, int m, const double* Js, double diag, double fac, const double* tc,
               double sub, const double* tp, double* tn, double coef, double* acc,
               bool parallel) {
#pragma omp parallel for schedule(static) if (parallel)
  for (int i = 0; i < L; ++i) {
    const double jm = i > 0 ? Js[i - 1] : 0.0;
    const double jp = i < L - 1 ? Js[i] : 0.0;
    const double* c0 = tc + size_t(i) * m;
    const double* b0 = tc + size_t(L + i) * m;
    const double* cm = i > 0 ? tc + size_t(i - 1) * m : c0;
    const double* bm = i > 0 ? tc + size_t(L + i - 1) * m : b0;
    const double* cp = i < L - 1 ? tc + size_t(i + 1) * m : c0;
    const double* bp = i < L - 1 ? tc + size_t(L + i + 1) * m : b0;
    const double* pt = tp + size_t(i) * m;
    const double* pb = tp + size_t(L + i) * m;
    double* ot = tn + size_t(i) * m;
    double* ob = tn + size_t(L + i) * m;
    double* at = acc + size_t(i) * m;
    double* ab = acc + size_t(L + i) * m;
    for (int k = 0; k < m; ++k) {
      double u = jm * (bm[k] - cm[k]);
      double w = jp * (cp[k] + bp[k]);
      double top = fac * (diag * c0[k] + u - w) - sub * pt[k];
      double bot = fac * (-diag * b0[k] + u + w) - sub * pb[k];
      ot[k] = top;
      ob[k] = bot;
      at[k] += coef * top;
      ab[k] += coef * bot;
    }
  }
}

}  // namespace

ModeBlock ModeBlock::from_complex(const Eigen::MatrixXcd& Phi) {
  ModeBlock b;
  b.X = Phi.real();
  b.Y = Phi.imag();
  return b;
}

Eigen::MatrixXcd ModeBlock::to_complex() const {
  return X.cast<std::complex<double>>() +
         std::complex<double>(0.0, 1.0) * Y.cast<std::complex<double>>();
}

ChebyshevPropagator::ChebyshevPropagator(std::vector<double> bondJ, int columns)
    : L_(int(bondJ.size()) + 1), m_(columns), J_(std::move(bondJ)), Js_(J_.size()) {
  if (L_ < 2 || m_ < 1) throw SimulationError("propagator needs L >= 2 and at least one mode");
  Jmax_ = 0.0;
  for (double j : J_) Jmax_ = std::max(Jmax_, std::abs(j));
  t1_.resize(2 * L_, m_);
  t2_.resize(2 * L_, m_);
  accC_X_.resize(2 * L_, m_);
  accS_X_.resize(2 * L_, m_);
  accC_Y_.resize(2 * L_, m_);
  accS_Y_.resize(2 * L_, m_);
}

void ChebyshevPropagator::run_chain(RowMajorXd& state, double diag,
                                    const std::vector<double>& bessel, RowMajorXd& accC,
                                    RowMajorXd& accS) {
  const bool par = use_threads();
  const int K = int(bessel.size()) - 1;
  // T_0 = state: cosine-like accumulator starts at J_0(z) T_0
  accC = bessel[0] * state;
  accS.setZero();

  // rotate raw buffers through (previous, current, next)
  double* tp = state.data();
  double* tc = t1_.data();
  double* tn = t2_.data();

  // T_1 = Hs T_0 feeds the sine-like accumulator with +2 J_1
  cheb_pass(L_, m_, Js_.data(), diag, 1.0, tp, 0.0, tp, tc, 2.0 * bessel[1], accS.data(), par);

  for (int k = 2; k <= K; ++k) {
    // T_k = 2 Hs T_{k-1} - T_{k-2}; signs follow (-i)^k split into cos/sin
    double coef = 2.0 * bessel[k];
    bool even = (k % 2) == 0;
    double sign = (k % 4 == 0 || k % 4 == 1) ? 1.0 : -1.0;
    double* acc = even ? accC.data() : accS.data();
    cheb_pass(L_, m_, Js_.data(), diag, 2.0, tc, 1.0, tp, tn, sign * coef, acc, par);
    double* t = tp;
    tp = tc;
    tc = tn;
    tn = t;
  }
}

void ChebyshevPropagator::step(ModeBlock& Phi, double h, double dt) {
  if (Phi.rows() != 2 * L_ || Phi.cols() != m_)
    throw SimulationError("mode block does not match the propagator dimensions");
  if (dt == 0.0) return;
  if (dt < 0.0) throw SimulationError("propagator steps must move forward in time");

  // rigorous spectral bound: |H_bdg| <= 2|h| + |H_bdg(h=0)| = 2|h| + 2 Jmax
  const double scale = 2.0 * std::abs(h) + 2.0 * Jmax_ + 0.5;
  const double z = scale * dt;
  for (size_t b = 0; b < J_.size(); ++b) Js_[b] = J_[b] / scale;
  const double diag = 2.0 * h / scale;

  // Bessel coefficients decay superexponentially once k > z; keep until they
  // fall below the accumulation floor
  std::vector<double> bessel;
  bessel.reserve(24);
  for (int k = 0; k <= 512; ++k) {
    double jk = std::cyl_bessel_j(double(k), z);
    bessel.push_back(jk);
    if (k >= 1 && double(k) > z && std::abs(jk) < 1e-17) break;
  }
  if (bessel.size() < 2) bessel.push_back(0.0);
  last_order_ = int(bessel.size()) - 1;

  run_chain(Phi.X, diag, bessel, accC_X_, accS_X_);
  run_chain(Phi.Y, diag, bessel, accC_Y_, accS_Y_);

  // exp(-i Hs z) = C - iS applied to X + iY
  Phi.X = accC_X_ + accS_Y_;
  Phi.Y = accC_Y_ - accS_X_;
}

void reference_step(const std::vector<double>& bondJ, double h, double dt,
                    Eigen::MatrixXcd& Phi) {
  const int L = int(bondJ.size()) + 1;
  if (Phi.rows() != 2 * L) throw SimulationError("mode matrix does not match the chain");
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(2 * L, 2 * L);
  for (int i = 0; i < L; ++i) {
    M(i, i) = 2.0 * h;
    M(L + i, L + i) = -2.0 * h;
  }
  for (int b = 0; b < L - 1; ++b) {
    M(b, b + 1) = M(b + 1, b) = -bondJ[b];
    M(L + b, L + b + 1) = M(L + b + 1, L + b) = bondJ[b];
    M(b, L + b + 1) = M(L + b + 1, b) = -bondJ[b];
    M(b + 1, L + b) = M(L + b, b + 1) = bondJ[b];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  Eigen::VectorXcd phase(2 * L);
  for (int k = 0; k < 2 * L; ++k)
    phase[k] = std::polar(1.0, -es.eigenvalues()[k] * dt);
  Eigen::MatrixXcd V = es.eigenvectors().cast<std::complex<double>>();
  Phi = V * (phase.asDiagonal() * (V.adjoint() * Phi));
}

}  // namespace ikzm::bdg
