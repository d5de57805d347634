#pragma once

// One-step propagators for the BdG mode matrix Phi(t), with
// Phi <- exp(-i H_bdg(h) dt) Phi and the field frozen at the step midpoint
// by the caller.
//
// Two interchangeable kernels:
//  * ChebyshevPropagator: expands the exact exponential in Chebyshev
//    polynomials of the scaled generator. Since H_bdg is real, the
//    recurrence runs in real arithmetic on Re/Im separately; rows are
//    updated in (i, L+i) pairs under OpenMP. Threads never share write
//    targets, so results are identical for any thread count.
//  * reference_step: dense eigendecomposition of the generator, serial.
//    O(L^3) per step; kept as the baseline the fast kernel is tested and
//    benchmarked against.

#include <Eigen/Dense>
#include <vector>

namespace ikzm::bdg {

using RowMajorXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Phi = X + iY with 2L rows and m mode columns
struct ModeBlock {
  RowMajorXd X, Y;

  int rows() const { return int(X.rows()); }
  int cols() const { return int(X.cols()); }
  static ModeBlock from_complex(const Eigen::MatrixXcd& Phi);
  Eigen::MatrixXcd to_complex() const;
};

class ChebyshevPropagator {
 public:
  ChebyshevPropagator(std::vector<double> bondJ, int columns);

  void step(ModeBlock& Phi, double h, double dt);

  int last_order() const { return last_order_; }

 private:
  int L_, m_;
  std::vector<double> J_;        // bond couplings
  std::vector<double> Js_;      // couplings / scale, refreshed per step
  double Jmax_;
  RowMajorXd t1_, t2_, accC_X_, accS_X_, accC_Y_, accS_Y_;
  int last_order_ = 0;

  void run_chain(RowMajorXd& state, double diag, const std::vector<double>& coef,
                 RowMajorXd& accC, RowMajorXd& accS);
};

// exact dense step (serial reference)
void reference_step(const std::vector<double>& bondJ, double h, double dt, Eigen::MatrixXcd& Phi);

}  // namespace ikzm::bdg
