#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ikzm/model.hpp"
#include "ikzm/mps.hpp"

namespace ikzm {

// Bond-dimension-3 matrix-product operator for
// H = -sum_b J_b sz_b sz_{b+1} - h sum_n sx_n.
// Per site the operator-valued matrix is
//   [ I        0        0 ]
//   [ sz       0        0 ]
//   [ -h sx   -J_n sz   I ]
// contracted with boundary row 2 on the left and column 0 on the right.
struct IsingMpo {
  struct Term {
    int row = 0;
    int col = 0;
    Eigen::Matrix2cd op;
  };
  std::vector<std::vector<Term>> site_terms;
  int L = 0;
  static constexpr int kBondDim = 3;
};

IsingMpo build_ising_mpo(const ChainSpec& spec, double h);

// <psi|H|psi> / <psi|psi>
double mpo_expectation(const MpsState& state, const IsingMpo& mpo);

}  // namespace ikzm
