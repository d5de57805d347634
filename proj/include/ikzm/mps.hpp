#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "ikzm/model.hpp"

namespace ikzm {

// Matrix-product state with open boundaries. site[i][s] is the chi_i x
// chi_{i+1} slice for physical index s in the sigma-z basis (s=0 up).
// center is the orthogonality center, -1 when no canonical form is known.
// trunc_total accumulates the discarded squared singular values of every
// truncating SVD applied to this state.
struct MpsState {
  std::vector<std::array<Eigen::MatrixXcd, 2>> site;
  int center = -1;
  double trunc_total = 0.0;

  int L() const { return static_cast<int>(site.size()); }
  std::vector<int> bond_dims() const;
  int max_bond_dim() const;
};

MpsState product_state(const std::vector<Eigen::Vector2cd>& amplitudes);
MpsState x_polarized_state(int L);
MpsState z_up_state(int L);
MpsState random_product_state(int L, std::uint64_t seed);

double norm(const MpsState& state);

// Puts the state into mixed-canonical form about `center` and normalizes.
void canonicalize(MpsState& state, int center);

// Moves the orthogonality center by QR steps, exactly, preserving norm.
// Requires an existing canonical form.
void move_center(MpsState& state, int target);

// Frobenius residuals of the isometry conditions left and right of center.
double canonical_residual(const MpsState& state);

struct SvdSplit {
  Eigen::MatrixXcd U;
  Eigen::VectorXd S;  // kept singular values, descending, renormalized
  Eigen::MatrixXcd Vh;
  double discarded = 0.0;  // sum of discarded squared singular values
};

// Truncates to at most chi_max values, additionally dropping the smallest
// tail whose squared weight stays below cutoff relative to the total.
SvdSplit truncated_svd(const Eigen::MatrixXcd& M, int chi_max, double cutoff);

enum class GateMove { left, right };

// Applies a two-site gate on (b, b+1); gate is 4x4 in the basis 2*s_b + s_{b+1}.
// Leaves the center at b+1 (right) or b (left). Returns the discarded weight,
// which is also added to state.trunc_total; the kept spectrum is renormalized.
double apply_two_site_gate(MpsState& state, int b, const Eigen::Matrix4cd& gate,
                           int chi_max, double cutoff, GateMove move);

// Gauge-free measurements (work on any normalized state, no center needed).
std::vector<double> measure_bond_zz(const MpsState& state);
double measure_kink_density(const MpsState& state);

enum class Axis { x, z };
struct Magnetization {
  std::vector<double> per_site;
  double average = 0.0;
};
Magnetization measure_magnetization(const MpsState& state, Axis axis);

std::complex<double> overlap(const MpsState& bra, const MpsState& ket);

}  // namespace ikzm
