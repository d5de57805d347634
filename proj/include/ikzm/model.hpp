#pragma once

// Chain geometry, ramp protocol and the closed-form defect-density
// predictions. Everything here is analytic; the dynamical backends and the
// fits consume these types.
//
// Units: hbar = 1 and the lattice spacing = 1. Energies are quoted in units
// of the edge coupling, times in its inverse.

#include <optional>
#include <vector>

#include "ikzm/errors.hpp"

namespace ikzm {

// Open chain with the symmetric coupling profile J(n) = J0 (1 - alpha |n|^q)
// on centered coordinates n. alpha = 0 gives the homogeneous chain.
struct ChainSpec {
  int L = 2;
  double q = 2.0;
  double alpha = 0.0;
  double J0 = 1.0;

  void validate() const;
  bool homogeneous() const { return alpha == 0.0; }

  // site i = 0..L-1 sits at n = i - (L-1)/2; bond b joins sites b and b+1
  double site_coordinate(int i) const { return i - 0.5 * (L - 1); }
  double bond_coordinate(int b) const { return b + 0.5 - 0.5 * (L - 1); }

  double coupling_at(double n) const;
  std::vector<double> site_couplings() const;
  // couplings entering the Hamiltonian, evaluated at bond midpoints
  std::vector<double> bond_couplings() const;
  double min_bond_coupling() const;
};

// alpha such that the edge coupling J(+-L/2) equals ratio * J0
double alpha_for_end_ratio(int L, double q, double ratio);
ChainSpec chain_with_end_ratio(int L, double q, double ratio, double J0);

// Linear ramp h(t) = J0 (1 - t/tau_Q) over t in [-tau_Q, tau_Q]: the field
// starts at 2 J0, crosses the center coupling at t = 0 and ends at zero.
struct QuenchProtocol {
  double tau_Q = 1.0;
  double dt = 1e-3;

  double t_start() const { return -tau_Q; }
  double t_end() const { return tau_Q; }
  void validate() const;

  static double default_dt(double tau_Q) { return std::min(0.01, tau_Q / 1000.0); }
  static QuenchProtocol make(double tau_Q, std::optional<double> dt = std::nullopt);
};

double field_at(double t, const QuenchProtocol& ramp, const ChainSpec& spec);

// local distance from criticality, (h(t) - J(n)) / J(n); equals
// (t_F(n) - t) / tau_Q(n) along the ramp
double epsilon(double n, double t, const ChainSpec& spec, const QuenchProtocol& ramp);

// tau_Q(n) = tau_Q J(n)/J0: the local ramp looks slower where J is smaller
double local_quench_time(double n, const ChainSpec& spec, const QuenchProtocol& ramp);

// time at which the critical front h(t) = J(n) reaches coordinate n
double front_time(double n, const ChainSpec& spec, const QuenchProtocol& ramp);
double front_velocity(double n, const ChainSpec& spec, const QuenchProtocol& ramp);

// Half-size n_hat of the window around the center where the front outruns
// sound and defects can freeze in. Only meaningful for q > 1.
struct EffectiveSize {
  double n_hat = 0.0;
  // the local-density treatment assumes a nearly flat profile inside the
  // window and a window wider than the frozen correlation length
  bool profile_flat = true;
  bool window_wide = true;
};
EffectiveSize effective_half_size(const ChainSpec& spec, const QuenchProtocol& ramp);

// Homogeneous Kibble-Zurek density: d_kzm = sqrt(1/(2 J tau_Q)) is the
// inverse frozen correlation length; d_exact carries the known 1/(2 pi)
// prefactor of the slow-ramp asymptote.
struct KzmDensity {
  double d_kzm = 0.0;
  double d_exact = 0.0;
};
KzmDensity predict_kzm_density(double J_ref, double tau_Q);

// Inhomogeneous prediction for q > 1: defects form only inside the frozen
// window, d = (2 n_hat / L) * d_kzm(J0).
struct IkzmDensity {
  double d = 0.0;
  double suppression_ratio = 0.0;  // d / d_kzm(J0)
};
IkzmDensity predict_ikzm_density(const ChainSpec& spec, const QuenchProtocol& ramp);

// crossover ramp time where 2 n_hat = L and the window fills the chain
double predict_crossover(const ChainSpec& spec);

// Equilibrium exponents of the transition plus the microscopic scales that
// convert scaling laws into lattice numbers. Defaults are the transverse
// field Ising values with xi0 = 1 and tau0 = 1/(2 J0).
struct CriticalExponents {
  double nu = 1.0;
  double z = 1.0;
  double xi0 = 1.0;
  double tau0 = 0.5;

  void validate() const;
  static CriticalExponents ising(double J0) { return {1.0, 1.0, 1.0, 1.0 / (2.0 * J0)}; }
};

struct GeneralExponents {
  double beta_kzm = 0.0;   // nu / (1 + z nu)
  double beta_ikzm = 0.0;  // (1 + q nu) / ((1 + nu z)(q - 1))
};
GeneralExponents predict_general_exponents(const CriticalExponents& ex, double q);

// frozen-out sound speed xi_hat / tau_hat; independent of tau_Q when z = 1
double sound_speed_hat(const CriticalExponents& ex, double tau_Q);

// density law for arbitrary (nu, z); reduces to predict_ikzm_density for
// the Ising defaults
double general_ikzm_density(const ChainSpec& spec, double tau_Q, const CriticalExponents& ex);

// Sublinear profiles 0 < q < 1: the front is slowest at the center, defects
// form outside |n| > n_hat and the correction is subtractive.
struct SublinearPrediction {
  double n_hat = 0.0;
  double d = 0.0;
  bool used_default_J_ref = true;
};
SublinearPrediction predict_sublinear_density(const ChainSpec& spec, const QuenchProtocol& ramp,
                                              std::optional<double> J_ref = std::nullopt);

// whether the front at coordinate n moves faster than the local sound speed
// (q > 1), i.e. whether defects can form there
bool defect_formation_predicate(const ChainSpec& spec, const QuenchProtocol& ramp, double n);

// Bundle used by the CLI and by regime segmentation. The optional members
// are only present for inhomogeneous chains with q > 1.
struct Prediction {
  double beta_kzm = 0.5;
  double d_kzm = 0.0;
  double d_kzm_exact = 0.0;
  std::optional<double> beta_ikzm;
  std::optional<double> d_ikzm;
  std::optional<double> suppression_ratio;
  std::optional<double> n_hat;
  std::optional<double> tau_Q_star;
  bool profile_flat = true;
  bool window_wide = true;
};
Prediction predict(const ChainSpec& spec, const QuenchProtocol& ramp);

}  // namespace ikzm
