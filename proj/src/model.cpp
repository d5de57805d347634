#include "ikzm/model.hpp"

#include <cmath>
#include <numbers>

namespace ikzm {

void ChainSpec::validate() const {
  if (L < 2) throw ModelError("chain needs at least two sites");
  if (!(q > 0.0)) throw ModelError("profile exponent q must be positive");
  if (alpha < 0.0) throw ModelError("profile coefficient alpha must be non-negative");
  if (!(J0 > 0.0)) throw ModelError("peak coupling J0 must be positive");
  // the profile must stay ferromagnetic out to the last site
  double n_edge = std::abs(site_coordinate(0));
  if (coupling_at(n_edge) <= 0.0)
    throw ModelError("coupling profile is non-positive at the chain edge");
}

double ChainSpec::coupling_at(double n) const {
  return J0 * (1.0 - alpha * std::pow(std::abs(n), q));
}

std::vector<double> ChainSpec::site_couplings() const {
  validate();
  std::vector<double> J(L);
  for (int i = 0; i < L; ++i) {
    J[i] = coupling_at(site_coordinate(i));
    if (J[i] <= 0.0) throw ModelError("coupling profile is non-positive inside the chain");
  }
  return J;
}

std::vector<double> ChainSpec::bond_couplings() const {
  validate();
  std::vector<double> J(L - 1);
  for (int b = 0; b < L - 1; ++b) {
    J[b] = coupling_at(bond_coordinate(b));
    if (J[b] <= 0.0) throw ModelError("bond coupling is non-positive inside the chain");
  }
  return J;
}

double ChainSpec::min_bond_coupling() const {
  // profile decreases monotonically in |n|, so the edge bond is the weakest
  return coupling_at(bond_coordinate(0));
}

double alpha_for_end_ratio(int L, double q, double ratio) {
  if (L < 2) throw ModelError("chain needs at least two sites");
  if (!(q > 0.0)) throw ModelError("profile exponent q must be positive");
  if (!(ratio > 0.0) || ratio > 1.0) throw ModelError("end ratio must lie in (0, 1]");
  return (1.0 - ratio) / std::pow(0.5 * L, q);
}

ChainSpec chain_with_end_ratio(int L, double q, double ratio, double J0) {
  ChainSpec spec{L, q, alpha_for_end_ratio(L, q, ratio), J0};
  spec.validate();
  return spec;
}

void QuenchProtocol::validate() const {
  if (!(tau_Q > 0.0)) throw ModelError("ramp time tau_Q must be positive");
  if (!(dt > 0.0)) throw ModelError("step size dt must be positive");
  if (dt > tau_Q) throw ModelError("step size dt must not exceed tau_Q");
}

QuenchProtocol QuenchProtocol::make(double tau_Q, std::optional<double> dt) {
  QuenchProtocol ramp{tau_Q, dt.value_or(default_dt(tau_Q))};
  ramp.validate();
  return ramp;
}

double field_at(double t, const QuenchProtocol& ramp, const ChainSpec& spec) {
  ramp.validate();
  double slack = 1e-9 * (1.0 + ramp.tau_Q);
  if (t < ramp.t_start() - slack || t > ramp.t_end() + slack)
    throw ModelError("time outside the ramp window [-tau_Q, tau_Q]");
  return spec.J0 * (1.0 - t / ramp.tau_Q);
}

double epsilon(double n, double t, const ChainSpec& spec, const QuenchProtocol& ramp) {
  double J = spec.coupling_at(n);
  if (J <= 0.0) throw ModelError("epsilon undefined where the coupling vanishes");
  return (field_at(t, ramp, spec) - J) / J;
}

double local_quench_time(double n, const ChainSpec& spec, const QuenchProtocol& ramp) {
  ramp.validate();
  double J = spec.coupling_at(n);
  if (J <= 0.0) throw ModelError("local quench time undefined where the coupling vanishes");
  return ramp.tau_Q * J / spec.J0;
}

double front_time(double n, const ChainSpec& spec, const QuenchProtocol& ramp) {
  ramp.validate();
  spec.validate();
  return ramp.tau_Q * spec.alpha * std::pow(std::abs(n), spec.q);
}

double front_velocity(double n, const ChainSpec& spec, const QuenchProtocol& ramp) {
  ramp.validate();
  spec.validate();
  if (spec.alpha == 0.0)
    throw ModelError("homogeneous chain: the critical front has no finite velocity");
  double a = std::abs(n);
  if (spec.q > 1.0) {
    if (a == 0.0) throw ModelError("front velocity diverges at the center for q > 1");
    return 1.0 / (spec.alpha * spec.q * ramp.tau_Q * std::pow(a, spec.q - 1.0));
  }
  if (spec.q == 1.0) return 1.0 / (spec.alpha * ramp.tau_Q);
  // sublinear profiles: slowest at the center
  return spec.alpha * spec.q * ramp.tau_Q * std::pow(a, 1.0 - spec.q);
}

EffectiveSize effective_half_size(const ChainSpec& spec, const QuenchProtocol& ramp) {
  ramp.validate();
  spec.validate();
  if (!(spec.q > 1.0)) throw ModelError("effective half-size requires q > 1");
  if (spec.alpha == 0.0) throw ModelError("effective half-size requires an inhomogeneous profile");
  EffectiveSize out;
  out.n_hat = std::pow(1.0 / (2.0 * spec.alpha * spec.q * ramp.tau_Q * spec.J0),
                       1.0 / (spec.q - 1.0));
  out.profile_flat = spec.alpha * std::pow(out.n_hat, spec.q) < 0.1;
  double xi_hat = std::sqrt(2.0 * spec.J0 * ramp.tau_Q);
  out.window_wide = 2.0 * out.n_hat > xi_hat;
  return out;
}

KzmDensity predict_kzm_density(double J_ref, double tau_Q) {
  if (!(J_ref > 0.0)) throw ModelError("reference coupling must be positive");
  if (!(tau_Q > 0.0)) throw ModelError("ramp time tau_Q must be positive");
  KzmDensity out;
  out.d_kzm = std::sqrt(1.0 / (2.0 * J_ref * tau_Q));
  out.d_exact = out.d_kzm / (2.0 * std::numbers::pi);
  return out;
}

IkzmDensity predict_ikzm_density(const ChainSpec& spec, const QuenchProtocol& ramp) {
  EffectiveSize win = effective_half_size(spec, ramp);  // validates q > 1, alpha > 0
  IkzmDensity out;
  out.suppression_ratio = 2.0 * win.n_hat / spec.L;
  out.d = out.suppression_ratio * predict_kzm_density(spec.J0, ramp.tau_Q).d_kzm;
  return out;
}

double predict_crossover(const ChainSpec& spec) {
  spec.validate();
  if (!(spec.q > 1.0)) throw ModelError("crossover ramp time requires q > 1");
  if (spec.alpha == 0.0) throw ModelError("crossover ramp time requires an inhomogeneous profile");
  return 1.0 / (2.0 * spec.alpha * spec.q * spec.J0 * std::pow(0.5 * spec.L, spec.q - 1.0));
}

void CriticalExponents::validate() const {
  if (!(nu > 0.0) || !(z > 0.0)) throw ModelError("critical exponents must be positive");
  if (!(xi0 > 0.0) || !(tau0 > 0.0)) throw ModelError("microscopic scales must be positive");
}

GeneralExponents predict_general_exponents(const CriticalExponents& ex, double q) {
  ex.validate();
  if (!(q > 1.0)) throw ModelError("scaling exponents defined for q > 1");
  GeneralExponents out;
  out.beta_kzm = ex.nu / (1.0 + ex.z * ex.nu);
  out.beta_ikzm = (1.0 + q * ex.nu) / ((1.0 + ex.nu * ex.z) * (q - 1.0));
  return out;
}

double sound_speed_hat(const CriticalExponents& ex, double tau_Q) {
  ex.validate();
  if (!(tau_Q > 0.0)) throw ModelError("ramp time tau_Q must be positive");
  return (ex.xi0 / ex.tau0) *
         std::pow(ex.tau0 / tau_Q, ex.nu * (ex.z - 1.0) / (1.0 + ex.nu * ex.z));
}

double general_ikzm_density(const ChainSpec& spec, double tau_Q, const CriticalExponents& ex) {
  spec.validate();
  ex.validate();
  if (!(spec.q > 1.0)) throw ModelError("inhomogeneous density law requires q > 1");
  if (spec.alpha == 0.0) throw ModelError("inhomogeneous density law requires alpha > 0");
  if (!(tau_Q > 0.0)) throw ModelError("ramp time tau_Q must be positive");
  double expo = (1.0 + spec.q * ex.nu) / ((1.0 + ex.nu * ex.z) * (spec.q - 1.0));
  return (2.0 / (spec.L * ex.xi0)) *
         std::pow(1.0 / (spec.alpha * spec.q * ex.xi0), 1.0 / (spec.q - 1.0)) *
         std::pow(ex.tau0 / tau_Q, expo);
}

SublinearPrediction predict_sublinear_density(const ChainSpec& spec, const QuenchProtocol& ramp,
                                              std::optional<double> J_ref) {
  ramp.validate();
  spec.validate();
  if (!(spec.q < 1.0)) throw ModelError("sublinear prediction requires 0 < q < 1");
  if (spec.alpha == 0.0) throw ModelError("sublinear prediction requires alpha > 0");
  SublinearPrediction out;
  out.used_default_J_ref = !J_ref.has_value();
  double Jr = J_ref.value_or(spec.J0);
  if (!(Jr > 0.0)) throw ModelError("reference coupling must be positive");
  out.n_hat = std::pow(2.0 * Jr / (spec.alpha * spec.q * ramp.tau_Q), 1.0 / (1.0 - spec.q));
  double correction = (2.0 / spec.L) *
                      std::pow(4.0 * Jr * spec.J0 / (spec.alpha * spec.q), 1.0 / (1.0 - spec.q)) *
                      std::pow(1.0 / (2.0 * spec.J0 * ramp.tau_Q),
                               (3.0 - spec.q) / (2.0 - 2.0 * spec.q));
  out.d = predict_kzm_density(spec.J0, ramp.tau_Q).d_kzm - correction;
  return out;
}

bool defect_formation_predicate(const ChainSpec& spec, const QuenchProtocol& ramp, double n) {
  ramp.validate();
  spec.validate();
  if (!(spec.q > 1.0)) throw ModelError("formation predicate defined for q > 1");
  if (spec.alpha == 0.0) throw ModelError("formation predicate requires alpha > 0");
  double a = std::abs(n);
  double lhs = std::pow(a, spec.q - 1.0) * (1.0 - spec.alpha * std::pow(a, spec.q));
  return lhs < 1.0 / (2.0 * spec.alpha * spec.q * ramp.tau_Q * spec.J0);
}

Prediction predict(const ChainSpec& spec, const QuenchProtocol& ramp) {
  ramp.validate();
  spec.validate();
  Prediction out;
  KzmDensity kzm = predict_kzm_density(spec.J0, ramp.tau_Q);
  out.d_kzm = kzm.d_kzm;
  out.d_kzm_exact = kzm.d_exact;
  out.beta_kzm = 0.5;
  if (!spec.homogeneous() && spec.q > 1.0) {
    EffectiveSize win = effective_half_size(spec, ramp);
    IkzmDensity ikzm = predict_ikzm_density(spec, ramp);
    GeneralExponents ge = predict_general_exponents(CriticalExponents::ising(spec.J0), spec.q);
    out.beta_ikzm = ge.beta_ikzm;
    out.d_ikzm = ikzm.d;
    out.suppression_ratio = ikzm.suppression_ratio;
    out.n_hat = win.n_hat;
    out.tau_Q_star = predict_crossover(spec);
    out.profile_flat = win.profile_flat;
    out.window_wide = win.window_wide;
  }
  return out;
}

}  // namespace ikzm
