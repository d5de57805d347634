#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ikzm/model.hpp"

namespace ikzm {

// Least-squares power law d = A tau^-beta, fitted in log-log space.
struct ScalingFit {
  double beta = 0.0;
  double delta_beta = 0.0;  // one-sigma uncertainty of the slope
  double r2 = 0.0;
  double log_amplitude = 0.0;  // ln A
  double sse = 0.0;            // residual sum of squares in log space
  int points = 0;

  double evaluate(double tau_q) const;
};

// Requires matching sizes, at least 3 points, all values positive.
ScalingFit fit_power_law(const std::vector<double>& tau_q, const std::vector<double>& density);

struct SegmentOptions {
  // Hinge candidate grid passes through this value. Defaults to the
  // geometric midpoint of the trimmed window when unset.
  std::optional<double> anchor_tau{};
  // Expected slow-branch exponent. When positive, trailing points whose
  // local slope exceeds 1.5x this value are dropped as adiabatic saturation.
  double slow_beta_hint = 0.0;
  double plateau_tol = 0.02;
  double single_regime_gain = 0.05;
  int min_side_points = 3;
  int candidates_per_decade = 40;
};

struct RegimeSplit {
  bool single_regime = false;
  ScalingFit combined;  // whole trimmed window; the reported fit when single
  ScalingFit fast;      // steep branch below the crossover
  ScalingFit slow;      // branch above the crossover
  double tau_star = 0.0;
  double hinge_sse = 0.0;
  int plateau_dropped = 0;
  int adiabatic_dropped = 0;
  std::vector<double> tau_used;
  std::vector<double> density_used;
};

// Splits a defect-density curve into two power-law regimes joined at a
// continuous hinge, after trimming the fast-end saturation plateau and the
// slow-end adiabatic tail. Requires at least 1.5 decades of tau coverage.
RegimeSplit segment_regimes(std::vector<double> tau_q, std::vector<double> density,
                            const SegmentOptions& opts = {});

// One segmentation result tagged with the chain family it came from.
struct LabeledSplit {
  double q = 0.0;
  bool homogeneous = false;
  RegimeSplit split;
};

// Fit-versus-theory comparison, one row per curve. Homogeneous rows carry
// the combined fit against the 0.5 theory value; inhomogeneous rows pair
// the fast branch with 0.5 and the slow branch with (q+1)/(2q-2).
struct ComparisonRow {
  double q = 0.0;
  bool homogeneous = false;
  double beta_kzm = 0.0;
  double beta_kzm_err = 0.0;
  double r2_kzm = 0.0;
  bool has_ikzm = false;
  double beta_ikzm = 0.0;
  double beta_ikzm_err = 0.0;
  double r2_ikzm = 0.0;
  double beta_theory = 0.0;
};

std::vector<ComparisonRow> comparison_rows(const std::vector<LabeledSplit>& splits,
                                           const CriticalExponents& ex = {});
std::string render_comparison_text(const std::vector<ComparisonRow>& rows);
std::string render_comparison_csv(const std::vector<ComparisonRow>& rows);

struct ExponentRow {
  double q = 0.0;
  double beta_kzm = 0.0;
  double beta_ikzm = 0.0;
};

std::vector<ExponentRow> exponent_table(double q_min = 2.0, double q_max = 8.0,
                                        double q_step = 1.0,
                                        const CriticalExponents& ex = {});

// Fixed-width text table, exponents to six decimals.
std::string render_exponent_table(const std::vector<ExponentRow>& rows);

}  // namespace ikzm
