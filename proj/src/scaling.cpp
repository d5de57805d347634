#include "ikzm/scaling.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "ikzm/errors.hpp"

namespace ikzm {

double ScalingFit::evaluate(double tau_q) const {
  return std::exp(log_amplitude - beta * std::log(tau_q));
}

namespace {

struct LogData {
  std::vector<double> x;  // ln tau
  std::vector<double> y;  // ln d
};

LogData to_logs(const std::vector<double>& tau, const std::vector<double>& d) {
  if (tau.size() != d.size()) throw FitError("tau and density lengths differ");
  LogData out;
  out.x.reserve(tau.size());
  out.y.reserve(tau.size());
  for (size_t i = 0; i < tau.size(); ++i) {
    if (!(tau[i] > 0.0) || !(d[i] > 0.0))
      throw FitError("power-law fit needs strictly positive data");
    out.x.push_back(std::log(tau[i]));
    out.y.push_back(std::log(d[i]));
  }
  return out;
}

ScalingFit fit_logs(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 3) throw FitError("power-law fit needs at least 3 points");
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx <= 0.0) throw FitError("power-law fit needs at least two distinct tau values");
  double slope = sxy / sxx;
  double sse = 0.0;
  for (int i = 0; i < n; ++i) {
    double r = y[i] - (my + slope * (x[i] - mx));
    sse += r * r;
  }
  ScalingFit fit;
  fit.beta = -slope;
  fit.log_amplitude = my - slope * mx;
  fit.sse = sse;
  fit.points = n;
  fit.delta_beta = std::sqrt(std::max(sse, 0.0) / (n - 2) / sxx);
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return fit;
}

// continuous two-slope model y = a + b1 min(x-x0,0) + b2 max(x-x0,0)
double hinge_sse_at(const std::vector<double>& x, const std::vector<double>& y, double x0) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    design(i, 0) = 1.0;
    design(i, 1) = std::min(x[i] - x0, 0.0);
    design(i, 2) = std::max(x[i] - x0, 0.0);
    rhs(i) = y[i];
  }
  Eigen::VectorXd coef = design.colPivHouseholderQr().solve(rhs);
  return (design * coef - rhs).squaredNorm();
}

}  // namespace

ScalingFit fit_power_law(const std::vector<double>& tau_q, const std::vector<double>& density) {
  LogData logs = to_logs(tau_q, density);
  return fit_logs(logs.x, logs.y);
}

RegimeSplit segment_regimes(std::vector<double> tau_q, std::vector<double> density,
                            const SegmentOptions& opts) {
  if (tau_q.size() != density.size()) throw FitError("tau and density lengths differ");
  const size_t n = tau_q.size();
  if (n < 3) throw FitError("regime segmentation needs at least 3 points");

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return tau_q[a] < tau_q[b]; });
  std::vector<double> tau(n), d(n);
  for (size_t i = 0; i < n; ++i) {
    tau[i] = tau_q[order[i]];
    d[i] = density[order[i]];
    if (!(tau[i] > 0.0) || !(d[i] > 0.0))
      throw FitError("regime segmentation needs strictly positive data");
  }
  if (tau.back() / tau.front() < std::pow(10.0, 1.5))
    throw FitError("regime segmentation needs at least 1.5 decades of tau coverage");

  RegimeSplit out;

  // saturation plateau at the fast end: initial run of <2% steps
  size_t lo = 0;
  if (n >= 2 && std::abs(d[1] / d[0] - 1.0) < opts.plateau_tol) {
    size_t k = 1;
    while (k + 1 < n && std::abs(d[k + 1] / d[k] - 1.0) < opts.plateau_tol) ++k;
    lo = k + 1;  // drop through the last plateau point
    out.plateau_dropped = static_cast<int>(lo);
  }

  // adiabatic tail at the slow end: the onset is the first interval (scanning
  // up in tau) whose local slope runs far beyond the expected branch; keep its
  // left endpoint, drop everything past it. A forward scan is deliberate: deep
  // adiabatic tails oscillate, and a single shallow interval out there must not
  // pull the whole tail back into the fit.
  size_t hi = n;  // one past the end
  if (opts.slow_beta_hint > 0.0) {
    for (size_t i = lo + 1; i < n; ++i) {
      double beta_local = -(std::log(d[i]) - std::log(d[i - 1])) /
                          (std::log(tau[i]) - std::log(tau[i - 1]));
      if (beta_local > 1.5 * opts.slow_beta_hint) {
        hi = i;
        out.adiabatic_dropped = static_cast<int>(n - hi);
        break;
      }
    }
  }

  if (hi - lo < 3) throw FitError("fewer than 3 points left after trimming");
  out.tau_used.assign(tau.begin() + lo, tau.begin() + hi);
  out.density_used.assign(d.begin() + lo, d.begin() + hi);

  std::vector<double> x, y;
  x.reserve(hi - lo);
  y.reserve(hi - lo);
  for (size_t i = lo; i < hi; ++i) {
    x.push_back(std::log(tau[i]));
    y.push_back(std::log(d[i]));
  }
  out.combined = fit_logs(x, y);

  const int m = static_cast<int>(x.size());
  const int side = std::max(opts.min_side_points, 2);
  if (m < 2 * side) {
    out.single_regime = true;
    return out;
  }

  // hinge candidates on a log grid through the anchor
  double anchor = opts.anchor_tau ? std::log(*opts.anchor_tau)
                                  : 0.5 * (x.front() + x.back());
  double step = std::log(10.0) / opts.candidates_per_decade;
  // x must keep at least `side` points on each side of the hinge
  double x_lo = x[side - 1], x_hi = x[m - side];
  long k_lo = static_cast<long>(std::floor((x_lo - anchor) / step)) - 1;
  long k_hi = static_cast<long>(std::ceil((x_hi - anchor) / step)) + 1;

  double best_sse = -1.0, best_x0 = 0.0;
  for (long k = k_lo; k <= k_hi; ++k) {
    double x0 = anchor + static_cast<double>(k) * step;
    int left = 0, right = 0;
    for (double xi : x) {
      if (xi <= x0 + 1e-12) ++left;
      if (xi >= x0 - 1e-12) ++right;
    }
    if (left < side || right < side) continue;
    double sse = hinge_sse_at(x, y, x0);
    if (best_sse < 0.0 || sse < best_sse) {
      best_sse = sse;
      best_x0 = x0;
    }
  }

  if (best_sse < 0.0) {
    out.single_regime = true;
    return out;
  }
  out.hinge_sse = best_sse;
  out.tau_star = std::exp(best_x0);

  double sse1 = out.combined.sse;
  if (sse1 < 1e-24 || (sse1 - best_sse) / sse1 < opts.single_regime_gain) {
    out.single_regime = true;
    out.tau_star = 0.0;
    return out;
  }

  std::vector<double> xl, yl, xr, yr;
  for (int i = 0; i < m; ++i) {
    if (x[i] <= best_x0 + 1e-12) {
      xl.push_back(x[i]);
      yl.push_back(y[i]);
    }
    if (x[i] >= best_x0 - 1e-12) {
      xr.push_back(x[i]);
      yr.push_back(y[i]);
    }
  }
  out.fast = fit_logs(xl, yl);
  out.slow = fit_logs(xr, yr);
  return out;
}

std::vector<ComparisonRow> comparison_rows(const std::vector<LabeledSplit>& splits,
                                           const CriticalExponents& ex) {
  std::vector<ComparisonRow> rows;
  rows.reserve(splits.size());
  for (const LabeledSplit& ls : splits) {
    ComparisonRow row;
    row.q = ls.q;
    row.homogeneous = ls.homogeneous;
    if (ls.homogeneous) {
      const ScalingFit& f = ls.split.single_regime ? ls.split.combined : ls.split.fast;
      row.beta_kzm = f.beta;
      row.beta_kzm_err = f.delta_beta;
      row.r2_kzm = f.r2;
      row.beta_theory = predict_general_exponents(ex, 2.0).beta_kzm;  // q drops out
    } else {
      if (!(ls.q > 1.0)) throw FitError("inhomogeneous comparison needs q > 1");
      row.beta_theory = predict_general_exponents(ex, ls.q).beta_ikzm;
      if (ls.split.single_regime) {
        row.beta_kzm = ls.split.combined.beta;
        row.beta_kzm_err = ls.split.combined.delta_beta;
        row.r2_kzm = ls.split.combined.r2;
      } else {
        row.beta_kzm = ls.split.fast.beta;
        row.beta_kzm_err = ls.split.fast.delta_beta;
        row.r2_kzm = ls.split.fast.r2;
        row.has_ikzm = true;
        row.beta_ikzm = ls.split.slow.beta;
        row.beta_ikzm_err = ls.split.slow.delta_beta;
        row.r2_ikzm = ls.split.slow.r2;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

std::string render_comparison_text(const std::vector<ComparisonRow>& rows) {
  std::string out =
      "     q  profile      beta_kzm        err       r2    beta_ikzm        err       r2    beta_theory\n";
  char line[192];
  for (const ComparisonRow& r : rows) {
    char ikzm[64] = "            -          -        -";
    if (r.has_ikzm)
      std::snprintf(ikzm, sizeof(ikzm), "   %10.4f %10.4f %8.4f", r.beta_ikzm, r.beta_ikzm_err,
                    r.r2_ikzm);
    std::snprintf(line, sizeof(line), "%6.2f  %-8s   %10.4f %10.4f %8.4f%s       %.6f\n", r.q,
                  r.homogeneous ? "flat" : "graded", r.beta_kzm, r.beta_kzm_err, r.r2_kzm, ikzm,
                  r.beta_theory);
    out += line;
  }
  return out;
}

std::string render_comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "# schema=1\n";
  out += "q,profile,beta_kzm_fit,beta_kzm_err,r2_kzm,beta_ikzm_fit,beta_ikzm_err,r2_ikzm,beta_theory\n";
  char line[256];
  for (const ComparisonRow& r : rows) {
    if (r.has_ikzm)
      std::snprintf(line, sizeof(line), "%.17g,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.6f\n", r.q,
                    r.homogeneous ? "flat" : "graded", r.beta_kzm, r.beta_kzm_err, r.r2_kzm,
                    r.beta_ikzm, r.beta_ikzm_err, r.r2_ikzm, r.beta_theory);
    else
      std::snprintf(line, sizeof(line), "%.17g,%s,%.17g,%.17g,%.17g,,,,%.6f\n", r.q,
                    r.homogeneous ? "flat" : "graded", r.beta_kzm, r.beta_kzm_err, r.r2_kzm,
                    r.beta_theory);
    out += line;
  }
  return out;
}

std::vector<ExponentRow> exponent_table(double q_min, double q_max, double q_step,
                                        const CriticalExponents& ex) {
  if (!(q_step > 0.0) || q_max < q_min) throw FitError("bad exponent table range");
  std::vector<ExponentRow> rows;
  for (double q = q_min; q <= q_max + 1e-12; q += q_step) {
    GeneralExponents g = predict_general_exponents(ex, q);
    rows.push_back({q, g.beta_kzm, g.beta_ikzm});
  }
  return rows;
}

std::string render_exponent_table(const std::vector<ExponentRow>& rows) {
  std::string out = "     q    beta_kzm   beta_ikzm\n";
  char line[96];
  for (const ExponentRow& r : rows) {
    std::snprintf(line, sizeof(line), "%6.2f    %.6f    %.6f\n", r.q, r.beta_kzm, r.beta_ikzm);
    out += line;
  }
  return out;
}

}  // namespace ikzm
