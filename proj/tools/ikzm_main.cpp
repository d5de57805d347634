// Command line front end: predictions, single quenches, sweeps, backend
// cross-validation, power-law fits and figure generation.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "ikzm/config.hpp"
#include "ikzm/errors.hpp"
#include "ikzm/figures.hpp"
#include "ikzm/model.hpp"
#include "ikzm/record.hpp"
#include "ikzm/scaling.hpp"
#include "ikzm/sweep.hpp"

using namespace ikzm;

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::string> backend;
  std::optional<std::string> out;
  std::optional<int> workers;
  std::optional<long long> seed;
  std::optional<int> chi;
  std::optional<double> dt;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("-c,--config", flags.config_path, "run configuration file (INI)");
  cmd->add_option("--backend", flags.backend, "fermion, mps or both");
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--workers", flags.workers, "worker threads for sweeps");
  cmd->add_option("--seed", flags.seed, "ground-state search seed (mps backend)");
  cmd->add_option("--chi", flags.chi, "bond dimension cap (mps backend)");
  cmd->add_option("--dt", flags.dt, "integrator step override");
}

RunConfig resolve_config(const CommonFlags& flags) {
  RunConfig cfg = flags.config_path.empty() ? RunConfig{} : parse_config_file(flags.config_path);
  if (flags.backend) cfg.backend = backend_from_name(*flags.backend);
  if (flags.out) cfg.out_dir = *flags.out;
  if (flags.workers) cfg.workers = *flags.workers;
  if (flags.seed) cfg.seed = static_cast<std::uint64_t>(*flags.seed);
  if (flags.chi) cfg.chi = *flags.chi;
  if (flags.dt) cfg.dt = *flags.dt;
  cfg.validate();
  return cfg;
}

void print_prediction(const RunConfig& cfg, double tau_Q) {
  ChainSpec spec = cfg.chain();
  QuenchProtocol ramp = cfg.protocol(tau_Q);
  Prediction p = predict(spec, ramp);
  std::printf("chain: L=%d q=%g alpha=%.10g J0=%g (%s)\n", spec.L, spec.q, spec.alpha, spec.J0,
              spec.homogeneous() ? "flat couplings" : "graded couplings");
  std::printf("ramp:  tau_Q=%.10g dt=%.10g\n", tau_Q, ramp.dt);
  std::printf("  beta_kzm      %.6f\n", p.beta_kzm);
  std::printf("  d_kzm         %.10g\n", p.d_kzm);
  std::printf("  d_kzm_exact   %.10g\n", p.d_kzm_exact);
  if (p.beta_ikzm) std::printf("  beta_ikzm     %.6f\n", *p.beta_ikzm);
  if (p.n_hat) std::printf("  n_hat         %.10g\n", *p.n_hat);
  if (p.d_ikzm) std::printf("  d_ikzm        %.10g\n", *p.d_ikzm);
  if (p.suppression_ratio) std::printf("  suppression   %.10g\n", *p.suppression_ratio);
  if (p.tau_Q_star) std::printf("  tau_Q_star    %.10g\n", *p.tau_Q_star);
  if (p.n_hat) {
    std::printf("  window %s the frozen correlation length at this ramp time\n",
                p.window_wide ? "is wider than" : "sits inside");
    if (!p.profile_flat)
      std::printf("  couplings vary by more than 10%% across the window\n");
  }
}

void print_record_summary(const QuenchRecord& rec, const std::string& path) {
  const RecordSnapshot& s = rec.snapshot;
  std::printf("%s tau_Q=%-12.6g d_final=%.8g", backend_name(s.backend), s.tau_Q,
              rec.final_density);
  if (s.backend == RunConfig::Backend::mps)
    std::printf(" trunc_err=%.3g max_bond=%d", rec.trunc_err, rec.max_bond);
  else
    std::printf(" purity_drift=%.3g", rec.purity_drift);
  std::printf(" wall=%.2fs\n", rec.wall_seconds);
  if (!path.empty()) std::printf("  record: %s\n", path.c_str());
}

int cmd_predict(const CommonFlags& flags, const std::vector<double>& taus) {
  RunConfig cfg = resolve_config(flags);
  std::vector<double> grid = taus.empty() ? cfg.tau_grid() : taus;
  for (double tau : grid) {
    print_prediction(cfg, tau);
    std::printf("\n");
  }
  std::printf("%s", render_exponent_table(exponent_table()).c_str());
  return 0;
}

int cmd_run(const CommonFlags& flags, const std::vector<double>& taus) {
  RunConfig cfg = resolve_config(flags);
  if (taus.empty()) throw ConfigError("run needs at least one --tau-q");
  std::vector<RunConfig::Backend> backends;
  if (cfg.backend == RunConfig::Backend::both)
    backends = {RunConfig::Backend::fermion, RunConfig::Backend::mps};
  else
    backends = {cfg.backend};
  std::string records_dir = cfg.out_dir + "/records";
  for (double tau : taus)
    for (auto which : backends) {
      QuenchRecord rec = run_single(cfg, tau, which);
      std::string path = save_record(rec, records_dir);
      print_record_summary(rec, path);
    }
  return 0;
}

int cmd_sweep(const CommonFlags& flags) {
  RunConfig cfg = resolve_config(flags);
  SweepResult result = run_sweep(cfg, &std::cerr);
  for (const auto& rec : result.records) print_record_summary(rec, "");
  if (result.reused > 0) std::printf("%d point(s) reused from the record cache\n", result.reused);
  for (const auto& f : result.failures)
    std::printf("FAILED tau_Q=%.6g backend=%s: %s\n", f.tau_Q, f.backend.c_str(),
                f.message.c_str());
  std::printf("curve: %s\n", result.curve_path.c_str());
  return 0;
}

int cmd_validate(const CommonFlags& flags, const std::vector<double>& taus, double tolerance) {
  RunConfig cfg = resolve_config(flags);
  cfg.backend = RunConfig::Backend::both;
  ValidationReport report;
  if (taus.empty()) {
    report = cross_validate(cfg, tolerance, &std::cerr);
  } else {
    // explicit tau list: validate each point with a one-point grid
    report.tolerance = tolerance;
    for (double tau : taus) {
      RunConfig one = cfg;
      one.tau_min = one.tau_max = tau;
      one.tau_count = 1;
      ValidationReport part = cross_validate(one, tolerance, &std::cerr);
      report.rows.push_back(part.rows.front());
      report.any_flagged = report.any_flagged || part.any_flagged;
      report.worst_gap = std::max(report.worst_gap, part.worst_gap);
    }
  }
  std::printf("      tau_Q        max|dd|       mean|dd|   status\n");
  for (const auto& row : report.rows)
    std::printf("%11.6g   %12.4e   %12.4e   %s\n", row.tau_Q, row.max_gap, row.mean_gap,
                row.flagged ? "FLAGGED" : "ok");
  std::printf("worst gap %.4e against tolerance %.4e\n", report.worst_gap, report.tolerance);
  if (report.any_flagged) throw SimulationError("backends disagree beyond tolerance");
  return 0;
}

int cmd_fit(const std::vector<std::string>& curves, const std::string& out_csv) {
  if (curves.empty()) throw ConfigError("fit needs at least one --curve file");
  std::vector<CurveRow> rows;
  for (const auto& path : curves) {
    std::vector<CurveRow> part = read_sweep_curve(path);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  if (rows.empty()) throw ConfigError("fit input holds no curve rows");

  struct Key {
    std::string backend;
    int L;
    double q, alpha, J0;
    int chi;
    bool operator<(const Key& o) const {
      return std::tie(q, alpha, L, J0, backend, chi) <
             std::tie(o.q, o.alpha, o.L, o.J0, o.backend, o.chi);
    }
  };
  std::map<Key, std::vector<CurveRow>> groups;
  for (const auto& r : rows) groups[{r.backend, r.L, r.q, r.alpha_q, r.J0, r.chi}].push_back(r);

  std::vector<LabeledSplit> labeled;
  for (auto& [key, series] : groups) {
    std::sort(series.begin(), series.end(),
              [](const CurveRow& a, const CurveRow& b) { return a.tau_Q < b.tau_Q; });
    std::vector<double> taus, ds;
    for (const auto& r : series)
      if (r.d_final > 0) {
        taus.push_back(r.tau_Q);
        ds.push_back(r.d_final);
      }
    bool flat = key.alpha == 0.0;
    std::printf("series backend=%s L=%d q=%g alpha=%.6g J0=%g (%d points)\n", key.backend.c_str(),
                key.L, key.q, key.alpha, key.J0, int(taus.size()));
    if (flat) {
      ScalingFit fit = fit_power_law(taus, ds);
      RegimeSplit wrap;
      wrap.single_regime = true;
      wrap.combined = fit;
      labeled.push_back({key.q, true, wrap});
      std::printf("  beta=%.4f +- %.4f  r2=%.6f\n", fit.beta, fit.delta_beta, fit.r2);
    } else {
      SegmentOptions opts;
      opts.anchor_tau = predict_crossover(ChainSpec{key.L, key.q, key.alpha, key.J0});
      opts.slow_beta_hint = predict_general_exponents({}, key.q).beta_ikzm;
      RegimeSplit split = segment_regimes(taus, ds, opts);
      labeled.push_back({key.q, false, split});
      if (split.single_regime) {
        std::printf("  single regime: beta=%.4f +- %.4f  r2=%.6f\n", split.combined.beta,
                    split.combined.delta_beta, split.combined.r2);
      } else {
        std::printf("  fast: beta=%.4f +- %.4f  r2=%.6f\n", split.fast.beta,
                    split.fast.delta_beta, split.fast.r2);
        std::printf("  slow: beta=%.4f +- %.4f  r2=%.6f\n", split.slow.beta,
                    split.slow.delta_beta, split.slow.r2);
        std::printf("  crossover tau_Q* = %.6g (theory %.6g)\n", split.tau_star,
                    *opts.anchor_tau);
      }
      if (split.plateau_dropped || split.adiabatic_dropped)
        std::printf("  trimmed %d saturated + %d adiabatic point(s)\n", split.plateau_dropped,
                    split.adiabatic_dropped);
    }
  }

  std::vector<ComparisonRow> table = comparison_rows(labeled);
  std::printf("\n%s", render_comparison_text(table).c_str());
  if (!out_csv.empty()) {
    std::ofstream out(out_csv, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + out_csv);
    out << render_comparison_csv(table);
    std::printf("comparison table: %s\n", out_csv.c_str());
  }
  return 0;
}

int cmd_figures(const std::string& type, const std::string& records_dir,
                const std::vector<std::string>& curves, const std::string& out_base) {
  FigurePaths paths;
  if (type == "heatmap") {
    if (records_dir.empty()) throw ConfigError("heatmap needs --records <dir>");
    paths = figure_heatmap(load_record_dir(records_dir), out_base);
  } else {
    if (curves.empty()) throw ConfigError(type + " needs at least one --curve file");
    std::vector<CurveRow> rows;
    for (const auto& path : curves) {
      std::vector<CurveRow> part = read_sweep_curve(path);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    if (type == "scaling") paths = figure_scaling(rows, out_base);
    else if (type == "exponents") paths = figure_exponents(rows, out_base);
    else if (type == "overlay") paths = figure_overlay(rows, out_base);
    else throw ConfigError("unknown figure type '" + type + "'");
  }
  std::printf("data:  %s\nimage: %s\n", paths.data_path.c_str(), paths.svg_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"inhomogeneous quench simulator and analysis suite"};
  app.require_subcommand(1);

  CommonFlags predict_flags, run_flags, sweep_flags, validate_flags;
  std::vector<double> predict_taus, run_taus, validate_taus;
  double validate_tol = 1e-3;
  std::vector<std::string> fit_curves, figure_curves;
  std::string fit_out, figure_type, figure_records, figure_out = "figure";

  CLI::App* predict_cmd = app.add_subcommand("predict", "analytic defect-density predictions");
  add_common(predict_cmd, predict_flags);
  predict_cmd->add_option("--tau-q", predict_taus, "ramp times to evaluate");

  CLI::App* run_cmd = app.add_subcommand("run", "one quench per --tau-q, record per backend");
  add_common(run_cmd, run_flags);
  run_cmd->add_option("--tau-q", run_taus, "ramp times to run")->required();

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run the config's tau grid and emit a curve");
  add_common(sweep_cmd, sweep_flags);

  CLI::App* validate_cmd =
      app.add_subcommand("validate", "compare both backends on the shared raster");
  add_common(validate_cmd, validate_flags);
  validate_cmd->add_option("--tau-q", validate_taus, "explicit ramp times (default: config grid)");
  validate_cmd->add_option("--tolerance", validate_tol, "max allowed |d_fermion - d_mps|");

  CLI::App* fit_cmd = app.add_subcommand("fit", "power-law fits and theory comparison");
  fit_cmd->add_option("--curve", fit_curves, "sweep curve CSV file(s)")->required();
  fit_cmd->add_option("--table-out", fit_out, "write the comparison table as CSV");

  CLI::App* figures_cmd = app.add_subcommand("figures", "render figure data and SVG");
  figures_cmd->add_option("--type", figure_type, "heatmap, scaling, exponents or overlay")
      ->required();
  figures_cmd->add_option("--records", figure_records, "record directory (heatmap)");
  figures_cmd->add_option("--curve", figure_curves, "sweep curve CSV file(s)");
  figures_cmd->add_option("--out", figure_out, "output base path (writes .csv and .svg)");

  try {
    app.parse(argc, argv);
    if (predict_cmd->parsed()) return cmd_predict(predict_flags, predict_taus);
    if (run_cmd->parsed()) return cmd_run(run_flags, run_taus);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_flags);
    if (validate_cmd->parsed()) return cmd_validate(validate_flags, validate_taus, validate_tol);
    if (fit_cmd->parsed()) return cmd_fit(fit_curves, fit_out);
    if (figures_cmd->parsed())
      return cmd_figures(figure_type, figure_records, figure_curves, figure_out);
    return 2;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const ModelError& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return 2;
  } catch (const FitError& e) {
    std::fprintf(stderr, "fit error: %s\n", e.what());
    return 4;
  } catch (const SimulationError& e) {
    std::fprintf(stderr, "simulation error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
