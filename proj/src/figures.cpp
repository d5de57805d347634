#include "ikzm/figures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "ikzm/errors.hpp"
#include "ikzm/scaling.hpp"

namespace fs = std::filesystem;

namespace ikzm {

namespace {

std::string fmt(double v, const char* spec = "%.17g") {
  char buf[48];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                               "#ff7f0e", "#8c564b", "#17becf", "#e377c2"};

// Minimal plotting surface: fixed margins, linear or log axes, decade or
// stepped ticks. Everything is emitted as one standalone SVG document.
class Canvas {
 public:
  Canvas(double x0, double x1, double y0, double y1, bool logx, bool logy)
      : x0_(logx ? std::log10(x0) : x0),
        x1_(logx ? std::log10(x1) : x1),
        y0_(logy ? std::log10(y0) : y0),
        y1_(logy ? std::log10(y1) : y1),
        logx_(logx),
        logy_(logy) {}

  double tx(double x) const {
    double v = logx_ ? std::log10(x) : x;
    return ml_ + (v - x0_) / (x1_ - x0_) * (W_ - ml_ - mr_);
  }
  double ty(double y) const {
    double v = logy_ ? std::log10(y) : y;
    return H_ - mb_ - (v - y0_) / (y1_ - y0_) * (H_ - mt_ - mb_);
  }

  void raw(const std::string& s) { body_ += s; }

  void line(double xa, double ya, double xb, double yb, const std::string& color, double width,
            const char* dash = nullptr) {
    body_ += "<line x1=\"" + fmt(xa, "%.2f") + "\" y1=\"" + fmt(ya, "%.2f") + "\" x2=\"" +
             fmt(xb, "%.2f") + "\" y2=\"" + fmt(yb, "%.2f") + "\" stroke=\"" + color +
             "\" stroke-width=\"" + fmt(width, "%.2f") + "\"";
    if (dash) body_ += std::string(" stroke-dasharray=\"") + dash + "\"";
    body_ += "/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                double width, const char* dash = nullptr) {
    if (pts.size() < 2) return;
    body_ += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"" +
             fmt(width, "%.2f") + "\"";
    if (dash) body_ += std::string(" stroke-dasharray=\"") + dash + "\"";
    body_ += " points=\"";
    for (const auto& [x, y] : pts) body_ += fmt(tx(x), "%.2f") + "," + fmt(ty(y), "%.2f") + " ";
    body_ += "\"/>\n";
  }

  void circle(double x, double y, double r, const std::string& color) {
    body_ += "<circle cx=\"" + fmt(tx(x), "%.2f") + "\" cy=\"" + fmt(ty(y), "%.2f") + "\" r=\"" +
             fmt(r, "%.2f") + "\" fill=\"" + color + "\"/>\n";
  }

  void text(double px, double py, const std::string& s, const char* anchor = "middle",
            double size = 12, const char* extra = "") {
    body_ += "<text x=\"" + fmt(px, "%.2f") + "\" y=\"" + fmt(py, "%.2f") + "\" font-size=\"" +
             fmt(size, "%.1f") + "\" text-anchor=\"" + anchor + "\" " + extra +
             " font-family=\"sans-serif\" fill=\"#222\">" + esc(s) + "</text>\n";
  }

  void frame_and_ticks(const std::string& xlabel, const std::string& ylabel,
                       const std::string& title) {
    body_ = axis_layer() + body_;  // grid under the data
    line(ml_, H_ - mb_, W_ - mr_, H_ - mb_, "#222", 1.2);
    line(ml_, mt_, ml_, H_ - mb_, "#222", 1.2);
    text((ml_ + W_ - mr_) / 2, H_ - 12, xlabel);
    text(16, (mt_ + H_ - mb_) / 2, ylabel, "middle", 12,
         ("transform=\"rotate(-90 16 " + fmt((mt_ + H_ - mb_) / 2, "%.1f") + ")\"").c_str());
    text((ml_ + W_ - mr_) / 2, mt_ - 10, title, "middle", 14, "font-weight=\"bold\"");
  }

  std::string document() const {
    std::string head =
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W_, "%.0f") + "\" height=\"" +
        fmt(H_, "%.0f") + "\" viewBox=\"0 0 " + fmt(W_, "%.0f") + " " + fmt(H_, "%.0f") + "\">\n" +
        "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return head + body_ + "</svg>\n";
  }

  double W_ = 720, H_ = 520, ml_ = 78, mr_ = 30, mt_ = 46, mb_ = 56;

 private:
  std::string axis_layer() {
    std::string saved;
    std::swap(saved, body_);
    if (logx_) decade_ticks(true);
    else linear_ticks(true);
    if (logy_) decade_ticks(false);
    else linear_ticks(false);
    std::string axes;
    std::swap(axes, body_);
    body_ = saved;
    return axes;
  }

  void decade_ticks(bool xaxis) {
    double lo = xaxis ? x0_ : y0_, hi = xaxis ? x1_ : y1_;
    for (int e = int(std::floor(lo)) - 1; e <= int(std::ceil(hi)) + 1; ++e) {
      for (int m = 1; m <= 9; ++m) {
        double v = e + std::log10(double(m));
        if (v < lo - 1e-9 || v > hi + 1e-9) continue;
        double value = std::pow(10.0, v);
        bool major = (m == 1);
        tick(xaxis, value, major);
        if (major) tick_label(xaxis, value, pow10_label(e));
      }
    }
  }

  void linear_ticks(bool xaxis) {
    double lo = xaxis ? x0_ : y0_, hi = xaxis ? x1_ : y1_;
    double span = hi - lo;
    double step = std::pow(10.0, std::floor(std::log10(span / 5.0)));
    if (span / step > 10) step *= 2;
    if (span / step > 10) step *= 2.5;
    if (span / step > 10) step *= 2;
    double first = std::ceil(lo / step - 1e-9) * step;
    for (double v = first; v <= hi + 1e-9 * span; v += step) {
      double snapped = std::abs(v) < 1e-12 * span ? 0.0 : v;
      tick(xaxis, snapped, true);
      tick_label(xaxis, snapped, fmt(snapped, "%g"));
    }
  }

  void tick(bool xaxis, double value, bool major) {
    double len = major ? 6.0 : 3.5;
    std::string color = major ? "#222" : "#999";
    if (xaxis) {
      double px = untransformed_tx(value);
      line(px, H_ - mb_, px, H_ - mb_ + len, color, 1.0);
      if (major) line(px, mt_, px, H_ - mb_, "#eee", 0.8);
    } else {
      double py = untransformed_ty(value);
      line(ml_ - len, py, ml_, py, color, 1.0);
      if (major) line(ml_, py, W_ - mr_, py, "#eee", 0.8);
    }
  }

  void tick_label(bool xaxis, double value, const std::string& label) {
    if (xaxis) text(untransformed_tx(value), H_ - mb_ + 20, label, "middle", 11);
    else text(ml_ - 9, untransformed_ty(value) + 4, label, "end", 11);
  }

  // tick positions are computed in already-log10 coordinates
  double untransformed_tx(double v) const {
    double u = logx_ ? std::log10(v) : v;
    return ml_ + (u - x0_) / (x1_ - x0_) * (W_ - ml_ - mr_);
  }
  double untransformed_ty(double v) const {
    double u = logy_ ? std::log10(v) : v;
    return H_ - mb_ - (u - y0_) / (y1_ - y0_) * (H_ - mt_ - mb_);
  }

  static std::string pow10_label(int e) {
    if (e >= -3 && e <= 3) return fmt(std::pow(10.0, e), "%g");
    return "1e" + std::to_string(e);
  }

  std::string body_;
  double x0_, x1_, y0_, y1_;
  bool logx_, logy_;
};

void write_file(const std::string& path, const std::string& content) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw SimulationError("cannot write " + path);
  out << content;
  if (!out.flush()) throw SimulationError("short write on " + path);
}

// five-stop dark-to-bright map for scalar fields
std::string heat_color(double t) {
  static const double stops[5][3] = {{0.267, 0.005, 0.329},
                                     {0.231, 0.322, 0.545},
                                     {0.129, 0.567, 0.551},
                                     {0.369, 0.788, 0.382},
                                     {0.993, 0.906, 0.144}};
  t = std::clamp(t, 0.0, 1.0) * 4.0;
  int k = std::min(3, int(t));
  double f = t - k;
  char buf[8];
  std::string out = "#";
  for (int c = 0; c < 3; ++c) {
    int byte = int(std::lround(255.0 * (stops[k][c] + f * (stops[k + 1][c] - stops[k][c]))));
    std::snprintf(buf, sizeof(buf), "%02x", byte);
    out += buf;
  }
  return out;
}

struct SeriesKey {
  std::string backend;
  int L;
  double q, alpha_q, J0;
  int chi;

  bool operator<(const SeriesKey& o) const {
    return std::tie(q, alpha_q, L, J0, backend, chi) <
           std::tie(o.q, o.alpha_q, o.L, o.J0, o.backend, o.chi);
  }
  bool homogeneous() const { return alpha_q == 0.0; }
  std::string label() const {
    std::string s = homogeneous() ? "flat" : ("q=" + fmt(q, "%g") + " a=" + fmt(alpha_q, "%.3g"));
    s += " L=" + std::to_string(L) + " " + backend;
    return s;
  }
  ChainSpec chain() const { return ChainSpec{L, q, alpha_q, J0}; }
};

std::map<SeriesKey, std::vector<CurveRow>> group_rows(const std::vector<CurveRow>& rows) {
  if (rows.empty()) throw ConfigError("figure input holds no curve rows");
  std::map<SeriesKey, std::vector<CurveRow>> groups;
  for (const CurveRow& r : rows)
    groups[{r.backend, r.L, r.q, r.alpha_q, r.J0, r.chi}].push_back(r);
  for (auto& [key, series] : groups)
    std::sort(series.begin(), series.end(),
              [](const CurveRow& a, const CurveRow& b) { return a.tau_Q < b.tau_Q; });
  return groups;
}

std::pair<double, double> positive_range(const std::vector<double>& v) {
  double lo = 0, hi = 0;
  for (double x : v)
    if (x > 0) {
      lo = lo == 0 ? x : std::min(lo, x);
      hi = std::max(hi, x);
    }
  if (lo == 0) throw FitError("no positive data to plot on a log axis");
  return {lo, hi};
}

}  // namespace

FigurePaths figure_heatmap(const std::vector<QuenchRecord>& records, const std::string& out_base) {
  if (records.empty()) throw ConfigError("heat map needs at least one record");
  std::vector<QuenchRecord> recs = records;
  std::sort(recs.begin(), recs.end(), [](const QuenchRecord& a, const QuenchRecord& b) {
    return a.snapshot.tau_Q < b.snapshot.tau_Q;
  });

  std::string csv = "# schema=1\n# columns: tau_Q,time,scaled_time,density\n";
  double vmax = 0.0;
  for (const auto& rec : recs) {
    for (size_t i = 0; i < rec.times.size(); ++i) {
      double scaled = rec.times[i] / rec.snapshot.tau_Q;
      csv += fmt(rec.snapshot.tau_Q) + "," + fmt(rec.times[i]) + "," + fmt(scaled) + "," +
             fmt(rec.density[i]) + "\n";
      vmax = std::max(vmax, rec.density[i]);
    }
  }
  if (vmax <= 0.0) vmax = 1.0;

  auto [tau_lo, tau_hi] = positive_range([&] {
    std::vector<double> taus;
    for (const auto& r : recs) taus.push_back(r.snapshot.tau_Q);
    return taus;
  }());
  bool log_y = recs.size() > 1 && tau_hi / tau_lo > 1.0001;
  Canvas cv(-1.0, 1.0, log_y ? tau_lo / 1.3 : tau_lo * 0.9, log_y ? tau_hi * 1.3 : tau_hi * 1.1,
            false, log_y);
  cv.mr_ = 110;  // room for the color bar

  // row bands at geometric midpoints between consecutive ramp times
  auto band = [&](size_t k) -> std::pair<double, double> {
    double t = recs[k].snapshot.tau_Q;
    double below = k == 0 ? t : recs[k - 1].snapshot.tau_Q;
    double above = k + 1 == recs.size() ? t : recs[k + 1].snapshot.tau_Q;
    double lo = k == 0 ? t * std::sqrt(t / above) : std::sqrt(t * below);
    double hi = k + 1 == recs.size() ? t * std::sqrt(t / below) : std::sqrt(t * above);
    if (recs.size() == 1) { lo = t / 1.2; hi = t * 1.2; }
    return {lo, hi};
  };

  for (size_t k = 0; k < recs.size(); ++k) {
    const auto& rec = recs[k];
    auto [blo, bhi] = band(k);
    double ytop = cv.ty(bhi), ybot = cv.ty(blo);
    size_t n = rec.times.size();
    for (size_t i = 0; i < n; ++i) {
      double s = rec.times[i] / rec.snapshot.tau_Q;
      double half = 1.0 / double(n - 1);
      double xa = cv.tx(std::max(-1.0, s - half)), xb = cv.tx(std::min(1.0, s + half));
      cv.raw("<rect x=\"" + fmt(xa, "%.2f") + "\" y=\"" + fmt(ytop, "%.2f") + "\" width=\"" +
             fmt(xb - xa + 0.3, "%.2f") + "\" height=\"" + fmt(ybot - ytop + 0.3, "%.2f") +
             "\" fill=\"" + heat_color(rec.density[i] / vmax) + "\"/>\n");
    }
  }

  // homogeneous critical time: h(t) crosses J(0) at t = 0
  cv.line(cv.tx(0.0), cv.ty(log_y ? tau_hi * 1.3 : tau_hi * 1.1),
          cv.tx(0.0), cv.ty(log_y ? tau_lo / 1.3 : tau_lo * 0.9), "white", 1.6, "6,5");
  cv.text(cv.tx(0.0) + 6, 62, "t_c(0)", "start", 11);

  // color bar
  cv.raw("<defs><linearGradient id=\"cb\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">");
  for (int i = 0; i <= 8; ++i)
    cv.raw("<stop offset=\"" + fmt(i / 8.0, "%.3f") + "\" stop-color=\"" + heat_color(i / 8.0) +
           "\"/>");
  cv.raw("</linearGradient></defs>\n");
  double bx = cv.W_ - cv.mr_ + 26, by = cv.mt_, bh = cv.H_ - cv.mt_ - cv.mb_;
  cv.raw("<rect x=\"" + fmt(bx, "%.1f") + "\" y=\"" + fmt(by, "%.1f") +
         "\" width=\"16\" height=\"" + fmt(bh, "%.1f") +
         "\" fill=\"url(#cb)\" stroke=\"#222\" stroke-width=\"0.8\"/>\n");
  for (int i = 0; i <= 2; ++i) {
    double v = vmax * i / 2.0;
    cv.text(bx + 22, by + bh - bh * i / 2.0 + 4, fmt(v, "%.3g"), "start", 10);
  }
  cv.text(bx + 8, by - 8, "d", "middle", 11);

  cv.frame_and_ticks("t / tau_Q", "tau_Q", "kink density through the ramp");

  FigurePaths paths{out_base + ".csv", out_base + ".svg"};
  write_file(paths.data_path, csv);
  write_file(paths.svg_path, cv.document());
  return paths;
}

FigurePaths figure_scaling(const std::vector<CurveRow>& rows, const std::string& out_base) {
  auto groups = group_rows(rows);

  std::vector<double> all_tau, all_d;
  for (const auto& [key, series] : groups)
    for (const auto& r : series) {
      all_tau.push_back(r.tau_Q);
      all_d.push_back(r.d_final);
    }
  auto [tx0, tx1] = positive_range(all_tau);
  auto [dy0, dy1] = positive_range(all_d);
  Canvas cv(tx0 / 1.5, tx1 * 1.5, dy0 / 2.0, dy1 * 2.0, true, true);

  std::string csv = "# schema=1\n# columns: series,tau_Q,d_final\n";
  int ci = 0;
  double legend_y = cv.mt_ + 16;
  for (const auto& [key, series] : groups) {
    std::string color = kSeriesColors[ci % 8];
    std::vector<std::pair<double, double>> pts;
    std::vector<double> taus, ds;
    for (const auto& r : series) {
      if (r.d_final > 0) {
        pts.push_back({r.tau_Q, r.d_final});
        taus.push_back(r.tau_Q);
        ds.push_back(r.d_final);
      }
      csv += key.label() + "," + fmt(r.tau_Q) + "," + fmt(r.d_final) + "\n";
    }
    cv.polyline(pts, color, 1.2);
    for (const auto& [x, y] : pts) cv.circle(x, y, 3.0, color);

    // overlay fits when the series supports them; a figure should still
    // render when a fit precondition fails
    try {
      if (key.homogeneous()) {
        ScalingFit fit = fit_power_law(taus, ds);
        std::vector<std::pair<double, double>> fl = {{taus.front(), fit.evaluate(taus.front())},
                                                     {taus.back(), fit.evaluate(taus.back())}};
        cv.polyline(fl, color, 1.0, "5,4");
        csv += "# fit " + key.label() + " beta=" + fmt(fit.beta, "%.4f") +
               " err=" + fmt(fit.delta_beta, "%.4f") + " r2=" + fmt(fit.r2, "%.5f") + "\n";
      } else {
        SegmentOptions opts;
        opts.anchor_tau = predict_crossover(key.chain());
        opts.slow_beta_hint = predict_general_exponents({}, key.q).beta_ikzm;
        RegimeSplit split = segment_regimes(taus, ds, opts);
        if (!split.single_regime) {
          auto seg = [&](const ScalingFit& f, double a, double b) {
            std::vector<std::pair<double, double>> fl = {{a, f.evaluate(a)}, {b, f.evaluate(b)}};
            cv.polyline(fl, color, 1.0, "5,4");
          };
          seg(split.fast, split.tau_used.front(), split.tau_star);
          seg(split.slow, split.tau_star, split.tau_used.back());
          cv.line(cv.tx(split.tau_star), cv.ty(dy0 / 2.0), cv.tx(split.tau_star), cv.ty(dy1 * 2.0),
                  color, 0.9, "2,4");
          csv += "# fit " + key.label() + " beta_fast=" + fmt(split.fast.beta, "%.4f") +
                 " beta_slow=" + fmt(split.slow.beta, "%.4f") +
                 " tau_star=" + fmt(split.tau_star, "%.6g") + "\n";
        } else {
          csv += "# fit " + key.label() + " single beta=" + fmt(split.combined.beta, "%.4f") + "\n";
        }
      }
    } catch (const FitError& e) {
      csv += std::string("# fit ") + key.label() + " skipped: " + e.what() + "\n";
    }

    cv.raw("<rect x=\"" + fmt(cv.W_ - cv.mr_ - 208, "%.1f") + "\" y=\"" +
           fmt(legend_y - 9, "%.1f") + "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n");
    cv.text(cv.W_ - cv.mr_ - 194, legend_y, key.label(), "start", 10.5);
    legend_y += 15;
    ++ci;
  }

  // reference slope guides anchored at the lower-left of the data cloud
  auto guide = [&](double beta, const char* label) {
    double xa = tx0, xb = tx0 * std::pow(10.0, 0.6);
    double ya = dy0 * 1.6;
    std::vector<std::pair<double, double>> pts = {{xa, ya}, {xb, ya * std::pow(xb / xa, -beta)}};
    cv.polyline(pts, "#555", 1.0, "2,3");
    cv.text(cv.tx(xb) + 4, cv.ty(pts.back().second) + 4, label, "start", 10);
  };
  guide(0.5, "slope -1/2");
  guide(1.5, "slope -3/2");

  cv.frame_and_ticks("tau_Q", "final kink density", "defect scaling across ramp times");

  FigurePaths paths{out_base + ".csv", out_base + ".svg"};
  write_file(paths.data_path, csv);
  write_file(paths.svg_path, cv.document());
  return paths;
}

FigurePaths figure_exponents(const std::vector<CurveRow>& rows, const std::string& out_base) {
  auto groups = group_rows(rows);

  struct Point {
    double q, beta, err, r2;
  };
  std::vector<Point> pts;
  for (const auto& [key, series] : groups) {
    if (key.homogeneous() || key.q <= 1.0) continue;
    std::vector<double> taus, ds;
    for (const auto& r : series)
      if (r.d_final > 0) {
        taus.push_back(r.tau_Q);
        ds.push_back(r.d_final);
      }
    SegmentOptions opts;
    opts.anchor_tau = predict_crossover(key.chain());
    opts.slow_beta_hint = predict_general_exponents({}, key.q).beta_ikzm;
    RegimeSplit split = segment_regimes(taus, ds, opts);
    const ScalingFit& f = split.single_regime ? split.combined : split.slow;
    pts.push_back({key.q, f.beta, f.delta_beta, f.r2});
  }
  if (pts.empty()) throw ConfigError("exponent figure needs graded-chain curves with q > 1");
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.q < b.q; });

  double qlo = pts.front().q, qhi = pts.back().q;
  double pad = std::max(0.5, 0.1 * (qhi - qlo));
  double blo = 0.4, bhi = 0.6;
  for (const auto& p : pts) {
    blo = std::min(blo, p.beta - p.err);
    bhi = std::max(bhi, p.beta + p.err);
  }
  for (double qq = qlo; qq <= qhi; qq += 0.1)
    bhi = std::max(bhi, predict_general_exponents({}, qq).beta_ikzm);
  Canvas cv(qlo - pad, qhi + pad, blo - 0.1, bhi + 0.15, false, false);

  std::string csv = "# schema=1\n# columns: q,beta_fit,beta_err,r2,beta_theory\n";
  std::vector<std::pair<double, double>> theory;
  for (double qq = qlo - pad + 1e-6; qq <= qhi + pad; qq += 0.02) {
    if (qq <= 1.02) continue;
    theory.push_back({qq, predict_general_exponents({}, qq).beta_ikzm});
  }
  cv.polyline(theory, "#444", 1.4);
  cv.line(cv.tx(qlo - pad), cv.ty(0.5), cv.tx(qhi + pad), cv.ty(0.5), "#888", 1.0, "5,4");
  cv.text(cv.tx(qhi + pad) - 6, cv.ty(0.5) - 6, "flat-chain value 1/2", "end", 10);

  for (const auto& p : pts) {
    cv.line(cv.tx(p.q), cv.ty(p.beta - p.err), cv.tx(p.q), cv.ty(p.beta + p.err), "#d62728", 1.4);
    cv.circle(p.q, p.beta, 4.0, "#d62728");
    csv += fmt(p.q) + "," + fmt(p.beta) + "," + fmt(p.err) + "," + fmt(p.r2) + "," +
           fmt(predict_general_exponents({}, p.q).beta_ikzm, "%.6f") + "\n";
  }
  cv.text(cv.tx((qlo + qhi) / 2), cv.ty(theory.back().second) - 12, "(q+1)/(2q-2)", "middle", 11);

  cv.frame_and_ticks("profile power q", "slow-branch exponent",
                     "fitted exponents against the graded-chain law");

  FigurePaths paths{out_base + ".csv", out_base + ".svg"};
  write_file(paths.data_path, csv);
  write_file(paths.svg_path, cv.document());
  return paths;
}

FigurePaths figure_overlay(const std::vector<CurveRow>& rows, const std::string& out_base) {
  auto groups = group_rows(rows);

  std::vector<double> all_tau, all_d;
  for (const auto& [key, series] : groups)
    for (const auto& r : series) {
      all_tau.push_back(r.tau_Q);
      all_d.push_back(r.d_final);
    }
  auto [tx0, tx1] = positive_range(all_tau);
  auto [dy0, dy1] = positive_range(all_d);
  Canvas cv(tx0 / 1.5, tx1 * 1.5, dy0 / 2.0, dy1 * 2.0, true, true);

  std::string csv = "# schema=1\n# columns: series,profile,tau_Q,d_final\n";
  int ci = 0;
  double legend_y = cv.mt_ + 16;
  for (const auto& [key, series] : groups) {
    std::string color = kSeriesColors[ci % 8];
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : series) {
      if (r.d_final > 0) pts.push_back({r.tau_Q, r.d_final});
      csv += key.label() + "," + (key.homogeneous() ? "flat" : "graded") + "," + fmt(r.tau_Q) +
             "," + fmt(r.d_final) + "\n";
    }
    cv.polyline(pts, color, 1.4, key.homogeneous() ? "7,4" : nullptr);
    for (const auto& [x, y] : pts) cv.circle(x, y, 2.6, color);
    cv.raw("<rect x=\"" + fmt(cv.W_ - cv.mr_ - 208, "%.1f") + "\" y=\"" +
           fmt(legend_y - 9, "%.1f") + "\" width=\"10\" height=\"10\" fill=\"" + color + "\"/>\n");
    cv.text(cv.W_ - cv.mr_ - 194, legend_y, key.label(), "start", 10.5);
    legend_y += 15;
    ++ci;
  }

  cv.frame_and_ticks("tau_Q", "final kink density", "flat against graded coupling profiles");

  FigurePaths paths{out_base + ".csv", out_base + ".svg"};
  write_file(paths.data_path, csv);
  write_file(paths.svg_path, cv.document());
  return paths;
}

}  // namespace ikzm
