#include "sitaware/svg_plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "sitaware/csv.hpp"
#include "sitaware/errors.hpp"
#include "sitaware/numeric.hpp"

namespace sitaware::plots {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kCharWidth = 7.2;  // monospace at 12px; fixed so layout never probes fonts

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Scale {
  double lo = 0.0, hi = 1.0;
  double out_lo = 0.0, out_hi = 1.0;
  double operator()(double v) const { return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo); }
};

// Pads a data range and guards the degenerate all-equal case.
std::pair<double, double> padded(double lo, double hi) {
  if (lo > hi) std::swap(lo, hi);
  const double span = hi - lo;
  if (span <= 0.0) return {lo - 1.0, hi + 1.0};
  return {lo - 0.05 * span, hi + 0.05 * span};
}

void open_svg(std::string& s, const std::string& title) {
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
       "viewBox=\"0 0 800 600\" font-family=\"monospace\" font-size=\"12\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
  s += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" + title + "</text>\n";
}

void close_svg(std::string& s) { s += "</svg>\n"; }

std::string escape_xml(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c; break;
    }
  }
  return out;
}

void line(std::string& s, double x1, double y1, double x2, double y2, const char* style) {
  s += "<line x1=\"" + px(x1) + "\" y1=\"" + px(y1) + "\" x2=\"" + px(x2) + "\" y2=\"" + px(y2) +
       "\" " + style + "/>\n";
}

void text_at(std::string& s, double x, double y, const std::string& content,
             const char* anchor = "start") {
  s += "<text x=\"" + px(x) + "\" y=\"" + px(y) + "\" text-anchor=\"" + anchor + "\">" +
       escape_xml(content) + "</text>\n";
}

void x_axis(std::string& s, const Scale& sx, double y, int ticks = 5) {
  line(s, sx.out_lo, y, sx.out_hi, y, "stroke=\"black\" stroke-width=\"1\"");
  for (int t = 0; t < ticks; ++t) {
    const double v = sx.lo + (sx.hi - sx.lo) * t / (ticks - 1);
    const double x = sx(v);
    line(s, x, y, x, y + 5, "stroke=\"black\" stroke-width=\"1\"");
    text_at(s, x, y + 18, label(v), "middle");
  }
}

const meta::ForestRow* summary_row(const meta::PlotData& plot, const char* id) {
  for (const auto& row : plot.forest_rows)
    if (row.summary && row.study_id == id) return &row;
  return nullptr;
}

}  // namespace

std::string forest_svg(const meta::PlotData& plot) {
  if (plot.forest_rows.empty()) throw SizeError("forest plot needs at least one row");

  double lo = plot.forest_rows.front().ci_low;
  double hi = plot.forest_rows.front().ci_high;
  double max_weight = 0.0;
  for (const auto& row : plot.forest_rows) {
    lo = std::min(lo, row.ci_low);
    hi = std::max(hi, row.ci_high);
    if (!row.summary) max_weight = std::max(max_weight, row.weight_common);
  }
  const auto [dlo, dhi] = padded(lo, hi);
  const Scale sx{dlo, dhi, 230.0, 640.0};

  const double top = 50.0, bottom = 560.0;
  const double row_h = (bottom - top) / static_cast<double>(plot.forest_rows.size());

  std::string s;
  open_svg(s, "Forest plot");
  text_at(s, 10.0, 42.0, "study");
  text_at(s, 650.0, 42.0, "weight c / r");

  if (0.0 > dlo && 0.0 < dhi)
    line(s, sx(0.0), top, sx(0.0), bottom,
         "stroke=\"gray\" stroke-width=\"1\" stroke-dasharray=\"4,3\"");

  for (std::size_t i = 0; i < plot.forest_rows.size(); ++i) {
    const auto& row = plot.forest_rows[i];
    const double y = top + row_h * (static_cast<double>(i) + 0.5);
    text_at(s, 10.0, y + 4.0, row.study_id);
    if (row.summary) {
      // Summary diamond spanning the confidence interval.
      const double cx = sx(row.effect);
      const double xl = sx(row.ci_low);
      const double xr = sx(row.ci_high);
      s += "<polygon points=\"" + px(xl) + "," + px(y) + " " + px(cx) + "," + px(y - 7.0) + " " +
           px(xr) + "," + px(y) + " " + px(cx) + "," + px(y + 7.0) +
           "\" fill=\"black\"/>\n";
    } else {
      line(s, sx(row.ci_low), y, sx(row.ci_high), y, "stroke=\"black\" stroke-width=\"1\"");
      const double half = max_weight > 0.0
                              ? 2.0 + 5.0 * std::sqrt(row.weight_common / max_weight)
                              : 3.0;
      const double cx = sx(row.effect);
      s += "<rect x=\"" + px(cx - half) + "\" y=\"" + px(y - half) + "\" width=\"" +
           px(2.0 * half) + "\" height=\"" + px(2.0 * half) + "\" fill=\"black\"/>\n";
      char buf[48];
      std::snprintf(buf, sizeof buf, "%.1f%% / %.1f%%", 100.0 * row.weight_common,
                    100.0 * row.weight_random);
      text_at(s, 650.0, y + 4.0, buf);
    }
  }
  x_axis(s, sx, bottom + 6.0);
  close_svg(s);
  return s;
}

std::string funnel_svg(const meta::PlotData& plot) {
  if (plot.funnel_points.empty()) throw SizeError("funnel plot needs at least one point");

  double lo = plot.funnel_points.front().effect;
  double hi = lo;
  double max_se = 0.0;
  for (const auto& p : plot.funnel_points) {
    lo = std::min(lo, p.effect);
    hi = std::max(hi, p.effect);
    max_se = std::max(max_se, p.standard_error);
  }
  const meta::ForestRow* common = summary_row(plot, "common");
  if (common) {
    lo = std::min(lo, common->ci_low);
    hi = std::max(hi, common->ci_high);
  }
  if (max_se <= 0.0) max_se = 1.0;

  const auto [dlo, dhi] = padded(lo, hi);
  const Scale sx{dlo, dhi, 90.0, 760.0};
  const Scale sy{0.0, 1.05 * max_se, 60.0, 540.0};  // SE grows downward

  std::string s;
  open_svg(s, "Funnel plot");
  line(s, 80.0, sy.out_lo, 80.0, sy.out_hi, "stroke=\"black\" stroke-width=\"1\"");
  for (int t = 0; t < 5; ++t) {
    const double v = sy.lo + (sy.hi - sy.lo) * t / 4.0;
    const double y = sy(v);
    line(s, 75.0, y, 80.0, y, "stroke=\"black\" stroke-width=\"1\"");
    text_at(s, 70.0, y + 4.0, label(v), "end");
  }
  text_at(s, 14.0, 42.0, "standard error");

  if (common) {
    // Pseudo-CI funnel around the common-effect summary at the plotted level.
    const double z = normal_quantile(0.5 * (1.0 + plot.ci_level));
    const double cx = common->effect;
    line(s, sx(cx), sy.out_lo, sx(cx), sy.out_hi,
         "stroke=\"gray\" stroke-width=\"1\" stroke-dasharray=\"4,3\"");
    line(s, sx(cx), sy(0.0), sx(cx - z * sy.hi), sy(sy.hi),
         "stroke=\"gray\" stroke-width=\"1\" stroke-dasharray=\"2,3\"");
    line(s, sx(cx), sy(0.0), sx(cx + z * sy.hi), sy(sy.hi),
         "stroke=\"gray\" stroke-width=\"1\" stroke-dasharray=\"2,3\"");
  }

  for (const auto& p : plot.funnel_points)
    s += "<circle cx=\"" + px(sx(p.effect)) + "\" cy=\"" + px(sy(p.standard_error)) +
         "\" r=\"3\" fill=\"black\"/>\n";
  x_axis(s, sx, 552.0);
  close_svg(s);
  return s;
}

std::string residual_svg(const meta::PlotData& plot) {
  if (plot.residuals.empty()) throw SizeError("residual plot needs at least one study");
  if (plot.residuals.size() != plot.funnel_points.size())
    throw InputError("residuals and study list disagree in length");

  double max_abs = 2.5;
  for (double r : plot.residuals) max_abs = std::max(max_abs, 1.1 * std::abs(r));
  const Scale sy{-max_abs, max_abs, 540.0, 60.0};
  const std::size_t n = plot.residuals.size();

  std::string s;
  open_svg(s, "Standardized residuals");
  line(s, 60.0, sy(0.0), 760.0, sy(0.0), "stroke=\"black\" stroke-width=\"1\"");
  for (double guide : {-1.959964, 1.959964})
    line(s, 60.0, sy(guide), 760.0, sy(guide),
         "stroke=\"gray\" stroke-width=\"1\" stroke-dasharray=\"4,3\"");
  text_at(s, 14.0, 42.0, "residual");
  for (int t = 0; t < 5; ++t) {
    const double v = sy.lo + (sy.hi - sy.lo) * t / 4.0;
    line(s, 55.0, sy(v), 60.0, sy(v), "stroke=\"black\" stroke-width=\"1\"");
    text_at(s, 50.0, sy(v) + 4.0, label(v), "end");
  }

  const double slot = 700.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = 60.0 + slot * (static_cast<double>(i) + 0.5);
    const double y = sy(plot.residuals[i]);
    line(s, x, sy(0.0), x, y, "stroke=\"black\" stroke-width=\"1\"");
    s += "<circle cx=\"" + px(x) + "\" cy=\"" + px(y) + "\" r=\"3\" fill=\"black\"/>\n";
    const std::string& id = plot.funnel_points[i].study_id;
    const std::string short_id =
        id.size() * kCharWidth > slot ? id.substr(0, std::max<std::size_t>(1, slot / kCharWidth)) : id;
    text_at(s, x, 560.0, short_id, "middle");
  }
  close_svg(s);
  return s;
}

std::string forest_csv(const meta::PlotData& plot) {
  std::string out = "study_id,effect,ci_low,ci_high,weight_common,weight_random,summary\n";
  std::vector<std::string> fields;
  for (const auto& row : plot.forest_rows) {
    fields = {row.study_id,
              format_double(row.effect),
              format_double(row.ci_low),
              format_double(row.ci_high),
              format_double(row.weight_common),
              format_double(row.weight_random),
              row.summary ? "true" : "false"};
    out += csv_row(fields);
  }
  return out;
}

std::string funnel_csv(const meta::PlotData& plot) {
  std::string out = "study_id,effect,standard_error\n";
  std::vector<std::string> fields;
  for (const auto& p : plot.funnel_points) {
    fields = {p.study_id, format_double(p.effect), format_double(p.standard_error)};
    out += csv_row(fields);
  }
  return out;
}

std::string residual_csv(const meta::PlotData& plot) {
  if (plot.residuals.size() != plot.funnel_points.size())
    throw InputError("residuals and study list disagree in length");
  std::string out = "study_id,residual\n";
  std::vector<std::string> fields;
  for (std::size_t i = 0; i < plot.residuals.size(); ++i) {
    fields = {plot.funnel_points[i].study_id, format_double(plot.residuals[i])};
    out += csv_row(fields);
  }
  return out;
}

}  // namespace sitaware::plots
