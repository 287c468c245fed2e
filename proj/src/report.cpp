#include "rollbot/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>

namespace rollbot {

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

namespace {

std::string optional_number(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

std::string fixed(const std::optional<double>& v, int digits) {
  if (!v) return "-";
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << *v;
  return os.str();
}

}  // namespace

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
  out << kTraceColumns << '\n';
  for (const TraceRow& r : trace.rows) {
    const double cols[] = {r.t,     r.ref,   r.theta, r.alpha, r.theta_dot, r.alpha_dot, r.e,
                           r.e_dot, r.tau_c, r.tau_n, r.tau,   r.s_p,       r.s_c,       r.v,
                           r.v_p,   r.zeta,  r.noise, r.sgn};
    for (double c : cols) out << format_number(c) << ',';
    out << r.width_clamps << ',' << format_number(r.rate_margin) << '\n';
  }
}

void write_snapshots_csv(std::ostream& out, const SimTrace& trace) {
  if (trace.snapshots.empty()) return;
  const FnnParams<double>& shape = trace.snapshots.front().params;
  out << "row,t";
  for (Eigen::Index i = 0; i < shape.size_a(); ++i) out << ",c_a" << i;
  for (Eigen::Index i = 0; i < shape.size_a(); ++i) out << ",sigma_a" << i;
  for (Eigen::Index j = 0; j < shape.size_b(); ++j) out << ",c_b" << j;
  for (Eigen::Index j = 0; j < shape.size_b(); ++j) out << ",sigma_b" << j;
  for (Eigen::Index i = 0; i < shape.size_a(); ++i)
    for (Eigen::Index j = 0; j < shape.size_b(); ++j) out << ",f_" << i << '_' << j;
  out << '\n';

  for (const ParameterSnapshot& s : trace.snapshots) {
    out << s.row << ',' << format_number(s.t);
    auto put = [&out](const VectorX<double>& v) {
      for (Eigen::Index k = 0; k < v.size(); ++k) out << ',' << format_number(v(k));
    };
    put(s.params.centers_a);
    put(s.params.widths_a);
    put(s.params.centers_b);
    put(s.params.widths_b);
    for (Eigen::Index i = 0; i < s.params.consequents.rows(); ++i)
      for (Eigen::Index j = 0; j < s.params.consequents.cols(); ++j)
        out << ',' << format_number(s.params.consequents(i, j));
    out << '\n';
  }
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsEntry>& entries) {
  out << kMetricsColumns << '\n';
  for (const MetricsEntry& e : entries) {
    for (const SegmentMetrics& s : e.metrics.segments) {
      out << e.scenario << ',' << to_string(e.mode) << ',' << s.index + 1 << ','
          << format_number(s.ss_error) << ',' << optional_number(s.rise_time) << ','
          << optional_number(s.settling_time) << ',' << optional_number(s.overshoot) << '\n';
    }
  }
}

void write_metrics_table(std::ostream& out, const std::vector<MetricsEntry>& entries) {
  out << std::left << std::setw(22) << "scenario" << std::setw(9) << "mode" << std::right
      << std::setw(8) << "segment" << std::setw(14) << "ss_error" << std::setw(12) << "rise_time"
      << std::setw(15) << "settling_time" << std::setw(14) << "overshoot_%" << '\n';
  for (const MetricsEntry& e : entries) {
    for (const SegmentMetrics& s : e.metrics.segments) {
      out << std::left << std::setw(22) << e.scenario << std::setw(9) << to_string(e.mode)
          << std::right << std::setw(8) << s.index + 1 << std::setw(14) << fixed(s.ss_error, 6)
          << std::setw(12) << fixed(s.rise_time, 3) << std::setw(15) << fixed(s.settling_time, 3)
          << std::setw(14) << fixed(s.overshoot, 2) << '\n';
    }
  }
}

void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << contents;
    if (!out) throw Error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

/// Round-ish tick spacing covering [lo, hi] with about `count` ticks.
double tick_step(double lo, double hi, int count) {
  const double raw = (hi - lo) / count;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10.0 * mag;
}

}  // namespace

std::string render_svg_plot(const std::string& title, const std::string& x_label,
                            const std::string& y_label, const std::vector<PlotSeries>& series) {
  constexpr double width = 800, height = 420;
  constexpr double left = 70, right = 170, top = 40, bottom = 55;
  const double pw = width - left - right;
  const double ph = height - top - bottom;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const PlotSeries& s : series) {
    for (double v : s.x) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
    for (double v : s.y)
      if (std::isfinite(v)) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
  }
  if (!(xmax > xmin)) xmin = 0, xmax = 1;
  if (!(ymax > ymin)) ymin -= 1, ymax += 1;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"16\">"
     << escape_xml(title) << "</text>\n";

  const double xs = tick_step(xmin, xmax, 8);
  for (double x = std::ceil(xmin / xs) * xs; x <= xmax + 1e-9; x += xs) {
    os << "<line x1=\"" << sx(x) << "\" y1=\"" << top << "\" x2=\"" << sx(x) << "\" y2=\""
       << top + ph << "\" stroke=\"#e0e0e0\"/>\n";
    os << "<text x=\"" << sx(x) << "\" y=\"" << top + ph + 18
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << format_number(std::round(x / xs) * xs)
       << "</text>\n";
  }
  const double ys = tick_step(ymin, ymax, 6);
  for (double y = std::ceil(ymin / ys) * ys; y <= ymax + 1e-12; y += ys) {
    const double yr = std::abs(y) < ys * 1e-9 ? 0.0 : y;
    os << "<line x1=\"" << left << "\" y1=\"" << sy(yr) << "\" x2=\"" << left + pw << "\" y2=\""
       << sy(yr) << "\" stroke=\"#e0e0e0\"/>\n";
    std::ostringstream lab;
    lab << std::setprecision(4) << yr;
    os << "<text x=\"" << left - 6 << "\" y=\"" << sy(yr) + 4
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << lab.str()
       << "</text>\n";
  }
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
     << escape_xml(x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << top + ph / 2 << ")\" font-family=\"sans-serif\" font-size=\"13\">" << escape_xml(y_label)
     << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const PlotSeries& s = series[k];
    // Thin long traces to roughly one point per horizontal pixel.
    const std::size_t n = std::min(s.x.size(), s.y.size());
    const std::size_t stride = std::max<std::size_t>(1, n / 2000);
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
    if (s.dashed) os << " stroke-dasharray=\"6 4\"";
    os << " points=\"";
    for (std::size_t i = 0; i < n; i += stride) {
      if (std::isfinite(s.y[i])) os << sx(s.x[i]) << ',' << sy(s.y[i]) << ' ';
    }
    if (n > 0 && (n - 1) % stride != 0 && std::isfinite(s.y[n - 1])) {
      os << sx(s.x[n - 1]) << ',' << sy(s.y[n - 1]);
    }
    os << "\"/>\n";
    const double ly = top + 14 + 20.0 * double(k);
    os << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 40
       << "\" y2=\"" << ly << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
    if (s.dashed) os << " stroke-dasharray=\"6 4\"";
    os << "/>\n";
    os << "<text x=\"" << left + pw + 46 << "\" y=\"" << ly + 4
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape_xml(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace rollbot
