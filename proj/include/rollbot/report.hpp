#ifndef ROLLBOT_REPORT_HPP
#define ROLLBOT_REPORT_HPP

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "rollbot/scenario.hpp"

namespace rollbot {

/// Trace columns, in file order.
inline constexpr std::string_view kTraceColumns =
    "t,ref,theta,alpha,theta_dot,alpha_dot,e,e_dot,tau_c,tau_n,tau,S_p,S_c,V,V_p,zeta,noise,"
    "sgn,width_clamps,rate_margin";

inline constexpr std::string_view kMetricsColumns =
    "scenario,mode,segment,ss_error,rise_time,settling_time,overshoot";

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

void write_trace_csv(std::ostream& out, const SimTrace& trace);

/// Columns: row, t, c_a[0..I), sigma_a[0..I), c_b[0..J), sigma_b[0..J),
/// f_i_j in row-major order.
void write_snapshots_csv(std::ostream& out, const SimTrace& trace);

struct MetricsEntry {
  std::string scenario;
  ControllerMode mode = ControllerMode::pd;
  Metrics metrics;
};

/// Machine-readable rows; absent metrics are empty fields.
void write_metrics_csv(std::ostream& out, const std::vector<MetricsEntry>& entries);

/// Aligned table for humans; absent metrics print as "-".
void write_metrics_table(std::ostream& out, const std::vector<MetricsEntry>& entries);

/// Writes through a temporary sibling and renames it into place.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color;
  bool dashed = false;
};

/// Standalone SVG line chart.
std::string render_svg_plot(const std::string& title, const std::string& x_label,
                            const std::string& y_label, const std::vector<PlotSeries>& series);

}  // namespace rollbot

#endif  // ROLLBOT_REPORT_HPP
