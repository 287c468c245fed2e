#include "rollbot/cli.hpp"

#include <algorithm>
#include <future>
#include <sstream>
#include <vector>

#include "rollbot/config.hpp"
#include "rollbot/report.hpp"
#include "rollbot/scenario.hpp"

namespace rollbot {
namespace {

std::string mode_slug(ControllerMode m) {
  switch (m) {
    case ControllerMode::pd: return "pd";
    case ControllerMode::pid: return "pid";
    case ControllerMode::pd_fnn: return "pd_fnn";
    case ControllerMode::pid_fnn: return "pid_fnn";
  }
  return "unknown";
}

struct Rollout {
  SimTrace trace;
  Metrics metrics;
};

Rollout execute(const SimulationConfig& cfg, ControllerMode mode, std::size_t snapshot_every) {
  ControllerConfig ctrl = cfg.controller;
  ctrl.mode = mode;
  Rollout r;
  r.trace = run(cfg.scenario, cfg.plant, ctrl, cfg.fnn_initial, cfg.learning, {snapshot_every});
  r.metrics = compute_metrics(r.trace, cfg.scenario);
  return r;
}

std::vector<double> column(const SimTrace& t, double TraceRow::*field, double sign = 1.0) {
  std::vector<double> out;
  out.reserve(t.rows.size());
  for (const TraceRow& r : t.rows) out.push_back(sign * (r.*field));
  return out;
}

void write_plots(const std::filesystem::path& dir, const std::string& name,
                 const std::vector<Rollout>& rollouts) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  const std::vector<double> time = column(rollouts.front().trace, &TraceRow::t);

  std::vector<PlotSeries> velocity{{"reference", time, column(rollouts.front().trace, &TraceRow::ref), "black", true}};
  std::vector<PlotSeries> error;
  std::vector<PlotSeries> torque;
  for (std::size_t k = 0; k < rollouts.size(); ++k) {
    const SimTrace& tr = rollouts[k].trace;
    const std::string label(to_string(tr.mode));
    const std::string color = palette[k % 4];
    velocity.push_back({label, time, column(tr, &TraceRow::theta_dot), color, false});
    error.push_back({label, time, column(tr, &TraceRow::e), color, false});
    if (uses_fnn(tr.mode)) {
      torque.push_back({label + " tau_c", time, column(tr, &TraceRow::tau_c), color, false});
      // Shown negated so both contributions add up to the applied torque.
      torque.push_back({label + " -tau_n", time, column(tr, &TraceRow::tau_n, -1.0), color, true});
    } else {
      torque.push_back({label + " tau_c", time, column(tr, &TraceRow::tau_c), color, false});
    }
  }
  write_file_atomically(dir / (name + "_velocity.svg"),
                        render_svg_plot(name + ": velocity", "time (s)", "theta_dot (rad/s)", velocity));
  write_file_atomically(dir / (name + "_error.svg"),
                        render_svg_plot(name + ": tracking error", "time (s)", "e (rad/s)", error));
  write_file_atomically(dir / (name + "_torque.svg"),
                        render_svg_plot(name + ": torque", "time (s)", "torque (N m)", torque));
}

}  // namespace

int run_command(const RunConfig& rc, std::ostream& log) {
  try {
    SimulationConfig cfg = load_config(rc.config_path);
    if (rc.seed) cfg.scenario.seed = *rc.seed;

    std::vector<ControllerMode> modes;
    if (rc.mode == "compare") {
      modes = {conventional_of(cfg.controller.mode), learning_of(cfg.controller.mode)};
    } else if (!rc.mode.empty()) {
      const auto m = parse_mode(rc.mode);
      if (!m) {
        log << "error: unknown mode '" << rc.mode << "'\n";
        return 2;
      }
      modes = {*m};
    } else {
      modes = {cfg.controller.mode};
    }

    std::vector<std::future<Rollout>> jobs;
    for (ControllerMode m : modes) {
      jobs.push_back(std::async(std::launch::async, execute, std::cref(cfg), m, rc.snapshot_every));
    }
    std::vector<Rollout> rollouts;
    for (auto& j : jobs) rollouts.push_back(j.get());

    std::filesystem::create_directories(rc.output_dir);
    const std::string& name = cfg.scenario.name;
    std::vector<MetricsEntry> entries;
    for (const Rollout& r : rollouts) {
      const std::string stem = name + "_" + mode_slug(r.trace.mode);
      std::ostringstream csv;
      write_trace_csv(csv, r.trace);
      write_file_atomically(rc.output_dir / (stem + ".csv"), csv.str());
      if (!r.trace.snapshots.empty()) {
        std::ostringstream snaps;
        write_snapshots_csv(snaps, r.trace);
        write_file_atomically(rc.output_dir / (stem + "_params.csv"), snaps.str());
      }
      entries.push_back({name, r.trace.mode, r.metrics});

      const RunDiagnostics& d = r.trace.diagnostics;
      log << stem << ": " << r.trace.rows.size() << " rows, width clamps " << d.width_clamps
          << ", integrator clamps " << d.integrator_clamps << ", energy audit residual "
          << format_number(d.energy.relative_residual()) << '\n';
    }

    std::ostringstream table, machine;
    write_metrics_table(table, entries);
    write_metrics_csv(machine, entries);
    write_file_atomically(rc.output_dir / (name + "_metrics.txt"), table.str());
    write_file_atomically(rc.output_dir / (name + "_metrics.csv"), machine.str());
    log << table.str();

    if (rc.plots) write_plots(rc.output_dir, name, rollouts);
    return 0;
  } catch (const std::exception& ex) {
    log << "error: " << ex.what() << '\n';
    return 1;
  }
}

}  // namespace rollbot
