#ifndef ROLLBOT_SCENARIO_HPP
#define ROLLBOT_SCENARIO_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rollbot/control.hpp"
#include "rollbot/fnn.hpp"
#include "rollbot/plant.hpp"
#include "rollbot/smc_learning.hpp"

namespace rollbot {

/// Constant value on (t_start, t_end]; the first segment also owns t_start.
struct Segment {
  double t_start = 0;
  double t_end = 0;
  double value = 0;
};

/// Piecewise-constant signal over contiguous segments.
class Schedule {
 public:
  Schedule() = default;
  explicit Schedule(std::vector<Segment> segments) : segments_(std::move(segments)) {}

  static Schedule constant(double value, double duration) {
    return Schedule({{0.0, duration, value}});
  }

  double at(double t) const;
  const std::vector<Segment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }

  /// Segments must be ordered, contiguous, non-overlapping and cover [0, duration].
  void validate(double duration, const std::string& name) const;

 private:
  std::vector<Segment> segments_;
};

/// 1 rad/s, then 2 rad/s after 5 s, then 1.5 rad/s after 10 s.
Schedule step_reference();
/// Damping 0.2, 0.5 and 0.8 N m s/rad on the same 5 s segments.
Schedule step_damping();

struct Scenario {
  std::string name = "scenario";
  double duration = 15.0;
  double dt = 0.001;
  Schedule reference = step_reference();
  Schedule damping = Schedule::constant(0.2, 15.0);
  std::optional<double> snr_db;  // measurement noise on theta_dot when set
  std::uint64_t seed = 1;

  std::size_t steps() const;
  void validate() const;
};

double reference_at(const Scenario& sc, double t);
double damping_at(const Scenario& sc, double t);

/// Mean power of the reference over the sampled horizon.
double reference_power(const Scenario& sc);

/// Standard deviation of additive noise giving the requested SNR against `signal_power`.
double noise_stddev(double signal_power, double snr_db);

/// Returns the noisy measurement; `sample` receives the added noise.
double add_measurement_noise(double clean, double snr_db, double signal_power, std::mt19937_64& rng,
                             double* sample = nullptr);

struct TraceRow {
  double t = 0;
  double ref = 0;
  double theta = 0;
  double alpha = 0;
  double theta_dot = 0;
  double alpha_dot = 0;
  double e = 0;
  double e_dot = 0;
  double tau_c = 0;
  double tau_n = 0;
  double tau = 0;
  double s_p = 0;
  double s_c = 0;
  double v = 0;
  double v_p = 0;
  double zeta = 0;
  double noise = 0;
  // learning diagnostics
  double sgn = 0;
  std::size_t width_clamps = 0;  // cumulative
  double rate_margin = 0;        // alpha_lr - |tau'| estimate
};

struct ParameterSnapshot {
  std::size_t row = 0;
  double t = 0;
  FnnParams<double> params;
};

struct EnergyAudit {
  double initial_energy = 0;
  double final_energy = 0;
  double work_in = 0;       // integral of tau (theta_dot + alpha_dot)
  double dissipated = 0;    // integral of zeta (theta_dot^2 + alpha_dot^2)

  /// |dE - (W - D)| relative to the energy throughput.
  double relative_residual() const;
};

struct RunDiagnostics {
  std::size_t width_clamps = 0;
  std::size_t integrator_clamps = 0;
  std::size_t bound_excursions = 0;  // learning inputs outside the declared bounds
  std::size_t rate_condition_misses = 0;  // samples with |tau'| >= alpha_lr
  EnergyAudit energy;
};

struct SimTrace {
  std::string scenario;
  ControllerMode mode = ControllerMode::pd;
  std::vector<TraceRow> rows;
  std::vector<ParameterSnapshot> snapshots;
  RunDiagnostics diagnostics;
};

struct RunOptions {
  std::size_t snapshot_every = 0;  // 0 disables parameter snapshots
};

/// Closed-loop rollout at the scenario's sample period.
///
/// Each sample: read reference and damping, measure theta_dot (with noise if
/// configured), form e and the analytic e' = -theta_ddot consistent with the
/// torque about to be applied, compute tau_c (and tau_n plus one learning
/// update in FNN modes), hold the torque over one RK4 step.
SimTrace run(const Scenario& sc, const PlantParams<double>& plant, const ControllerConfig& ctrl,
             const FnnParams<double>& fnn_initial, const LearningConfig& learning,
             const RunOptions& options = {});

SimTrace run(const Scenario& sc, const PlantParams<double>& plant, const ControllerConfig& ctrl,
             const FnnConfig& fnn, const LearningConfig& learning, const RunOptions& options = {});

struct SegmentMetrics {
  std::size_t index = 0;
  double t_start = 0;
  double t_end = 0;
  double reference = 0;
  double ss_error = 0;                 // mean |ref - theta_dot| over the last second
  std::optional<double> rise_time;     // 10% -> 90% of the step
  std::optional<double> settling_time; // since segment start, 2% of the step
  std::optional<double> overshoot;     // percent of the step
};

struct Metrics {
  std::vector<SegmentMetrics> segments;
};

inline constexpr double kSteadyWindow = 1.0;
inline constexpr double kSettlingBand = 0.02;

/// Step-response metrics for each reference segment. The step of segment k
/// runs from the previous reference (the initial velocity for k = 0) to the
/// segment's reference; bands are fractions of that step.
Metrics compute_metrics(const SimTrace& trace, const Scenario& sc);

}  // namespace rollbot

#endif  // ROLLBOT_SCENARIO_HPP
