#include "rollbot/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include <boost/math/tools/toms748_solve.hpp>

namespace rollbot {
namespace {

constexpr double kTimeSlack = 1e-9;

bool close_to(double a, double b) {
  return std::abs(a - b) <= kTimeSlack * std::max(1.0, std::abs(b));
}

/// Root of the scalar closed-loop residual. The residual is continuous and
/// runs from -inf to +inf, so a bracket is found by doubling outward from the
/// previous solution.
template <typename F>
double solve_scalar(F&& residual, double guess) {
  const double f0 = residual(guess);
  if (f0 == 0.0) return guess;

  double lo = guess;
  double hi = guess;
  double flo = f0;
  double fhi = f0;
  double reach = 1e-3 * std::max(1.0, std::abs(guess));
  bool bracketed = false;
  for (int k = 0; k < 80 && !bracketed; ++k, reach *= 2.0) {
    lo = guess - reach;
    hi = guess + reach;
    flo = residual(lo);
    fhi = residual(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo < 0) != (f0 < 0)) {
      hi = guess;
      fhi = f0;
      bracketed = true;
    } else if ((fhi < 0) != (f0 < 0)) {
      lo = guess;
      flo = f0;
      bracketed = true;
    }
  }
  if (!bracketed) throw Error("closed-loop error-rate equation has no bracketed root");

  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      residual, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (a + b);
}

}  // namespace

double Schedule::at(double t) const {
  if (segments_.empty()) throw OutOfRange("empty schedule");
  const Segment& first = segments_.front();
  if (t < first.t_start && !close_to(t, first.t_start)) {
    throw OutOfRange("time " + std::to_string(t) + " precedes the schedule");
  }
  for (const Segment& s : segments_) {
    if (t <= s.t_end || close_to(t, s.t_end)) return s.value;
  }
  throw OutOfRange("time " + std::to_string(t) + " is past the schedule");
}

void Schedule::validate(double duration, const std::string& name) const {
  if (segments_.empty()) throw ValidationError(name + ": schedule must not be empty");
  if (!close_to(segments_.front().t_start, 0.0) && segments_.front().t_start > 0.0) {
    throw ValidationError(name + ": schedule must start at t = 0");
  }
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const Segment& s = segments_[k];
    if (!std::isfinite(s.value) || !std::isfinite(s.t_start) || !std::isfinite(s.t_end)) {
      throw ValidationError(name + ": schedule entries must be finite");
    }
    if (!(s.t_end > s.t_start)) throw ValidationError(name + ": segment end must follow its start");
    if (k > 0 && !close_to(s.t_start, segments_[k - 1].t_end)) {
      throw ValidationError(name + ": segments must be contiguous without overlap");
    }
  }
  if (segments_.back().t_end < duration && !close_to(segments_.back().t_end, duration)) {
    throw ValidationError(name + ": schedule must cover the whole duration");
  }
}

Schedule step_reference() { return Schedule({{0, 5, 1.0}, {5, 10, 2.0}, {10, 15, 1.5}}); }

Schedule step_damping() { return Schedule({{0, 5, 0.2}, {5, 10, 0.5}, {10, 15, 0.8}}); }

std::size_t Scenario::steps() const {
  return static_cast<std::size_t>(std::llround(duration / dt));
}

void Scenario::validate() const {
  if (!(dt > 0)) throw ValidationError("scenario: dt > 0");
  if (!(duration >= 0) || !std::isfinite(duration)) throw ValidationError("scenario: duration >= 0");
  if (snr_db && !(*snr_db > 0)) throw ValidationError("scenario: snr_db > 0");
  reference.validate(duration, "reference");
  damping.validate(duration, "damping");
  for (const Segment& s : damping.segments()) {
    if (s.value < 0) throw ValidationError("damping: zeta >= 0");
  }
}

double reference_at(const Scenario& sc, double t) {
  if (t < 0 || (t > sc.duration && !close_to(t, sc.duration))) {
    throw OutOfRange("reference requested outside [0, duration]");
  }
  return sc.reference.at(t);
}

double damping_at(const Scenario& sc, double t) {
  if (t < 0 || (t > sc.duration && !close_to(t, sc.duration))) {
    throw OutOfRange("damping requested outside [0, duration]");
  }
  return sc.damping.at(t);
}

double reference_power(const Scenario& sc) {
  const std::size_t n = sc.steps();
  double sum = 0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double r = sc.reference.at(double(k) * sc.dt);
    sum += r * r;
  }
  return sum / double(n + 1);
}

double noise_stddev(double signal_power, double snr_db) {
  if (std::isinf(snr_db)) return 0.0;
  return std::sqrt(signal_power / std::pow(10.0, snr_db / 10.0));
}

double add_measurement_noise(double clean, double snr_db, double signal_power,
                             std::mt19937_64& rng, double* sample) {
  if (!(snr_db > 0)) throw ValidationError("noise: snr_db > 0");
  const double sd = noise_stddev(signal_power, snr_db);
  double n = 0.0;
  if (sd > 0) n = std::normal_distribution<double>(0.0, sd)(rng);
  if (sample) *sample = n;
  return clean + n;
}

double EnergyAudit::relative_residual() const {
  const double change = final_energy - initial_energy;
  const double scale = std::max({std::abs(work_in) + std::abs(dissipated), std::abs(change),
                                 std::numeric_limits<double>::min()});
  return std::abs(change - (work_in - dissipated)) / scale;
}

SimTrace run(const Scenario& sc, const PlantParams<double>& plant, const ControllerConfig& ctrl,
             const FnnConfig& fnn, const LearningConfig& learning, const RunOptions& options) {
  return run(sc, plant, ctrl, FnnParams<double>::initial(fnn), learning, options);
}

SimTrace run(const Scenario& sc, const PlantParams<double>& plant, const ControllerConfig& ctrl,
             const FnnParams<double>& fnn_initial, const LearningConfig& learning,
             const RunOptions& options) {
  sc.validate();
  plant.validate();
  ctrl.validate();
  fnn_initial.validate();
  learning.validate();

  const bool learn = uses_fnn(ctrl.mode);
  const double dt = sc.dt;
  const std::size_t n = sc.steps();

  SimTrace trace;
  trace.scenario = sc.name;
  trace.mode = ctrl.mode;
  trace.rows.reserve(n + 1);

  PlantParams<double> p = plant;
  PlantState<double> state;
  ControlState<double> cs;
  FnnParams<double> fnn = fnn_initial;
  LyapunovMonitor<double> monitor;
  std::mt19937_64 rng(sc.seed);
  const double signal_power = sc.snr_db ? reference_power(sc) : 0.0;

  double prev_e_dot = 0.0;
  double prev_tau = 0.0;
  RunDiagnostics& diag = trace.diagnostics;

  for (std::size_t k = 0; k <= n; ++k) {
    try {
      const double t = double(k) * dt;
      TraceRow row;
      row.t = t;
      row.ref = sc.reference.at(t);
      p.damping = sc.damping.at(t);
      row.zeta = p.damping;

      double measured = state.theta_dot;
      if (sc.snr_db) measured = add_measurement_noise(state.theta_dot, *sc.snr_db, signal_power, rng, &row.noise);
      const double e = row.ref - measured;

      // theta_ddot is affine in the held torque: theta_ddot = a0 + gain * tau.
      const double a0 = accelerations(p, state, 0.0).theta_ddot;
      const double gain = accelerations(p, state, 1.0).theta_ddot - a0;
      auto network = [&](double e_dot) { return learn ? evaluate(fnn, e, e_dot).output : 0.0; };
      auto residual = [&](double e_dot) {
        const double tau = conventional_output(ctrl, cs, e, e_dot, dt) - network(e_dot);
        return e_dot + a0 + gain * tau;
      };
      const double e_dot = solve_scalar(residual, prev_e_dot);

      row.e = e;
      row.e_dot = e_dot;
      row.tau_c = conventional_law(ctrl, cs, e, e_dot, dt);
      row.tau_n = network(e_dot);
      row.tau = learn ? combine(row.tau_c, row.tau_n) : row.tau_c;

      const SlidingSurfaces<double> surf = sliding_surfaces(ctrl, e, e_dot, row.tau_c);
      cs.s_p = surf.s_p;
      cs.s_c = surf.s_c;
      row.s_p = surf.s_p;
      row.s_c = surf.s_c;
      const LyapunovSample<double> lyap = monitor.observe(row.tau_c, row.s_p, dt);
      row.v = lyap.v;
      row.v_p = lyap.v_p;

      row.theta = state.theta;
      row.alpha = state.alpha;
      row.theta_dot = state.theta_dot;
      row.alpha_dot = state.alpha_dot;

      const double tau_rate = k > 0 ? std::abs(row.tau - prev_tau) / dt : 0.0;
      row.rate_margin = learning.learning_rate - tau_rate;
      if (learn && k > 0 && row.rate_margin <= 0) ++diag.rate_condition_misses;

      if (learn) {
        row.sgn = switching_value(row.tau_c, learning);
        if (k < n) {
          LearningInputs<double> in;
          in.x1 = e;
          in.x2 = e_dot;
          in.x1_dot = e_dot;
          in.x2_dot = k > 0 ? (e_dot - prev_e_dot) / dt : 0.0;
          in.tau_c = row.tau_c;
          if (!in.within(learning)) ++diag.bound_excursions;
          UpdateResult<double> upd = apply_update(fnn, parameter_rates(fnn, in, learning), dt,
                                                  learning.width_floor);
          fnn = std::move(upd.params);
          diag.width_clamps += upd.width_clamps;
        }
      }
      row.width_clamps = diag.width_clamps;

      if (learn && options.snapshot_every > 0 && k % options.snapshot_every == 0) {
        trace.snapshots.push_back({k, t, fnn});
      }

      if (k == 0) diag.energy.initial_energy = total_energy(p, state);
      if (k < n) {
        const PlantState<double> next = step(p, state, row.tau, dt);
        diag.energy.work_in +=
            0.5 * dt * (input_power(state, row.tau) + input_power(next, row.tau));
        diag.energy.dissipated += 0.5 * dt * (dissipation_power(p, state) + dissipation_power(p, next));
        state = next;
      } else {
        diag.energy.final_energy = total_energy(p, state);
      }

      prev_e_dot = e_dot;
      prev_tau = row.tau;
      trace.rows.push_back(row);
    } catch (const SimulationError&) {
      throw;
    } catch (const std::exception& ex) {
      throw SimulationError(k, ex.what());
    }
  }
  diag.integrator_clamps = cs.integrator_clamps;
  return trace;
}

Metrics compute_metrics(const SimTrace& trace, const Scenario& sc) {
  if (trace.rows.size() != sc.steps() + 1) {
    throw ValidationError("metrics: trace does not cover the scenario");
  }
  Metrics m;
  const auto& segs = sc.reference.segments();
  double previous = trace.rows.front().theta_dot;

  for (std::size_t s = 0; s < segs.size(); ++s) {
    const Segment& seg = segs[s];
    const double t_end = std::min(seg.t_end, sc.duration);
    if (t_end - seg.t_start < kSteadyWindow && !close_to(t_end - seg.t_start, kSteadyWindow)) {
      throw SegmentTooShort("segment " + std::to_string(s) + " is shorter than the steady window");
    }

    SegmentMetrics out;
    out.index = s;
    out.t_start = seg.t_start;
    out.t_end = t_end;
    out.reference = seg.value;

    std::vector<const TraceRow*> window;
    for (const TraceRow& r : trace.rows) {
      const bool after_start = s == 0 ? (r.t >= seg.t_start || close_to(r.t, seg.t_start))
                                      : (r.t > seg.t_start && !close_to(r.t, seg.t_start));
      const bool before_end = r.t <= t_end || close_to(r.t, t_end);
      if (after_start && before_end) window.push_back(&r);
    }
    if (window.empty()) throw SegmentTooShort("segment " + std::to_string(s) + " has no samples");

    double err_sum = 0;
    std::size_t err_n = 0;
    for (const TraceRow* r : window) {
      if (r->t >= t_end - kSteadyWindow || close_to(r->t, t_end - kSteadyWindow)) {
        err_sum += std::abs(seg.value - r->theta_dot);
        ++err_n;
      }
    }
    if (err_n == 0) throw SegmentTooShort("segment " + std::to_string(s) + " has no steady window");
    out.ss_error = err_sum / double(err_n);

    const double step = seg.value - previous;
    const double dir = step >= 0 ? 1.0 : -1.0;
    const double mag = std::abs(step);
    const double band = kSettlingBand * (mag > 0 ? mag : std::abs(seg.value));

    if (mag > 0) {
      std::optional<double> t10, t90;
      double peak = 0;
      for (const TraceRow* r : window) {
        const double progress = (r->theta_dot - previous) * dir;
        if (!t10 && progress >= 0.1 * mag) t10 = r->t;
        if (!t90 && progress >= 0.9 * mag) t90 = r->t;
        peak = std::max(peak, (r->theta_dot - seg.value) * dir);
      }
      if (t10 && t90) out.rise_time = *t90 - *t10;
      out.overshoot = 100.0 * peak / mag;
    }

    // Settled from the sample after the last band exit, if the segment ends inside the band.
    std::optional<std::size_t> last_out;
    for (std::size_t i = 0; i < window.size(); ++i) {
      if (std::abs(window[i]->theta_dot - seg.value) > band) last_out = i;
    }
    if (!last_out) {
      out.settling_time = 0.0;
    } else if (*last_out + 1 < window.size()) {
      out.settling_time = window[*last_out + 1]->t - seg.t_start;
    }

    m.segments.push_back(out);
    previous = seg.value;
  }
  return m;
}

}  // namespace rollbot
