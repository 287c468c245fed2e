#ifndef ROLLBOT_CONTROL_HPP
#define ROLLBOT_CONTROL_HPP

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "rollbot/errors.hpp"

namespace rollbot {

enum class ControllerMode { pd, pid, pd_fnn, pid_fnn };

inline std::string_view to_string(ControllerMode m) {
  switch (m) {
    case ControllerMode::pd: return "PD";
    case ControllerMode::pid: return "PID";
    case ControllerMode::pd_fnn: return "PD+FNN";
    case ControllerMode::pid_fnn: return "PID+FNN";
  }
  return "?";
}

inline std::optional<ControllerMode> parse_mode(std::string_view s) {
  if (s == "PD") return ControllerMode::pd;
  if (s == "PID") return ControllerMode::pid;
  if (s == "PD+FNN") return ControllerMode::pd_fnn;
  if (s == "PID+FNN") return ControllerMode::pid_fnn;
  return std::nullopt;
}

inline bool uses_fnn(ControllerMode m) {
  return m == ControllerMode::pd_fnn || m == ControllerMode::pid_fnn;
}

inline bool uses_integral(ControllerMode m) {
  return m == ControllerMode::pid || m == ControllerMode::pid_fnn;
}

/// The conventional counterpart of a mode (PD+FNN -> PD).
inline ControllerMode conventional_of(ControllerMode m) {
  return uses_integral(m) ? ControllerMode::pid : ControllerMode::pd;
}

inline ControllerMode learning_of(ControllerMode m) {
  return uses_integral(m) ? ControllerMode::pid_fnn : ControllerMode::pd_fnn;
}

struct ControllerConfig {
  double kp = 1.0;
  double kd = 0.05;
  double pi_alpha = 1.0;  // proportional weight of the PI block
  double pi_beta = 2.0;   // integral weight of the PI block, 1/s
  double integrator_limit = 50.0;  // anti-windup saturation, N m s
  ControllerMode mode = ControllerMode::pd_fnn;

  double lambda() const { return kp / kd; }

  void validate() const {
    if (!(kp > 0)) throw ValidationError("controller: kp > 0");
    if (!(kd > 0)) throw ValidationError("controller: kd > 0");
    if (!(pi_alpha > 0)) throw ValidationError("controller: pi_alpha > 0");
    if (!(pi_beta >= 0)) throw ValidationError("controller: pi_beta >= 0");
    if (!(integrator_limit > 0)) throw ValidationError("controller: integrator_limit > 0");
  }
};

template <typename Scalar>
struct ControlState {
  Scalar integral{0};        // PI accumulator of the PD output
  Scalar previous_error{0};
  Scalar s_p{0};
  Scalar s_c{0};
  std::size_t integrator_clamps = 0;
};

template <typename Scalar>
Scalar pd_law(const ControllerConfig& cfg, Scalar e, Scalar e_dot) {
  return Scalar(cfg.kp) * e + Scalar(cfg.kd) * e_dot;
}

/// Integrator value after one more sample, saturated at +-integrator_limit.
template <typename Scalar>
Scalar advanced_integral(const ControllerConfig& cfg, Scalar integral, Scalar u_pd, Scalar dt) {
  const Scalar lim = Scalar(cfg.integrator_limit);
  return std::clamp(integral + u_pd * dt, -lim, lim);
}

/// PI block acting on the PD output:
///   u = kp e + kd e',  I += u dt,  tau_c = pi_alpha u + pi_beta I.
/// Does not modify the state; see pid_law.
template <typename Scalar>
Scalar pid_output(const ControllerConfig& cfg, const ControlState<Scalar>& st, Scalar e,
                  Scalar e_dot, Scalar dt) {
  const Scalar u = pd_law(cfg, e, e_dot);
  return Scalar(cfg.pi_alpha) * u + Scalar(cfg.pi_beta) * advanced_integral(cfg, st.integral, u, dt);
}

template <typename Scalar>
Scalar pid_law(const ControllerConfig& cfg, ControlState<Scalar>& st, Scalar e, Scalar e_dot,
               Scalar dt) {
  if (!(dt > Scalar(0))) throw ValidationError("pid: dt > 0");
  const Scalar u = pd_law(cfg, e, e_dot);
  const Scalar raw = st.integral + u * dt;
  st.integral = advanced_integral(cfg, st.integral, u, dt);
  if (st.integral != raw) ++st.integrator_clamps;
  st.previous_error = e;
  return Scalar(cfg.pi_alpha) * u + Scalar(cfg.pi_beta) * st.integral;
}

/// Conventional output for the configured mode, without side effects.
template <typename Scalar>
Scalar conventional_output(const ControllerConfig& cfg, const ControlState<Scalar>& st, Scalar e,
                           Scalar e_dot, Scalar dt) {
  return uses_integral(cfg.mode) ? pid_output(cfg, st, e, e_dot, dt) : pd_law(cfg, e, e_dot);
}

/// Conventional output for the configured mode, committing the integrator.
template <typename Scalar>
Scalar conventional_law(const ControllerConfig& cfg, ControlState<Scalar>& st, Scalar e,
                        Scalar e_dot, Scalar dt) {
  if (uses_integral(cfg.mode)) return pid_law(cfg, st, e, e_dot, dt);
  st.previous_error = e;
  return pd_law(cfg, e, e_dot);
}

/// Applied torque: the network output is subtracted from the conventional one.
template <typename Scalar>
Scalar combine(Scalar tau_c, Scalar tau_n) {
  return tau_c - tau_n;
}

template <typename Scalar>
struct SlidingSurfaces {
  Scalar s_p{0};  // e' + lambda e
  Scalar s_c{0};  // tau_c
};

/// With lambda = kp / kd the PD output satisfies S_c = kd S_p.
template <typename Scalar>
SlidingSurfaces<Scalar> sliding_surfaces(const ControllerConfig& cfg, Scalar e, Scalar e_dot,
                                         Scalar tau_c) {
  if (!(cfg.kd > 0)) throw ValidationError("sliding surfaces: kd > 0");
  return {e_dot + Scalar(cfg.lambda()) * e, tau_c};
}

}  // namespace rollbot

#endif  // ROLLBOT_CONTROL_HPP
