#ifndef ROLLBOT_SMC_LEARNING_HPP
#define ROLLBOT_SMC_LEARNING_HPP

// Sliding-mode online learning for the fuzzy network.
//
// The conventional controller output tau_c is the learning sliding surface.
// With s_A = x1 - c_A, s_B = x2 - c_B and k = alpha_lr * sgn(tau_c):
//
//   c_A'    = x1' + s_A k
//   c_B'    = x2' + s_B k
//   sigma_A' = -(sigma_A + sigma_A^3 / D_A) k
//   sigma_B' = -(sigma_B + sigma_B^3 / D_B) k
//   f'      = -(wbar / wbar^T wbar) k
//
// D is s^T s over the whole membership vector (shared) or s_i^2 for each
// membership (per_membership). Only the per-membership form makes
// N_i N_i' = k hold for every i; the shared form gives N_i N_i' = k s_i^2 / s^T s.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>

#include "rollbot/errors.hpp"
#include "rollbot/fnn.hpp"

namespace rollbot {

enum class SignMode { hard, smoothed };
enum class WidthNormalization { shared, per_membership };

struct LearningConfig {
  double learning_rate = 40.0;
  double smoothing = 0.05;   // delta of the smoothed sign
  double guard = 1e-12;      // added to the shared s^T s and wbar^T wbar denominators
  double width_floor = 1e-3;
  SignMode sign_mode = SignMode::smoothed;
  WidthNormalization width_normalization = WidthNormalization::shared;
  // Declared input/torque bounds; diagnostics only.
  double bound_x = 50.0;
  double bound_x_dot = 1e4;
  double bound_tau_dot = 20.0;

  void validate() const {
    if (!(learning_rate >= 0)) throw ValidationError("learning: learning_rate >= 0");
    if (!(smoothing > 0)) throw ValidationError("learning: smoothing > 0");
    if (!(guard > 0)) throw ValidationError("learning: guard > 0");
    if (!(width_floor > 0)) throw ValidationError("learning: width_floor > 0");
    if (!(bound_x > 0 && bound_x_dot > 0 && bound_tau_dot > 0)) {
      throw ValidationError("learning: declared bounds > 0");
    }
  }
};

template <typename Scalar>
struct LearningInputs {
  Scalar x1{0};      // e
  Scalar x2{0};      // e_dot
  Scalar x1_dot{0};
  Scalar x2_dot{0};
  Scalar tau_c{0};   // conventional controller output

  bool within(const LearningConfig& cfg) const {
    using std::abs;
    return abs(x1) <= cfg.bound_x && abs(x2) <= cfg.bound_x && abs(x1_dot) <= cfg.bound_x_dot &&
           abs(x2_dot) <= cfg.bound_x_dot;
  }
};

/// tau_c / (|tau_c| + delta), a continuous stand-in for sgn(tau_c).
template <typename Scalar>
Scalar smoothed_sign(Scalar tau_c, Scalar delta) {
  using std::abs;
  return tau_c / (abs(tau_c) + delta);
}

template <typename Scalar>
Scalar hard_sign(Scalar v) {
  return Scalar((v > Scalar(0)) - (v < Scalar(0)));
}

template <typename Scalar>
Scalar switching_value(Scalar tau_c, const LearningConfig& cfg) {
  return cfg.sign_mode == SignMode::hard ? hard_sign(tau_c)
                                         : smoothed_sign(tau_c, Scalar(cfg.smoothing));
}

/// Time derivatives of every network parameter under the learning law.
template <typename Scalar>
FnnParams<Scalar> parameter_rates(const FnnParams<Scalar>& p, const LearningInputs<Scalar>& in,
                                  const LearningConfig& cfg) {
  const Scalar gain = Scalar(cfg.learning_rate) * switching_value(in.tau_c, cfg);
  const Scalar guard = Scalar(cfg.guard);

  const VectorX<Scalar> s_a = VectorX<Scalar>::Constant(p.size_a(), in.x1) - p.centers_a;
  const VectorX<Scalar> s_b = VectorX<Scalar>::Constant(p.size_b(), in.x2) - p.centers_b;

  auto width_rate = [&](const VectorX<Scalar>& sigma, const VectorX<Scalar>& s) {
    if (!(sigma.array() > Scalar(0)).all()) {
      throw NonPositiveWidth("learning: membership width must be positive");
    }
    VectorX<Scalar> denom;
    if (cfg.width_normalization == WidthNormalization::shared) {
      const Scalar sts = s.squaredNorm();
      if (sts < guard) throw DegenerateDistance("every membership center coincides with the input");
      denom = VectorX<Scalar>::Constant(s.size(), sts + guard);
    } else {
      if (s.cwiseAbs2().minCoeff() < guard) {
        throw DegenerateDistance("a membership center coincides with the input");
      }
      denom = s.cwiseAbs2();
    }
    return (-(sigma + sigma.cwiseAbs2().cwiseProduct(sigma).cwiseQuotient(denom)) * gain).eval();
  };

  const FnnEvaluation<Scalar> ev = evaluate(p, in.x1, in.x2);
  const Scalar wtw = ev.normalized.squaredNorm() + guard;

  FnnParams<Scalar> r;
  r.centers_a = (VectorX<Scalar>::Constant(p.size_a(), in.x1_dot) + s_a * gain).eval();
  r.centers_b = (VectorX<Scalar>::Constant(p.size_b(), in.x2_dot) + s_b * gain).eval();
  r.widths_a = width_rate(p.widths_a, s_a);
  r.widths_b = width_rate(p.widths_b, s_b);
  r.consequents = -(ev.normalized / wtw) * gain;
  return r;
}

template <typename Scalar>
struct UpdateResult {
  FnnParams<Scalar> params;
  std::size_t width_clamps = 0;
};

/// Explicit Euler step p + rates * dt; widths are clamped to width_floor and
/// every clamp is counted.
template <typename Scalar>
UpdateResult<Scalar> apply_update(const FnnParams<Scalar>& p, const FnnParams<Scalar>& rates,
                                  Scalar dt, Scalar width_floor) {
  if (!(dt > Scalar(0))) throw ValidationError("learning update: dt > 0");
  UpdateResult<Scalar> out{p + dt * rates, 0};
  auto clamp = [&](VectorX<Scalar>& w) {
    for (Eigen::Index k = 0; k < w.size(); ++k) {
      if (w(k) < width_floor) {
        w(k) = width_floor;
        ++out.width_clamps;
      }
    }
  };
  clamp(out.params.widths_a);
  clamp(out.params.widths_b);
  return out;
}

template <typename Scalar>
struct ConvergenceReport {
  std::optional<Scalar> reach_time;  // first time |tau_c| <= band
  Scalar bound{0};                   // |tau_c(0)| / (alpha_lr - B)
  bool within_bound = false;
  double decreasing_fraction = 1.0;  // of pre-reach samples where |tau_c| shrank
};

/// Checks that a sampled tau_c trace reaches the band no later than the
/// Lyapunov bound. Throws ConditionViolated when alpha_lr <= B.
template <typename Scalar>
ConvergenceReport<Scalar> finite_time_convergence_check(std::span<const Scalar> tau_c, Scalar dt,
                                                        Scalar learning_rate,
                                                        Scalar bound_tau_dot, Scalar band) {
  using std::abs;
  if (!(learning_rate > bound_tau_dot)) {
    throw ConditionViolated("learning rate must exceed the torque-derivative bound");
  }
  ConvergenceReport<Scalar> rep;
  if (tau_c.empty()) return rep;
  rep.bound = abs(tau_c[0]) / (learning_rate - bound_tau_dot);

  std::size_t decreasing = 0;
  std::size_t steps = 0;
  for (std::size_t k = 0; k < tau_c.size(); ++k) {
    if (abs(tau_c[k]) <= band) {
      rep.reach_time = Scalar(k) * dt;
      break;
    }
    if (k + 1 < tau_c.size()) {
      ++steps;
      if (abs(tau_c[k + 1]) < abs(tau_c[k])) ++decreasing;
    }
  }
  if (steps > 0) rep.decreasing_fraction = double(decreasing) / double(steps);
  // One sample of slack for the discrete reach instant.
  rep.within_bound = rep.reach_time && *rep.reach_time <= rep.bound + dt;
  return rep;
}

template <typename Scalar>
struct LyapunovSample {
  Scalar v{0};      // 0.5 tau_c^2
  Scalar v_p{0};    // 0.5 S_p^2
  Scalar v_dot{0};  // backward difference; zero on the first sample
  Scalar v_p_dot{0};
  bool sliding = false;  // tau_c * tau_c' < 0
};

/// Sampled Lyapunov values of the learning surface and the tracking surface.
template <typename Scalar>
class LyapunovMonitor {
 public:
  LyapunovSample<Scalar> observe(Scalar tau_c, Scalar s_p, Scalar dt) {
    LyapunovSample<Scalar> s;
    s.v = Scalar(0.5) * tau_c * tau_c;
    s.v_p = Scalar(0.5) * s_p * s_p;
    if (last_) {
      s.v_dot = (s.v - last_->v) / dt;
      s.v_p_dot = (s.v_p - last_->v_p) / dt;
      s.sliding = tau_c * (tau_c - last_tau_c_) < Scalar(0);
    }
    last_ = s;
    last_tau_c_ = tau_c;
    return s;
  }

  void reset() { last_.reset(); }

 private:
  std::optional<LyapunovSample<Scalar>> last_;
  Scalar last_tau_c_{0};
};

}  // namespace rollbot

#endif  // ROLLBOT_SMC_LEARNING_HPP
