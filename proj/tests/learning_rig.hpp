#ifndef ROLLBOT_TESTS_LEARNING_RIG_HPP
#define ROLLBOT_TESTS_LEARNING_RIG_HPP

// Open-loop rig for the learning law: the applied torque tau(t) is an external
// signal with bounded derivative, the network adapts, and tau_c = tau + tau_n
// is the surface the law should drive to zero.

#include <cmath>
#include <functional>
#include <vector>

#include "rollbot/fnn.hpp"
#include "rollbot/smc_learning.hpp"

namespace rollbot::testing {

struct RigTrace {
  std::vector<double> t;
  std::vector<double> tau_c;
};

struct RigOptions {
  double duration = 2.0;
  double dt = 1e-3;
  double learning_rate = 5.0;
  std::function<double(double)> tau = [](double t) { return 2.0 + std::sin(t); };
  LearningConfig learning = [] {
    LearningConfig c;
    c.sign_mode = SignMode::hard;
    c.width_normalization = WidthNormalization::per_membership;
    return c;
  }();
};

inline RigTrace run_learning_rig(const RigOptions& opt) {
  LearningConfig cfg = opt.learning;
  cfg.learning_rate = opt.learning_rate;
  FnnParams<double> p = FnnParams<double>::initial(FnnConfig{});
  // Smooth inputs about five widths from every initial center. While
  // sgn(tau_c) < 0 the law lowers each N_i^2 at rate 2 alpha and the widths
  // escape to infinity once it reaches zero, so the inputs must start far out.
  auto x1 = [](double t) { return 12.0 + 0.3 * std::sin(3 * t); };
  auto x1_dot = [](double t) { return 0.9 * std::cos(3 * t); };
  auto x2 = [](double t) { return 60.0 + std::cos(2 * t); };
  auto x2_dot = [](double t) { return -2.0 * std::sin(2 * t); };

  RigTrace out;
  const auto n = static_cast<std::size_t>(std::llround(opt.duration / opt.dt));
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = double(k) * opt.dt;
    const double tau_c = opt.tau(t) + evaluate(p, x1(t), x2(t)).output;
    out.t.push_back(t);
    out.tau_c.push_back(tau_c);
    const LearningInputs<double> in{x1(t), x2(t), x1_dot(t), x2_dot(t), tau_c};
    p = apply_update(p, parameter_rates(p, in, cfg), opt.dt, cfg.width_floor).params;
  }
  return out;
}

}  // namespace rollbot::testing

#endif  // ROLLBOT_TESTS_LEARNING_RIG_HPP
