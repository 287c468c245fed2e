#ifndef ROLLBOT_CONFIG_HPP
#define ROLLBOT_CONFIG_HPP

// Key/value configuration files.
//
//   # comment
//   [plant]        sphere_mass, pendulum_mass, sphere_radius, pendulum_offset,
//                  gravity, sphere_inertia, pendulum_inertia, damping
//   [controller]   kp, kd, pi_alpha, pi_beta, integrator_limit, mode
//   [fnn]          num_mf_input1, num_mf_input2, range_input1, range_input2,
//                  centers_a, widths_a, centers_b, widths_b, consequents
//   [learning]     learning_rate, smoothing, guard, width_floor, sign_mode,
//                  width_normalization, bound_x, bound_x_dot, bound_tau_dot
//   [scenario]     name, duration, dt, reference, damping, snr_db, seed, mode
//
// Lists are comma separated (consequents row-major, I rows of J). Schedules
// are semicolon-separated "t0:t1:value" triples. Omitted keys keep their
// defaults; an omitted damping schedule holds [plant] damping constant.

#include <filesystem>
#include <string_view>

#include "rollbot/control.hpp"
#include "rollbot/fnn.hpp"
#include "rollbot/plant.hpp"
#include "rollbot/scenario.hpp"
#include "rollbot/smc_learning.hpp"

namespace rollbot {

struct SimulationConfig {
  Scenario scenario;
  PlantParams<double> plant;
  ControllerConfig controller;
  FnnConfig fnn;
  FnnParams<double> fnn_initial;
  LearningConfig learning;
};

/// Throws ParseError (with line and column) on grammar violations and
/// ValidationError on invariant violations.
SimulationConfig parse_config(std::string_view text);

SimulationConfig load_config(const std::filesystem::path& path);

}  // namespace rollbot

#endif  // ROLLBOT_CONFIG_HPP
