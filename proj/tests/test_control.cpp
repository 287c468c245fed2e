#include <doctest.h>

#include <cmath>
#include <random>

#include "rollbot/control.hpp"

using namespace rollbot;

TEST_CASE("mode names round-trip") {
  for (ControllerMode m : {ControllerMode::pd, ControllerMode::pid, ControllerMode::pd_fnn,
                           ControllerMode::pid_fnn}) {
    CHECK(parse_mode(to_string(m)) == m);
  }
  CHECK(parse_mode("PD+FNN") == ControllerMode::pd_fnn);
  CHECK_FALSE(parse_mode("pd"));
  CHECK(conventional_of(ControllerMode::pid_fnn) == ControllerMode::pid);
  CHECK(learning_of(ControllerMode::pd) == ControllerMode::pd_fnn);
  CHECK(uses_fnn(ControllerMode::pd_fnn));
  CHECK_FALSE(uses_integral(ControllerMode::pd_fnn));
}

TEST_CASE("controller validation") {
  ControllerConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.lambda() == doctest::Approx(20.0));
  c.kd = 0.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = ControllerConfig{};
  c.kp = -1.0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("PD law") {
  const ControllerConfig c;
  CHECK(pd_law(c, 0.0, 0.0) == 0.0);
  CHECK(pd_law(c, 1.0, 0.0) == 1.0);
  CHECK(pd_law(c, 0.0, 2.0) == doctest::Approx(0.1));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int k = 0; k < 100; ++k) {
    const double e = u(rng), ed = u(rng), a = u(rng);
    CHECK(pd_law(c, a * e, a * ed) == doctest::Approx(a * pd_law(c, e, ed)).epsilon(1e-13));
  }
}

TEST_CASE("PID law") {
  ControllerConfig c;
  c.mode = ControllerMode::pid;

  SUBCASE("no integral gain reduces to PD") {
    c.pi_beta = 0.0;
    ControlState<double> st;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int k = 0; k < 100; ++k) {
      const double e = u(rng), ed = u(rng);
      CHECK(pid_law(c, st, e, ed, 0.001) == pd_law(c, e, ed));
    }
  }

  SUBCASE("constant PD output ramps from 1 to 3 over one second") {
    ControlState<double> st;
    const double first = pid_law(c, st, 1.0, 0.0, 0.001);
    CHECK(first == doctest::Approx(1.0).epsilon(0.01));
    double last = first;
    for (int k = 1; k < 1000; ++k) {
      const double out = pid_law(c, st, 1.0, 0.0, 0.001);
      CHECK(out > last);
      last = out;
    }
    CHECK(last == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(st.integral == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("zero error history gives zero") {
    ControlState<double> st;
    for (int k = 0; k < 10; ++k) CHECK(pid_law(c, st, 0.0, 0.0, 0.001) == 0.0);
  }

  SUBCASE("the integrator saturates silently and counts") {
    c.integrator_limit = 0.0105;
    ControlState<double> st;
    for (int k = 0; k < 100; ++k) pid_law(c, st, 1.0, 0.0, 0.001);
    CHECK(st.integral == 0.0105);
    CHECK(st.integrator_clamps == 90);
  }

  SUBCASE("the preview output has no side effects") {
    ControlState<double> st;
    pid_law(c, st, 1.0, 0.0, 0.001);
    const ControlState<double> before = st;
    const double preview = conventional_output(c, st, 0.5, 1.0, 0.001);
    CHECK(st.integral == before.integral);
    CHECK(conventional_law(c, st, 0.5, 1.0, 0.001) == preview);
  }
  ControlState<double> fresh;
  CHECK_THROWS_AS(pid_law(c, fresh, 1.0, 0.0, 0.0), ValidationError);
}

TEST_CASE("torque combination") {
  CHECK(combine(1.2, 0.9) == doctest::Approx(0.3));
  CHECK(combine(0.7, 0.0) == 0.7);
  CHECK(combine(0.7, 0.7) == 0.0);
}

TEST_CASE("sliding surfaces") {
  const ControllerConfig c;
  const auto zero = sliding_surfaces(c, 0.0, 0.0, 0.0);
  CHECK(zero.s_p == 0.0);
  CHECK(zero.s_c == 0.0);
  const auto s = sliding_surfaces(c, 0.1, 0.0, pd_law(c, 0.1, 0.0));
  CHECK(s.s_p == doctest::Approx(2.0));
  CHECK(s.s_c == doctest::Approx(0.1));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int k = 0; k < 1000; ++k) {
    const double e = u(rng), ed = u(rng);
    const auto r = sliding_surfaces(c, e, ed, pd_law(c, e, ed));
    CHECK(std::abs(r.s_c - c.kd * r.s_p) < 1e-12);
  }
}
