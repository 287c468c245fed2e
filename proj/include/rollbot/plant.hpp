#ifndef ROLLBOT_PLANT_HPP
#define ROLLBOT_PLANT_HPP

// Planar rolling dynamics of a sphere driven by an internal pendulum.
//
// Generalized coordinates are the sphere rolling angle theta and the pendulum
// angle alpha. The same motor torque acts on both coordinates (the shaft
// reaction), viscous friction acts on both rates with coefficient zeta.
//
//   M(phi) [theta_ddot, alpha_ddot]^T + C + G = [tau, tau]^T,   phi = alpha - theta

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "rollbot/errors.hpp"

namespace rollbot {

template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vector4 = Eigen::Matrix<Scalar, 4, 1>;

/// Physical constants. Defaults are the reference robot: a 3 kg shell of
/// radius 0.2 m (thin-shell inertia 2/3 M R^2) and a 2 kg point-mass pendulum
/// 0.075 m below the center.
template <typename Scalar>
struct PlantParams {
  Scalar sphere_mass{3};
  Scalar pendulum_mass{2};
  Scalar sphere_radius{0.2};
  Scalar pendulum_offset{0.075};
  Scalar gravity{9.81};
  Scalar sphere_inertia{0.08};
  Scalar pendulum_inertia{0};
  Scalar damping{0.2};

  /// Throws ValidationError naming the first violated invariant.
  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) throw ValidationError(std::string("plant: ") + what);
    };
    require(sphere_mass > Scalar(0), "sphere_mass > 0");
    require(pendulum_mass > Scalar(0), "pendulum_mass > 0");
    require(sphere_radius > Scalar(0), "sphere_radius > 0");
    require(pendulum_offset > Scalar(0) && pendulum_offset < sphere_radius,
            "0 < pendulum_offset < sphere_radius");
    require(gravity > Scalar(0), "gravity > 0");
    require(sphere_inertia >= Scalar(0), "sphere_inertia >= 0");
    require(pendulum_inertia >= Scalar(0), "pendulum_inertia >= 0");
    require(damping >= Scalar(0), "damping >= 0");
  }
};

template <typename Scalar>
struct PlantState {
  Scalar theta{0};
  Scalar alpha{0};
  Scalar theta_dot{0};
  Scalar alpha_dot{0};
  Scalar time{0};

  Scalar relative_angle() const { return alpha - theta; }
  Scalar relative_rate() const { return alpha_dot - theta_dot; }
};

template <typename Scalar>
struct PlantDerivatives {
  Scalar theta_ddot{0};
  Scalar alpha_ddot{0};
};

/// |det M| below this is reported as SingularMassMatrix.
inline constexpr double kSingularDeterminant = 1e-12;

template <typename Scalar>
Matrix2<Scalar> mass_matrix(const PlantParams<Scalar>& p, const PlantState<Scalar>& s) {
  using std::cos;
  const Scalar c = cos(s.relative_angle());
  const Scalar mp = p.pendulum_mass;
  const Scalar R = p.sphere_radius;
  const Scalar l = p.pendulum_offset;
  const Scalar coupling = mp * R * l * c;
  const Scalar pend = mp * l * l + p.pendulum_inertia;

  Matrix2<Scalar> m;
  m(0, 0) = p.sphere_mass * R * R + mp * R * R + pend + p.sphere_inertia + Scalar(2) * coupling;
  m(0, 1) = -pend - coupling;
  m(1, 0) = m(0, 1);
  m(1, 1) = pend;
  return m;
}

/// Velocity-product terms plus viscous friction, [C11, C21].
template <typename Scalar>
Vector2<Scalar> coriolis_and_damping(const PlantParams<Scalar>& p, const PlantState<Scalar>& s) {
  using std::sin;
  const Scalar rel = s.relative_rate();
  Vector2<Scalar> c;
  c(0) = p.pendulum_mass * p.sphere_radius * p.pendulum_offset * sin(s.relative_angle()) * rel * rel +
         p.damping * s.theta_dot;
  c(1) = p.damping * s.alpha_dot;
  return c;
}

template <typename Scalar>
Vector2<Scalar> gravity_vector(const PlantParams<Scalar>& p, const PlantState<Scalar>& s) {
  using std::sin;
  const Scalar g = p.pendulum_mass * p.gravity * p.pendulum_offset * sin(s.relative_angle());
  return Vector2<Scalar>(-g, g);
}

/// Solves M q_ddot = [tau, tau] - C - G with the closed-form 2x2 inverse.
template <typename Scalar>
PlantDerivatives<Scalar> accelerations(const PlantParams<Scalar>& p, const PlantState<Scalar>& s,
                                       Scalar torque) {
  using std::abs;
  const Matrix2<Scalar> m = mass_matrix(p, s);
  const Vector2<Scalar> rhs =
      Vector2<Scalar>::Constant(torque) - coriolis_and_damping(p, s) - gravity_vector(p, s);
  const Scalar det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (!(abs(det) >= Scalar(kSingularDeterminant))) {
    throw SingularMassMatrix("mass matrix determinant below tolerance");
  }
  return {(m(1, 1) * rhs(0) - m(0, 1) * rhs(1)) / det,
          (m(0, 0) * rhs(1) - m(1, 0) * rhs(0)) / det};
}

namespace detail {

template <typename Scalar>
Vector4<Scalar> pack(const PlantState<Scalar>& s) {
  return Vector4<Scalar>(s.theta, s.alpha, s.theta_dot, s.alpha_dot);
}

template <typename Scalar>
PlantState<Scalar> unpack(const Vector4<Scalar>& x, Scalar time) {
  return {x(0), x(1), x(2), x(3), time};
}

template <typename Scalar>
Vector4<Scalar> flow(const PlantParams<Scalar>& p, const Vector4<Scalar>& x, Scalar torque) {
  const PlantDerivatives<Scalar> a = accelerations(p, unpack(x, Scalar(0)), torque);
  return Vector4<Scalar>(x(2), x(3), a.theta_ddot, a.alpha_ddot);
}

}  // namespace detail

/// One classical RK4 step with the torque held constant over the step.
template <typename Scalar>
PlantState<Scalar> step(const PlantParams<Scalar>& p, const PlantState<Scalar>& s, Scalar torque,
                        Scalar dt) {
  if (!(dt > Scalar(0))) throw ValidationError("plant step: dt > 0");
  const Vector4<Scalar> x = detail::pack(s);
  const Scalar half = dt / Scalar(2);
  const Vector4<Scalar> k1 = detail::flow(p, x, torque);
  const Vector4<Scalar> k2 = detail::flow<Scalar>(p, x + half * k1, torque);
  const Vector4<Scalar> k3 = detail::flow<Scalar>(p, x + half * k2, torque);
  const Vector4<Scalar> k4 = detail::flow<Scalar>(p, x + dt * k3, torque);
  const Vector4<Scalar> next = x + (dt / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
  return detail::unpack(next, s.time + dt);
}

template <typename Scalar>
Scalar kinetic_energy(const PlantParams<Scalar>& p, const PlantState<Scalar>& s) {
  const Vector2<Scalar> qd(s.theta_dot, s.alpha_dot);
  return Scalar(0.5) * qd.dot(mass_matrix(p, s) * qd);
}

/// Zero level is the pendulum horizontal (phi = pi/2); the hanging
/// equilibrium sits at -m_p g l.
template <typename Scalar>
Scalar potential_energy(const PlantParams<Scalar>& p, const PlantState<Scalar>& s) {
  using std::cos;
  return -p.pendulum_mass * p.gravity * p.pendulum_offset * cos(s.relative_angle());
}

template <typename Scalar>
Scalar total_energy(const PlantParams<Scalar>& p, const PlantState<Scalar>& s) {
  return kinetic_energy(p, s) + potential_energy(p, s);
}

/// Power lost to viscous friction, zeta (theta_dot^2 + alpha_dot^2).
template <typename Scalar>
Scalar dissipation_power(const PlantParams<Scalar>& p, const PlantState<Scalar>& s) {
  return p.damping * (s.theta_dot * s.theta_dot + s.alpha_dot * s.alpha_dot);
}

/// Power delivered by the motor: the torque acts on both generalized rates.
template <typename Scalar>
Scalar input_power(const PlantState<Scalar>& s, Scalar torque) {
  return torque * (s.theta_dot + s.alpha_dot);
}

}  // namespace rollbot

#endif  // ROLLBOT_PLANT_HPP
