#ifndef ROLLBOT_FNN_HPP
#define ROLLBOT_FNN_HPP

// Zeroth-order TSK fuzzy neural network with two inputs.
//
// Rule R_ij fires with w_ij = mu_Ai(x1) * mu_Bj(x2) for Gaussian memberships
// mu(x) = exp(-((x - c) / sigma)^2) and contributes the constant consequent
// f_ij. The output is the normalized weighted sum  sum_ij wbar_ij f_ij.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Core>

#include "rollbot/errors.hpp"

namespace rollbot {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Rule-grid shape and the input ranges used to lay out the initial memberships.
struct FnnConfig {
  int num_mf_input1 = 3;
  int num_mf_input2 = 3;
  double range_input1 = 2.0;   // error, rad/s
  double range_input2 = 10.0;  // error rate, rad/s^2

  void validate() const {
    if (num_mf_input1 < 1) throw ValidationError("fnn: num_mf_input1 >= 1");
    if (num_mf_input2 < 1) throw ValidationError("fnn: num_mf_input2 >= 1");
    if (!(range_input1 > 0)) throw ValidationError("fnn: range_input1 > 0");
    if (!(range_input2 > 0)) throw ValidationError("fnn: range_input2 > 0");
  }
};

/// The complete tunable parameter set. The same shape doubles as a
/// parameter-space vector for gradients and adaptation rates.
template <typename Scalar>
struct FnnParams {
  VectorX<Scalar> centers_a;  // length I
  VectorX<Scalar> widths_a;   // length I
  VectorX<Scalar> centers_b;  // length J
  VectorX<Scalar> widths_b;   // length J
  MatrixX<Scalar> consequents;  // I x J

  Eigen::Index size_a() const { return centers_a.size(); }
  Eigen::Index size_b() const { return centers_b.size(); }

  /// Same shape, all entries zero.
  static FnnParams zeros(Eigen::Index i, Eigen::Index j) {
    return {VectorX<Scalar>::Zero(i), VectorX<Scalar>::Zero(i), VectorX<Scalar>::Zero(j),
            VectorX<Scalar>::Zero(j), MatrixX<Scalar>::Zero(i, j)};
  }

  FnnParams zeros_like() const { return zeros(size_a(), size_b()); }

  /// Centers spread evenly over [-range, range], widths equal to the center
  /// spacing, consequents zero so the network starts neutral.
  static FnnParams initial(const FnnConfig& cfg) {
    cfg.validate();
    auto lay_out = [](int n, double range, VectorX<Scalar>& centers, VectorX<Scalar>& widths) {
      centers.resize(n);
      widths.resize(n);
      if (n == 1) {
        centers(0) = Scalar(0);
        widths(0) = Scalar(range);
        return;
      }
      const double spacing = 2.0 * range / (n - 1);
      for (int k = 0; k < n; ++k) {
        centers(k) = Scalar(-range + spacing * k);
        widths(k) = Scalar(spacing);
      }
    };
    FnnParams p;
    lay_out(cfg.num_mf_input1, cfg.range_input1, p.centers_a, p.widths_a);
    lay_out(cfg.num_mf_input2, cfg.range_input2, p.centers_b, p.widths_b);
    p.consequents = MatrixX<Scalar>::Zero(cfg.num_mf_input1, cfg.num_mf_input2);
    return p;
  }

  void validate() const {
    if (size_a() < 1 || size_b() < 1) throw ValidationError("fnn: I >= 1 and J >= 1");
    if (widths_a.size() != size_a() || widths_b.size() != size_b() ||
        consequents.rows() != size_a() || consequents.cols() != size_b()) {
      throw ValidationError("fnn: parameter shapes must agree (I x J consequent grid)");
    }
    if (!((widths_a.array() > Scalar(0)).all() && (widths_b.array() > Scalar(0)).all())) {
      throw ValidationError("fnn: sigma > 0 for every membership width");
    }
    if (!(centers_a.allFinite() && widths_a.allFinite() && centers_b.allFinite() &&
          widths_b.allFinite() && consequents.allFinite())) {
      throw ValidationError("fnn: all parameters finite");
    }
  }

  FnnParams& operator+=(const FnnParams& o) {
    centers_a += o.centers_a;
    widths_a += o.widths_a;
    centers_b += o.centers_b;
    widths_b += o.widths_b;
    consequents += o.consequents;
    return *this;
  }

  friend FnnParams operator*(Scalar k, const FnnParams& p) {
    return {k * p.centers_a, k * p.widths_a, k * p.centers_b, k * p.widths_b, k * p.consequents};
  }

  friend FnnParams operator+(FnnParams a, const FnnParams& b) { return a += b; }
};

template <typename Scalar>
struct FnnEvaluation {
  VectorX<Scalar> mu_a;        // layer 1, input 1
  VectorX<Scalar> mu_b;        // layer 1, input 2
  MatrixX<Scalar> firing;      // layer 2, w_ij
  MatrixX<Scalar> normalized;  // layer 3, wbar_ij
  Scalar output{0};            // layer 5, tau_n
};

/// Partial derivatives of the network output.
template <typename Scalar>
struct FnnGradient {
  FnnParams<Scalar> params;
  Scalar input1{0};
  Scalar input2{0};
};

/// Gaussian membership degree exp(-((x - c) / sigma)^2).
template <typename Scalar>
Scalar membership(Scalar center, Scalar width, Scalar x) {
  using std::exp;
  if (!(width > Scalar(0))) throw NonPositiveWidth("membership width must be positive");
  const Scalar n = (x - center) / width;
  return exp(-n * n);
}

namespace detail {

/// Squared normalized distances N^2 = ((x - c) / sigma)^2 per membership.
template <typename Scalar>
VectorX<Scalar> squared_distances(const VectorX<Scalar>& centers, const VectorX<Scalar>& widths,
                                  Scalar x) {
  if (!(widths.array() > Scalar(0)).all()) {
    throw NonPositiveWidth("membership width must be positive");
  }
  return ((VectorX<Scalar>::Constant(centers.size(), x) - centers).array() / widths.array())
      .square()
      .matrix();
}

/// Normalized firing strengths computed in the log domain: the largest
/// exponent is shifted to zero before exponentiating, so far-from-center
/// inputs never underflow the normalization.
template <typename Scalar>
MatrixX<Scalar> normalized_firing(const VectorX<Scalar>& dist_a, const VectorX<Scalar>& dist_b) {
  using std::isfinite;
  const MatrixX<Scalar> exponent =
      -(dist_a.replicate(1, dist_b.size()) + dist_b.transpose().replicate(dist_a.size(), 1));
  const Scalar top = exponent.maxCoeff();
  if (!isfinite(top)) throw DegenerateFiring("no rule has a finite firing exponent");
  MatrixX<Scalar> w = (exponent.array() - top).exp().matrix();
  w /= w.sum();
  return w;
}

}  // namespace detail

template <typename Scalar>
FnnEvaluation<Scalar> evaluate(const FnnParams<Scalar>& p, Scalar x1, Scalar x2) {
  const VectorX<Scalar> da = detail::squared_distances(p.centers_a, p.widths_a, x1);
  const VectorX<Scalar> db = detail::squared_distances(p.centers_b, p.widths_b, x2);

  FnnEvaluation<Scalar> ev;
  ev.mu_a = (-da.array()).exp().matrix();
  ev.mu_b = (-db.array()).exp().matrix();
  ev.firing = ev.mu_a * ev.mu_b.transpose();
  ev.normalized = detail::normalized_firing(da, db);
  ev.output = ev.normalized.cwiseProduct(p.consequents).sum();
  return ev;
}

/// Analytic partials of tau_n with respect to every parameter and both inputs.
///
/// With g_kl = d log w_kl / d theta, the output derivative is
///   d tau_n / d theta = sum_kl wbar_kl g_kl (f_kl - tau_n).
template <typename Scalar>
FnnGradient<Scalar> output_gradients(const FnnParams<Scalar>& p, Scalar x1, Scalar x2) {
  const FnnEvaluation<Scalar> ev = evaluate(p, x1, x2);
  const MatrixX<Scalar> weighted_residual =
      ev.normalized.cwiseProduct((p.consequents.array() - ev.output).matrix());
  const VectorX<Scalar> row = weighted_residual.rowwise().sum();  // per membership of input 1
  const VectorX<Scalar> col = weighted_residual.colwise().sum().transpose();

  const VectorX<Scalar> na = (VectorX<Scalar>::Constant(p.size_a(), x1) - p.centers_a)
                                 .cwiseQuotient(p.widths_a);
  const VectorX<Scalar> nb = (VectorX<Scalar>::Constant(p.size_b(), x2) - p.centers_b)
                                 .cwiseQuotient(p.widths_b);

  FnnGradient<Scalar> g;
  g.params.centers_a = (Scalar(2) * na.cwiseQuotient(p.widths_a)).cwiseProduct(row);
  g.params.widths_a = (Scalar(2) * na.cwiseAbs2().cwiseQuotient(p.widths_a)).cwiseProduct(row);
  g.params.centers_b = (Scalar(2) * nb.cwiseQuotient(p.widths_b)).cwiseProduct(col);
  g.params.widths_b = (Scalar(2) * nb.cwiseAbs2().cwiseQuotient(p.widths_b)).cwiseProduct(col);
  g.params.consequents = ev.normalized;
  g.input1 = -g.params.centers_a.sum();
  g.input2 = -g.params.centers_b.sum();
  return g;
}

}  // namespace rollbot

#endif  // ROLLBOT_FNN_HPP
