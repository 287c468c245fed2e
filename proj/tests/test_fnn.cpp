#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "rollbot/fnn.hpp"

using namespace rollbot;

namespace {

using Params = FnnParams<double>;

Params random_params(std::mt19937_64& rng, int i, int j) {
  std::uniform_real_distribution<double> center(-2.0, 2.0);
  std::uniform_real_distribution<double> width(0.5, 2.0);
  std::uniform_real_distribution<double> conseq(-3.0, 3.0);
  Params p = Params::zeros(i, j);
  for (int k = 0; k < i; ++k) p.centers_a(k) = center(rng), p.widths_a(k) = width(rng);
  for (int k = 0; k < j; ++k) p.centers_b(k) = 3 * center(rng), p.widths_b(k) = 3 * width(rng);
  for (int a = 0; a < i; ++a)
    for (int b = 0; b < j; ++b) p.consequents(a, b) = conseq(rng);
  return p;
}

// Visits every scalar of the parameter set with its analytic partial.
template <typename F>
void for_each_entry(Params& p, const Params& grad, F&& f) {
  for (Eigen::Index k = 0; k < p.size_a(); ++k) f(p.centers_a(k), grad.centers_a(k));
  for (Eigen::Index k = 0; k < p.size_a(); ++k) f(p.widths_a(k), grad.widths_a(k));
  for (Eigen::Index k = 0; k < p.size_b(); ++k) f(p.centers_b(k), grad.centers_b(k));
  for (Eigen::Index k = 0; k < p.size_b(); ++k) f(p.widths_b(k), grad.widths_b(k));
  for (Eigen::Index a = 0; a < p.size_a(); ++a)
    for (Eigen::Index b = 0; b < p.size_b(); ++b) f(p.consequents(a, b), grad.consequents(a, b));
}

}  // namespace

TEST_CASE("gaussian membership") {
  CHECK(membership(0.3, 0.7, 0.3) == 1.0);
  CHECK(membership(0.3, 0.7, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(membership(0.0, 1.0, 1.0) == doctest::Approx(0.367879441171442).epsilon(1e-14));
  for (double d : {0.1, 0.9, 2.5}) CHECK(membership(0.0, 0.5, d) == membership(0.0, 0.5, -d));
  CHECK_THROWS_AS(membership(0.0, 0.0, 1.0), NonPositiveWidth);
  CHECK_THROWS_AS(membership(0.0, -1.0, 1.0), NonPositiveWidth);
}

TEST_CASE("initial layout") {
  const Params p = Params::initial(FnnConfig{});
  CHECK(p.centers_a(0) == -2.0);
  CHECK(p.centers_a(1) == 0.0);
  CHECK(p.centers_a(2) == 2.0);
  CHECK(p.widths_a(1) == 2.0);
  CHECK(p.centers_b(2) == 10.0);
  CHECK(p.widths_b(0) == 10.0);
  CHECK(p.consequents.isZero(0.0));
  CHECK_NOTHROW(p.validate());
  Params bad = p;
  bad.widths_b(1) = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("constant consequents pass straight through") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 50; ++k) {
    Params p = random_params(rng, 3, 4);
    p.consequents.setZero();
    CHECK(evaluate(p, 0.4, -1.0).output == 0.0);
    p.consequents.setConstant(1.75);
    CHECK(evaluate(p, 0.4, -1.0).output == doctest::Approx(1.75).epsilon(1e-14));
  }
}

TEST_CASE("two by two network against a hand expansion") {
  Params p = Params::zeros(2, 2);
  p.centers_a << -1.0, 1.0;
  p.widths_a << 1.0, 2.0;
  p.centers_b << 0.0, 3.0;
  p.widths_b << 2.0, 1.0;
  p.consequents << 1.0, 2.0, 3.0, 4.0;
  const double x1 = 0.5, x2 = 1.0;

  const double a1 = std::exp(-std::pow((x1 + 1.0) / 1.0, 2));
  const double a2 = std::exp(-std::pow((x1 - 1.0) / 2.0, 2));
  const double b1 = std::exp(-std::pow((x2 - 0.0) / 2.0, 2));
  const double b2 = std::exp(-std::pow((x2 - 3.0) / 1.0, 2));
  const double w11 = a1 * b1, w12 = a1 * b2, w21 = a2 * b1, w22 = a2 * b2;
  const double expanded = (w11 * 1 + w12 * 2 + w21 * 3 + w22 * 4) / (w11 + w12 + w21 + w22);

  const auto ev = evaluate(p, x1, x2);
  CHECK(ev.output == doctest::Approx(expanded).epsilon(1e-12));
  CHECK(ev.output == doctest::Approx(2.82122012444991256).epsilon(1e-12));  // 30-digit evaluation
  CHECK(ev.firing(0, 1) == doctest::Approx(w12).epsilon(1e-14));
  CHECK(ev.normalized(1, 0) == doctest::Approx(w21 / (w11 + w12 + w21 + w22)).epsilon(1e-12));
}

TEST_CASE("evaluation invariants on random draws") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> in1(-4.0, 4.0), in2(-20.0, 20.0);
  for (int k = 0; k < 500; ++k) {
    const Params p = random_params(rng, 3, 3);
    const double x1 = in1(rng), x2 = in2(rng);
    const auto ev = evaluate(p, x1, x2);
    CHECK(std::abs(ev.normalized.sum() - 1.0) < 1e-12);
    CHECK((ev.mu_a.array() > 0).all() == true);
    CHECK((ev.mu_a.array() <= 1).all() == true);
    CHECK((ev.mu_b.array() <= 1).all() == true);
    CHECK(ev.firing.isApprox(ev.mu_a * ev.mu_b.transpose()));
    CHECK(ev.output >= p.consequents.minCoeff() - 1e-12);
    CHECK(ev.output <= p.consequents.maxCoeff() + 1e-12);
  }
}

TEST_CASE("inputs far from every center still normalize") {
  Params p = Params::initial(FnnConfig{});
  p.consequents << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  const auto ev = evaluate(p, 60.0, -500.0);  // plain Gaussians underflow to zero here
  CHECK(ev.firing.sum() == 0.0);
  CHECK(std::abs(ev.normalized.sum() - 1.0) < 1e-12);
  CHECK(ev.output == doctest::Approx(7.0));  // nearest rule: largest c_A, smallest c_B
}

TEST_CASE("evaluation is permutation equivariant") {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 100; ++k) {
    const Params p = random_params(rng, 3, 4);
    std::vector<int> pa{0, 1, 2}, pb{0, 1, 2, 3};
    std::shuffle(pa.begin(), pa.end(), rng);
    std::shuffle(pb.begin(), pb.end(), rng);
    Params q = p;
    for (int i = 0; i < 3; ++i) {
      q.centers_a(i) = p.centers_a(pa[i]);
      q.widths_a(i) = p.widths_a(pa[i]);
      for (int j = 0; j < 4; ++j) q.consequents(i, j) = p.consequents(pa[i], pb[j]);
    }
    for (int j = 0; j < 4; ++j) {
      q.centers_b(j) = p.centers_b(pb[j]);
      q.widths_b(j) = p.widths_b(pb[j]);
    }
    CHECK(evaluate(q, 0.3, 2.0).output == doctest::Approx(evaluate(p, 0.3, 2.0).output).epsilon(1e-13));
  }
}

TEST_CASE("analytic gradients match central differences") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> in1(-2.0, 2.0), in2(-8.0, 8.0);
  const double h = 1e-6;
  for (int k = 0; k < 200; ++k) {
    Params p = random_params(rng, 3, 3);
    const double x1 = in1(rng), x2 = in2(rng);
    const auto g = output_gradients(p, x1, x2);
    CHECK(g.params.consequents.isApprox(evaluate(p, x1, x2).normalized));

    for_each_entry(p, g.params, [&](double& entry, double analytic) {
      const double saved = entry;
      entry = saved + h;
      const double up = evaluate(p, x1, x2).output;
      entry = saved - h;
      const double down = evaluate(p, x1, x2).output;
      entry = saved;
      const double fd = (up - down) / (2 * h);
      CHECK(std::abs(fd - analytic) <= 1e-5 * std::max(1.0, std::abs(analytic)));
    });
    const double fd1 = (evaluate(p, x1 + h, x2).output - evaluate(p, x1 - h, x2).output) / (2 * h);
    const double fd2 = (evaluate(p, x1, x2 + h).output - evaluate(p, x1, x2 - h).output) / (2 * h);
    CHECK(std::abs(fd1 - g.input1) <= 1e-5 * std::max(1.0, std::abs(g.input1)));
    CHECK(std::abs(fd2 - g.input2) <= 1e-5 * std::max(1.0, std::abs(g.input2)));
  }
}

TEST_CASE("center gradient vanishes at a symmetric point") {
  Params p = Params::initial(FnnConfig{});
  p.consequents << 1, 2, 1, 0, 5, 0, 1, 2, 1;  // mirror-symmetric in the first input
  const auto g = output_gradients(p, 0.0, 3.0);
  CHECK(std::abs(g.params.centers_a(1)) < 1e-14);
  const double h = 1e-6;
  Params up = p, down = p;
  up.centers_a(1) += h;
  down.centers_a(1) -= h;
  CHECK(std::abs(evaluate(up, 0.0, 3.0).output - evaluate(down, 0.0, 3.0).output) / (2 * h) < 1e-8);
}

TEST_CASE("network templates instantiate for float") {
  const FnnParams<float> p = FnnParams<float>::initial(FnnConfig{});
  const auto ev = evaluate(p, 0.5f, 1.0f);
  CHECK(std::abs(ev.normalized.sum() - 1.0f) < 1e-6f);
}
