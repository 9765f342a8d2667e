#include <cmath>
#include <numbers>

#include "doctest.h"
#include "furstlab/error.hpp"
#include "furstlab/fourier.hpp"
#include "oracles.hpp"

using namespace furstlab;
using namespace furstlab::fourier;

namespace {

AtomicMeasure point_mass() { return AtomicMeasure(2, {{0.0, 0.0}}, {1.0}); }

AtomicMeasure random_measure(oracle::Gen& g, std::size_t n) {
  std::vector<Point> atoms;
  std::vector<double> w;
  for (std::size_t i = 0; i < n; ++i) {
    atoms.push_back({g.uniform(-1, 1), g.uniform(-1, 1)});
    w.push_back(g.uniform(0.1, 1.0) / static_cast<double>(n));
  }
  return AtomicMeasure(2, atoms, w);
}

double riesz_brute(const AtomicMeasure& mu, double t, double delta) {
  double e = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < mu.size(); ++j) {
      const double d = std::hypot(mu.atoms()[i][0] - mu.atoms()[j][0], mu.atoms()[i][1] - mu.atoms()[j][1]);
      e += mu.weights()[i] * mu.weights()[j] * std::pow(std::max(d, delta), -t);
    }
  return e;
}

}  // namespace

TEST_SUITE("fourier") {

TEST_CASE("transform examples") {
  CHECK(std::abs(fourier_transform(point_mass(), {3.7, -1.2})) == doctest::Approx(1.0));
  const AtomicMeasure shifted(2, {{0.25, 0.0}}, {1.0});
  const auto v = fourier_transform(shifted, {1.0, 0.0});
  // exp(-2 pi i / 4) = -i
  CHECK(v.real() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(v.imag() == doctest::Approx(-1.0));
  const AtomicMeasure pair(2, {{0.5, 0.0}, {-0.5, 0.0}}, {0.5, 0.5});
  CHECK(fourier_transform(pair, {1.0, 0.0}).real() == doctest::Approx(-1.0));
  CHECK(fourier_transform(pair, {0.5, 7.0}).real() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("property: transform bounds and conjugate symmetry") {
  oracle::Gen g(11);
  for (int trial = 0; trial < 30; ++trial) {
    const auto mu = random_measure(g, static_cast<std::size_t>(g.integer(1, 40)));
    CHECK(fourier_transform(mu, {0, 0}).real() == doctest::Approx(mu.total_mass()));
    const Point xi{g.uniform(-20, 20), g.uniform(-20, 20)};
    const auto a = fourier_transform(mu, xi);
    const auto b = fourier_transform(mu, {-xi[0], -xi[1]});
    CHECK(std::abs(a - std::conj(b)) < 1e-12);
    CHECK(std::abs(a) <= mu.total_mass() + 1e-12);
  }
}

TEST_CASE("lp norm of a point mass counts lattice points") {
  for (double R : {4.0, 8.0, 16.0})
    for (double h : {0.125, 0.0625}) {
      const double area = std::numbers::pi * R * R;
      const double v = lp_norm_ball(point_mass(), 8.0, R, h);
      CHECK(v >= area * (1 - 3 * h / R));
      CHECK(v <= area * (1 + 3 * h / R));
    }
  CHECK_THROWS_AS(lp_norm_ball(point_mass(), 8.0, 4.0, 0.25), Error);
  CHECK_THROWS_AS(lp_norm_ball(point_mass(), 0.5, 4.0), Error);
  CHECK_THROWS_AS(lp_norm_ball(point_mass(), 2.0, 0.5), Error);
}

TEST_CASE("lp norms for several radii match single evaluations") {
  oracle::Gen g(3);
  const auto mu = random_measure(g, 12);
  const std::vector<double> R{1, 2, 4, 8};
  const auto many = lp_norm_balls(mu, 4.0, R);
  for (std::size_t k = 0; k < R.size(); ++k) CHECK(many[k] == doctest::Approx(lp_norm_ball(mu, 4.0, R[k])).epsilon(1e-10));
  for (std::size_t k = 1; k < R.size(); ++k) CHECK(many[k] >= many[k - 1]);
}

TEST_CASE("riesz energy examples") {
  const double delta = 1.0 / 64;
  CHECK(riesz_energy(point_mass(), 1.0, delta) == doctest::Approx(64.0));
  CHECK(riesz_energy(point_mass(), 0.5, delta) == doctest::Approx(8.0));
  // half atoms at distance 1, delta = 1/2: diagonal 2 * 1/4 * 2 plus off-diagonal 2 * 1/4 * 1
  const AtomicMeasure two(2, {{0, 0}, {1, 0}}, {0.5, 0.5});
  CHECK(riesz_energy(two, 1.0, 1.0 / 2) == doctest::Approx(1.5));
  // half masses at distance 1/2 with delta = 1/4: 2 * 1/4 * 4 + 2 * 1/4 * 2 = 3
  CHECK(riesz_energy(AtomicMeasure(2, {{0, 0}, {0.5, 0}}, {0.5, 0.5}), 1.0, 1.0 / 4) == doctest::Approx(3.0));
  oracle::Gen g(5);
  const auto mu = random_measure(g, 20);
  CHECK(riesz_energy(mu, 0.0, delta) == doctest::Approx(mu.total_mass() * mu.total_mass()));
}

TEST_CASE("property: riesz energy matches a double loop and is monotone") {
  oracle::Gen g(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto mu = random_measure(g, static_cast<std::size_t>(g.integer(1, 60)));
    const double t = g.uniform(0, 2);
    const double delta = std::exp2(-g.integer(2, 10));
    const double e = riesz_energy(mu, t, delta);
    CHECK(std::abs(e - riesz_brute(mu, t, delta)) <= 1e-12 * std::max(1.0, e));
    CHECK(riesz_energy(mu, t, delta / 2) >= e - 1e-15);
  }
}

TEST_CASE("gamma exponent") {
  CHECK(gamma(0.5, 1.0) == doctest::Approx(1.25));
  CHECK(gamma(1.0, 2.0) == doctest::Approx(2.0));
  CHECK(gamma(0.2, 0.1) == doctest::Approx(0.3));
  CHECK(gamma(0.5, 3.0) == doctest::Approx(1.5));
}

TEST_CASE("lift measure") {
  const family::Evaluator g = [](double x) { return x * x; };
  const auto m = lift_measure(g, {-1.0, 0.0, 0.5}, {0.25, 0.25, 0.5}, 0.5, 4);
  REQUIRE(m.measure.size() == 3);
  CHECK(m.measure.atoms()[2][1] == doctest::Approx(0.25));
  CHECK(m.measure.total_mass() == doctest::Approx(1.0));
  CHECK(m.frostman_C > 0);
  CHECK_THROWS_AS(lift_measure(g, {1.5}, {1.0}, 0.5, 4), Error);
  CHECK_THROWS_AS(lift_measure(g, {0.0, 0.1}, {0.75, 0.75}, 0.5, 4), Error);

  const auto u = uniform_parabola_lift(257, 1.0, 6);
  CHECK(u.measure.size() == 257);
  CHECK(u.measure.total_mass() == doctest::Approx(1.0));
  // mass 1/257 per atom on a curve of length about 3: linear growth, s = 1
  CHECK(u.frostman_C <= 4.0);
}

TEST_CASE("decay slopes") {
  const std::vector<double> R{4, 8, 16, 32};
  const auto pt = decay_slope(point_mass(), 8.0, R);
  CHECK(pt.slope == doctest::Approx(2.0).epsilon(0.025));
  CHECK(std::isnan(pt.slope_cum[0]));
  CHECK(pt.slope_cum.back() == doctest::Approx(pt.slope));

  const auto par = decay_slope(uniform_parabola_lift(513, 1.0, 6).measure, 8.0, R);
  CHECK(par.slope <= 0.3);
  CHECK_THROWS_AS(decay_slope(point_mass(), 8.0, {4, 8}), Error);
}

TEST_CASE("least squares slope") {
  CHECK(least_squares_slope({0, 1, 2}, {1, 3, 5}) == doctest::Approx(2.0));
  CHECK(least_squares_slope({0, 1, 2, 3}, {0, 1, 1, 2}) == doctest::Approx(0.6));
}

}  // TEST_SUITE
