#include <cmath>
#include <limits>

#include "doctest.h"
#include "furstlab/error.hpp"
#include "furstlab/family.hpp"
#include "oracles.hpp"

using namespace furstlab;
using namespace furstlab::family;

namespace {

CurveFunction poly2(Interval I, double c2, double c1, double c0) {
  return CurveFunction(
      I, [=](double x) { return c2 * x * x + c1 * x + c0; }, [=](double x) { return 2 * c2 * x + c1; },
      [=](double) { return 2 * c2; });
}

CurveFunction constant(Interval I, double c) { return CurveFunction::affine(I, 0.0, c); }

std::vector<Center> random_centers(oracle::Gen& g, std::size_t n, double x0) {
  std::vector<Center> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({x0 + g.uniform(-1, 1), g.uniform(-1, 1)});
  return out;
}

}  // namespace

TEST_SUITE("family") {

TEST_CASE("c2_norm of simple curves") {
  CHECK(c2_norm(CurveFunction::affine({0, 1}, 1, 0)) == doctest::Approx(2.0));
  CHECK(c2_norm(poly2({-1, 1}, 1, 0, 0)) == doctest::Approx(5.0));
  CHECK(c2_norm(constant({0, 1}, 0.0)) == 0.0);
  // exact for affine curves with only two grid points
  CHECK(c2_norm(CurveFunction::affine({0, 1}, -3, 1), 2) == doctest::Approx(5.0));
}

TEST_CASE("c2_norm is a lower bound of the dense-grid value") {
  oracle::Gen g(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto f = poly2({-1, 2}, g.uniform(-2, 2), g.uniform(-2, 2), g.uniform(-2, 2));
    const double coarse = c2_norm(f, 33);
    const double fine = oracle::c2_norm_dense(f);
    CHECK(coarse <= fine + 1e-12);
    CHECK(c2_norm(f) == doctest::Approx(fine).epsilon(1e-3));
  }
}

TEST_CASE("non-finite evaluator output is an evaluation error naming x") {
  CurveFunction bad({0, 1}, [](double x) { return x > 0.5 ? std::numeric_limits<double>::infinity() : 0.0; },
                    [](double) { return 0.0; }, [](double) { return 0.0; });
  try {
    c2_norm(bad, 5);
    FAIL("expected an evaluation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Evaluation);
    CHECK(std::string(e.what()).find("0.75") != std::string::npos);
  }
}

TEST_CASE("transversality_defect examples") {
  const Interval I{0, 1};
  CHECK(transversality_defect(constant(I, 0), constant(I, 1)) == doctest::Approx(1.0));
  const auto f = CurveFunction::affine(I, 1, 0);
  const auto h = constant(I, 0.5);
  CHECK(transversality_defect(f, h) == doctest::Approx(2.0 / 3.0));
  CHECK(oracle::defect_dense(f, h) == doctest::Approx(2.0 / 3.0));
  for (double c : {-2.0, 0.01, 3.0})
    CHECK(transversality_defect(poly2({-1, 1}, 1, 0, 0), poly2({-1, 1}, 1, 0, c)) == doctest::Approx(1.0));
}

TEST_CASE("identical curves are rejected") {
  const auto f = poly2({0, 1}, 1, 0, 0);
  CHECK_THROWS_AS(transversality_defect(f, f), Error);
  try {
    TransversalFamily F({f, CurveFunction::affine({0, 1}, 1, 0), f});
    FAIL("expected duplicate error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IdenticalCurves);
    CHECK(std::string(e.what()).find("0") != std::string::npos);
  }
}

TEST_CASE("transversality constant of the small affine family") {
  std::vector<CurveFunction> curves;
  for (double a : {-1.0, 0.0, 1.0})
    for (double b : {-0.5, 0.0, 0.5}) curves.push_back(CurveFunction::affine({0, 1}, a, b));
  const TransversalFamily F(curves);
  // frozen from the dense-grid oracle; differences are affine and vanish at
  // grid points, so both grids see the same minima
  double oracle_T = 1.0;
  for (std::size_t i = 0; i < curves.size(); ++i)
    for (std::size_t j = i + 1; j < curves.size(); ++j)
      oracle_T = std::max(oracle_T, 1.0 / oracle::defect_dense(curves[i], curves[j]));
  CHECK(oracle_T == doctest::Approx(2.0));
  CHECK(F.t_const() == doctest::Approx(2.0));
  CHECK(F.t_const() <= 4.0);
  CHECK(F.exhaustive());
}

TEST_CASE("single-slope family has constant 1") {
  std::vector<CurveFunction> curves;
  for (int k = 0; k <= 16; ++k) curves.push_back(CurveFunction::affine({0, 1}, 1.0, k / 16.0));
  CHECK(TransversalFamily(curves).t_const() == doctest::Approx(1.0));
}

TEST_CASE("two parabola translates: constant stable under translation") {
  const auto g = ConvexSeed::parabola(1.0);
  const auto F0 = convex_translate_family(g, {{0, 0}, {0.5, 0}}, 0.0);
  const auto F1 = convex_translate_family(g, {{10, 0.7}, {10.5, 0.7}}, 10.0);
  // x^2 - (x - 1/2)^2 = x - 1/4 on [-5, 5]: defect 1 / (5.25 + 1); the grid misses x = 1/4
  CHECK(F0.family.t_const() <= 6.25 + 1e-9);
  CHECK(F0.family.t_const() == doctest::Approx(6.25).epsilon(2e-3));
  CHECK(F1.family.t_const() == doctest::Approx(F0.family.t_const()).epsilon(1e-9));
  CHECK(F0.comparability_lower == doctest::Approx(12.5));
  CHECK(F0.comparability_upper == doctest::Approx(12.5));
}

TEST_CASE("vertical parabola translates have defect 1") {
  const auto F = convex_translate_family(ConvexSeed::parabola(1.0), {{0, 0}, {0, 1}}, 0.0);
  CHECK(F.family.t_const() == doctest::Approx(1.0));
}

TEST_CASE("exponential translates: constant independent of x0") {
  oracle::Gen g(5);
  const auto seed = ConvexSeed::exponential();
  auto c0 = random_centers(g, 64, 0.0);
  std::vector<Center> c10;
  for (auto c : c0) c10.push_back({c.a + 10.0, c.b});
  const double t0 = convex_translate_family(seed, c0, 0.0, 513).family.t_const();
  const double t10 = convex_translate_family(seed, c10, 10.0, 513).family.t_const();
  CHECK(t10 == doctest::Approx(t0).epsilon(0.05));
}

TEST_CASE("translation centers outside the band are rejected") {
  try {
    convex_translate(ConvexSeed::parabola(), {1.5, 0}, 0.0);
    FAIL("expected domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}

TEST_CASE("curve invariants: affine derivatives are exact, convex translates keep g''") {
  const auto f = CurveFunction::affine({-2, 2}, 0.37, -1.0);
  const auto seed = ConvexSeed::cosh();
  const auto h = convex_translate(seed, {0.3, -0.2}, 0.0);
  for (int k = 0; k <= 100; ++k) {
    const double x = -2 + 4.0 * k / 100;
    CHECK(f.d1(x) == 0.37);
    CHECK(f.d2(x) == 0.0);
    CHECK(h.d2(5.0 * x / 2.0) >= seed.frak_g() * (1 - 1e-9));
  }
  CHECK(seed.frak_G() >= seed.frak_g());
}

TEST_CASE("tabulated curves are flagged and second-order accurate") {
  std::vector<double> samples;
  const int n = 201;
  for (int k = 0; k < n; ++k) {
    const double x = static_cast<double>(k) / (n - 1);
    samples.push_back(std::sin(x));
  }
  const auto f = CurveFunction::tabulated({0, 1}, samples);
  CHECK(f.approximate());
  const double h = 1.0 / (n - 1);
  for (double x : {0.25, 0.5, 0.75}) CHECK(std::abs(f.d1(x) - std::cos(x)) <= 2 * h * h);
}

TEST_CASE("property: min defect times t_const is at least 1") {
  oracle::Gen g(21);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<CurveFunction> curves;
    for (int i = 0; i < 12; ++i) curves.push_back(CurveFunction::affine({-1, 1}, g.uniform(-1, 1), g.uniform(-1, 1)));
    const TransversalFamily F(curves, 257);
    CHECK(F.estimate().min_defect * F.t_const() >= 1.0 - 1e-12);
    CHECK(F.t_const() >= 1.0);
  }
}

TEST_CASE("declared-constant families certify and reject") {
  std::vector<CurveFunction> curves;
  for (int i = 0; i < 200; ++i)
    curves.push_back(convex_translate(ConvexSeed::parabola(0.5), {(i % 20) / 20.0 - 0.5, (i / 20) / 10.0}, 0.0));
  const auto ok = TransversalFamily::with_declared_constant(curves, 11.0, 257);
  CHECK_FALSE(ok.exhaustive());
  CHECK(ok.t_const() == 11.0);
  CHECK_THROWS_AS(TransversalFamily::with_declared_constant(curves, 1.0, 257), Error);
}

TEST_CASE("rescale_ball") {
  const auto seed = ConvexSeed::parabola(1.0);
  oracle::Gen g(3);
  const auto F = convex_translate_family(seed, random_centers(g, 10, 0.0), 0.0, 1025).family;
  const auto zero = constant(F.interval(), 0.0);

  SUBCASE("r0 = 1 and f0 = 0 is the identity") {
    const auto G = rescale_ball(F, zero, 1.0);
    for (std::size_t i = 0; i < F.size(); ++i)
      for (double x : {-4.0, 0.0, 3.5}) CHECK(G[i].value(x) == doctest::Approx(F[i].value(x)).epsilon(1e-15));
  }
  SUBCASE("distances scale and defects are preserved") {
    const double r0 = 0.25;
    const auto G = rescale_ball(F, F[0], r0);
    for (std::size_t i = 0; i < F.size(); ++i)
      for (std::size_t j = i + 1; j < F.size(); ++j) {
        const double d = c2_distance(F[i], F[j], F.grid_n());
        CHECK(c2_distance(G[i], G[j], G.grid_n()) == doctest::Approx(d / r0).epsilon(1e-12));
        CHECK(transversality_defect(G[i], G[j], G.grid_n()) ==
              doctest::Approx(transversality_defect(F[i], F[j], F.grid_n())).epsilon(1e-9));
      }
    CHECK(G.t_const() == doctest::Approx(F.t_const()).epsilon(0.01));
  }
}

TEST_CASE("rescale_window") {
  oracle::Gen g(4);
  const auto seed = ConvexSeed::parabola(1.0);
  const auto F = convex_translate_family(seed, random_centers(g, 8, 0.0), 0.0, 1025).family;

  SUBCASE("unit window is the identity") {
    const auto W = rescale_window(F, 0, 0, 1, F.interval());
    for (std::size_t i = 0; i < F.size(); ++i) CHECK(W.family[i].value(1.25) == doctest::Approx(F[i].value(1.25)));
    CHECK(W.within_bound);
  }
  SUBCASE("affine curves keep their slopes") {
    std::vector<CurveFunction> lines;
    for (int i = 0; i < 5; ++i) lines.push_back(CurveFunction::affine({-2, 2}, g.uniform(-1, 1), g.uniform(-1, 1)));
    const auto W = rescale_window(TransversalFamily(lines, 513), 0.5, 0.3, 0.125, {0, 1});
    for (std::size_t i = 0; i < lines.size(); ++i) CHECK(W.family[i].d1(0.5) == doctest::Approx(lines[i].d1(0.0)));
  }
  SUBCASE("small window on parabola translates stays within the bound") {
    const auto W = rescale_window(F, 0.1, 0.0, 1.0 / 16, {0, 1});
    CHECK(W.within_bound);
    CHECK(W.t_out <= W.t_in + 1 + 10.0 / F.grid_n() * (W.t_in + 1));
  }
  SUBCASE("windows leaving the interval are domain errors") {
    CHECK_THROWS_AS(rescale_window(F, 4.9, 0, 1, {0, 1}), Error);
  }
}

TEST_CASE("intersection_components examples") {
  const Interval I{0, 1};
  CHECK(intersection_components(constant(I, 0), constant(I, 1), 0.1).components.empty());

  const auto f = poly2({-1, 1}, 1, 0, 0), h = poly2({-1, 1}, 1, -2, 1);  // (x-1)^2
  const auto rep = intersection_components(f, h, 0.01);
  REQUIRE(rep.components.size() == 1);
  CHECK(rep.components[0].lo == doctest::Approx(0.49).epsilon(1e-6));
  CHECK(rep.components[0].hi == doctest::Approx(0.51).epsilon(1e-6));

  const auto full = intersection_components(constant(I, 0), constant(I, 0.01), 0.01);
  REQUIRE(full.components.size() == 1);
  CHECK(full.components[0].lo == 0.0);
  CHECK(full.components[0].hi == 1.0);
}

TEST_CASE("intersection_components flags under-resolved components") {
  const auto f = poly2({-1, 1}, 1, 0, 0), h = poly2({-1, 1}, 1, -2, 1);
  CHECK(intersection_components(f, h, 1e-6, 65).resolution_warning);
  CHECK_FALSE(intersection_components(f, h, 0.01).resolution_warning);
}

TEST_CASE("property: components of parabola-translate pairs obey the count and length bounds") {
  oracle::Gen g(8);
  const auto seed = ConvexSeed::parabola(1.0);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto cs = random_centers(g, 2, 0.0);
    const auto F = convex_translate_family(seed, cs, 0.0).family;
    const double T = F.t_const();
    const double d = c2_distance(F[0], F[1]);
    const double r = d / (4 * T) * g.uniform(0.05, 1.0);
    const auto rep = intersection_components(F[0], F[1], r);
    CHECK(rep.components.size() <= static_cast<std::size_t>(std::ceil(5 * T)));
    CHECK(rep.max_length() <= 16 * r * T / d * (1 + 10.0 / F.grid_n()));
    ++checked;
  }
  CHECK(checked == 40);
}

}  // TEST_SUITE
