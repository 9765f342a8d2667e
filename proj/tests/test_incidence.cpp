#include <cmath>
#include <set>

#include "doctest.h"
#include "furstlab/error.hpp"
#include "furstlab/incidence.hpp"
#include "oracles.hpp"

using namespace furstlab;
using namespace furstlab::incidence;
using family::CurveFunction;

namespace {

std::vector<Cell> row(int level, std::int64_t iy) {
  std::vector<Cell> out;
  for (std::int64_t ix = 0; ix < (std::int64_t{1} << level); ++ix) out.push_back({level, ix, iy});
  return out;
}

TransversalFamily random_lines(oracle::Gen& g, std::size_t n, int grid_n = 65) {
  std::vector<CurveFunction> curves;
  for (std::size_t i = 0; i < n; ++i) curves.push_back(CurveFunction::affine({0, 1}, g.uniform(-1, 1), g.uniform(0, 1)));
  return TransversalFamily(curves, grid_n);
}

TransversalFamily translates(double lo, double hi, double step, family::Interval I = {0, 1}) {
  std::vector<CurveFunction> curves;
  const int n = static_cast<int>(std::llround((hi - lo) / step));
  for (int k = 0; k <= n; ++k) curves.push_back(CurveFunction::affine(I, 0.0, lo + k * step));
  return TransversalFamily(curves, 65);
}

}  // namespace

TEST_SUITE("incidence") {

TEST_CASE("incidence examples on the zero curve") {
  const TransversalFamily F({CurveFunction::affine({0, 1}, 0, 0)});
  CHECK(incidences(F, row(3, 0), 2.0).count == 8);
  CHECK(incidences(F, row(3, 1), 2.0).count == 8);
  // lambda delta = 3/16 equals the centre height: strict inequality excludes it
  CHECK(incidences(F, row(3, 1), 1.5).count == 0);
  CHECK(incidences_brute(F, row(3, 1), 1.5) == 0);
}

TEST_CASE("incidence pairs are reported in order and match the count") {
  oracle::Gen g(40);
  const auto F = random_lines(g, 10);
  const auto P = oracle::random_squares(g, 5, 300);
  const auto res = incidences(F, P, 3.0);
  CHECK(res.pairs.size() == res.count);
  for (std::size_t k = 1; k < res.pairs.size(); ++k) {
    const auto& a = res.pairs[k - 1];
    const auto& b = res.pairs[k];
    CHECK((a.curve < b.curve || (a.curve == b.curve && P[a.square] < P[b.square])));
  }
  for (const auto& pr : res.pairs) CHECK(in_neighbourhood(F[pr.curve], P[pr.square], 3.0 / 32));
}

TEST_CASE("64 random lines against the full 2^-6 grid") {
  oracle::Gen g(41);
  const auto F = random_lines(g, 64);
  const auto P = oracle::all_squares(6);
  const auto fast = incidences(F, P, 2.0, false).count;
  CHECK(fast == incidences_brute(F, P, 2.0));
  CHECK(fast == oracle::incidences(F.curves(), P, 2.0));
}

TEST_CASE("property: fast incidence equals brute force and is monotone in lambda") {
  oracle::Gen g(42);
  for (int trial = 0; trial < 60; ++trial) {
    const int level = static_cast<int>(g.integer(3, 8));
    const auto F = random_lines(g, static_cast<std::size_t>(g.integer(1, 40)));
    const auto P = oracle::random_squares(g, level, static_cast<std::size_t>(g.integer(1, 1500)));
    std::uint64_t prev = 0;
    for (double lambda : {1.0, 2.0, 3.5, 7.0}) {
      if (lambda * std::exp2(-level) > 0.5) break;
      const auto c = incidences(F, P, lambda, false).count;
      CHECK(c == oracle::incidences(F.curves(), P, lambda));
      CHECK(c >= prev);
      prev = c;
    }
  }
}

TEST_CASE("squares must share one level and lambda delta must stay below 1/2") {
  oracle::Gen g(43);
  const auto F = random_lines(g, 3);
  CHECK_THROWS_AS(incidences(F, {{3, 0, 0}, {4, 0, 0}}, 2.0), Error);
  CHECK_THROWS_AS(incidences(F, row(2, 0), 3.0), Error);
}

TEST_CASE("weighted incidences") {
  oracle::Gen g(44);
  const auto F = random_lines(g, 20);
  const auto P = oracle::random_squares(g, 6, 800);
  const double plain = static_cast<double>(incidences(F, P, 2.0, false).count);
  std::vector<double> wF(F.size(), 1.0), wP(P.size(), 1.0);
  CHECK(weighted_incidences(F, P, wF, wP, 2.0) == plain);
  std::fill(wF.begin(), wF.end(), 2.0);
  CHECK(weighted_incidences(F, P, wF, wP, 2.0) == 2 * plain);
  const double C = 3.0, delta = 1.0 / 64;
  for (auto& w : wF) w = std::pow(delta, g.uniform(-C, C));
  for (auto& w : wP) w = std::pow(delta, g.uniform(-C, C));
  double brute = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i)
    for (std::size_t k = 0; k < P.size(); ++k)
      if (oracle::incidences({F[i]}, {P[k]}, 2.0)) brute += wF[i] * wP[k];
  CHECK(weighted_incidences(F, P, wF, wP, 2.0) == doctest::Approx(brute).epsilon(1e-9));
  CHECK(weighted_incidences_brute(F, P, wF, wP, 2.0) == doctest::Approx(brute).epsilon(1e-9));
}

TEST_CASE("separation check") {
  CHECK(check_separation(translates(0, 1, 1.0 / 16), 4).separated);
  const auto close = translates(0, 0.1, 0.01);
  const auto rep = check_separation(close, 4);
  CHECK_FALSE(rep.separated);
  CHECK(rep.min_distance == doctest::Approx(0.01));
}

TEST_CASE("high-low report") {
  SUBCASE("single curve") {
    const TransversalFamily F({CurveFunction::affine({0, 1}, 0.3, 0.2)}, 65);
    const auto P = oracle::all_squares(6);
    const auto rep = high_low_report(F, P, 2.0, 8.0);
    CHECK(rep.lhs <= static_cast<double>(P.size()));
    CHECK(std::isfinite(rep.fitted_C));
    CHECK(rep.holds_with(rep.fitted_C));
  }
  SUBCASE("terms follow their formulas") {
    oracle::Gen g(45);
    const auto F = translates(0, 1, 1.0 / 32);
    const auto P = oracle::random_squares(g, 5, 400);
    const double S = 8.0, delta = 1.0 / 32;
    const auto rep = high_low_report(F, P, 2.0, S);
    CHECK(rep.lhs == static_cast<double>(oracle::incidences(F.curves(), P, 2.0)));
    CHECK(rep.low_incidences == oracle::incidences(F.curves(), P, 2.0 * S));
    CHECK(rep.high_term == doctest::Approx(std::sqrt(S * S * S / delta * F.size() * P.size())));
    CHECK(rep.low_term == doctest::Approx(static_cast<double>(rep.low_incidences) / S));
    CHECK(rep.holds_with(rep.fitted_C));
    if (rep.fitted_C > 0) CHECK_FALSE(rep.holds_with(rep.fitted_C * 0.5));
  }
  SUBCASE("parameter ranges") {
    const auto F = translates(0, 1, 1.0 / 32);
    const auto P = row(5, 3);
    CHECK_THROWS_AS(high_low_report(F, P, 2.0, 2.0), Error);
    CHECK_THROWS_AS(high_low_report(F, P, 2.0, 64.0), Error);
    CHECK_THROWS_AS(high_low_report(F, P, 1.5, 8.0), Error);
    CHECK_THROWS_AS(high_low_report(translates(0, 0.1, 0.01), P, 2.0, 8.0), Error);
  }
}

TEST_CASE("multiplicity examples") {
  const double delta = 1.0 / 16;
  const auto K = translates(-1, 1, delta);
  const std::size_t zero = 16;
  REQUIRE(K[zero].value(0.3) == 0.0);
  for (double theta : {0.0, 0.4, 1.0}) CHECK(multiplicity(K, theta, zero, delta, 1.0) == 3);

  const TransversalFamily single({CurveFunction::affine({0, 1}, 0.2, 0.1)});
  CHECK(multiplicity(single, 0.5, 0, 1.0 / 8, 1.0) == 1);

  // r = R above the diameter: the count is the number of R-cells of the whole image
  const auto A = famspace::embed(K, false);
  CHECK(multiplicity(K, 0.5, zero, 4.0, 4.0) == oracle::cells_of(A.images, 2, -2).size());
}

TEST_CASE("high multiplicity set") {
  oracle::Gen g(46);
  const double theta = 0.5;
  std::vector<CurveFunction> curves;
  for (int k = 0; k < 5; ++k) curves.push_back(CurveFunction::affine({0, 1}, 0.25 * k, 0.5 - 0.25 * k * theta));
  // distractors: values at theta far from the cluster and from each other
  for (int k = 0; k < 6; ++k) {
    const double a = g.uniform(-1, 1);
    curves.push_back(CurveFunction::affine({0, 1}, a, -2.5 + 0.4 * k - a * theta));
  }
  const TransversalFamily K(curves, 65);
  const double r = 0.125, R = 8.0;
  CHECK(high_multiplicity_set(K, theta, 1, r, R).size() == K.size());
  CHECK(high_multiplicity_set(K, theta, K.size() + 1, r, R).empty());
  CHECK(high_multiplicity_set(K, theta, 4, r, R) == std::vector<std::size_t>{0, 1, 2, 3, 4});
  for (std::size_t f = 0; f < K.size(); ++f) CHECK(multiplicity(K, theta, f, r, R) == (f < 5 ? 5u : 1u));
}

TEST_CASE("high multiplicity set commutes with rescaling") {
  oracle::Gen g(47);
  const double theta = 0.25;
  std::vector<CurveFunction> curves;
  for (int k = 0; k < 40; ++k) {
    const double a = g.uniform(-1, 1), c = g.uniform(-0.3, 0.3);
    curves.push_back(CurveFunction::affine({0, 1}, a, c - a * theta));
  }
  const TransversalFamily K(curves, 65);
  // A(f0) = (0.25, 0.5) sits on the 1/8 lattice, so cells map onto cells
  const auto f0 = CurveFunction::affine({0, 1}, 0.5, 0.0);
  const double r0 = 0.25, r = 0.125, R = 1.0;
  const auto TK = family::rescale_ball(K, f0, r0);
  for (std::size_t M : {1u, 2u, 3u, 5u})
    CHECK(high_multiplicity_set(K, theta, M, r, R) == high_multiplicity_set(TK, theta, M, r / r0, R / r0));
}

TEST_CASE("slice cover and bundles") {
  const double delta = 1.0 / 32;
  const auto V = translates(0, 1, delta);
  std::vector<std::size_t> all(V.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const std::size_t n = slice_cover(V, all, 0.3, 5);
  CHECK(n >= 16);
  CHECK(n <= 33);
  std::set<std::int64_t> cells;
  for (std::size_t i : all) cells.insert(static_cast<std::int64_t>(std::floor(V[i].value(0.3) * 32)));
  CHECK(n == cells.size());
  CHECK(slice_cover(V, {}, 0.3, 5) == 0);

  std::vector<CurveFunction> pencil;
  for (int k = 0; k < 9; ++k) pencil.push_back(CurveFunction::affine({0, 1}, 0.1 * k, 0.4 - 0.1 * k * 0.6));
  const TransversalFamily P(pencil, 65);
  std::vector<std::size_t> ids(9);
  for (std::size_t i = 0; i < 9; ++i) ids[i] = i;
  CHECK(slice_cover(P, ids, 0.6, 8) == 1);

  CHECK(bundle(V, 0.5, -1, 2).size() == V.size());
  CHECK(bundle(V, 0.5, 3, 4).empty());
  const double Delta = 0.25;
  const auto b = bundle(V, 0.5, 0, Delta);
  std::vector<std::size_t> expect;
  for (std::size_t i = 0; i < V.size(); ++i)
    if (V[i].value(0.5) >= 0 && V[i].value(0.5) <= Delta) expect.push_back(i);
  CHECK(b == expect);
  CHECK(b.size() == 9);
}

TEST_CASE("n_delta_b") {
  const int level = 5;
  const Cell p{level, 10, 12};
  const TransversalFamily one({CurveFunction::affine({0, 1}, 0.0, p.cy())}, 65);
  const auto cubes1 = famspace::family_dyadic_cubes(famspace::embed(one, false), 2);
  CHECK(n_delta_b(p, one, cubes1, 1) == 1);
  CHECK(n_delta_b(p, one, cubes1, 2) == 0);

  oracle::Gen g(48);
  std::vector<CurveFunction> curves;
  for (int c = 0; c < 6; ++c) {
    const double a0 = g.uniform(-0.8, 0.8), b0 = g.uniform(0.2, 0.8);
    for (int k = 0; k < 8; ++k)
      curves.push_back(CurveFunction::affine({0, 1}, a0 + g.uniform(-0.02, 0.02), b0 + g.uniform(-0.02, 0.02)));
  }
  const TransversalFamily F(curves, 65);
  const auto cubes = famspace::family_dyadic_cubes(famspace::embed(F, false), 3);
  const auto profile = cube_incidence_profile(F, cubes, level);
  for (const auto& q : oracle::all_squares(level)) {
    std::size_t prev = cubes.size() + 1;
    for (std::size_t b = 1; b <= 8; ++b) {
      std::size_t brute = 0;
      for (const auto& cube : cubes) {
        std::size_t hits = 0;
        for (auto f : cube.members) hits += oracle::incidences({F[f]}, {q}, 2.0);
        brute += hits >= b;
      }
      const auto got = n_delta_b(q, F, cubes, b);
      CHECK(got == brute);
      CHECK(got <= prev);
      prev = got;
      const auto& counts = profile[static_cast<std::size_t>(q.ix * 32 + q.iy)];
      CHECK(static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(),
                                                   [b](std::uint32_t v) { return v >= b; })) == brute);
    }
  }
}

TEST_CASE("property: squares near a 1-Lipschitz graph have at most 4 per column") {
  oracle::Gen g(49);
  for (int trial = 0; trial < 20; ++trial) {
    const int level = static_cast<int>(g.integer(4, 8));
    const TransversalFamily F({CurveFunction::affine({0, 1}, g.uniform(-1, 1), g.uniform(0, 1))}, 65);
    const auto P = oracle::all_squares(level);
    const auto res = incidences(F, P, 2.0);
    std::set<std::int64_t> columns;
    for (const auto& pr : res.pairs) columns.insert(P[pr.square].ix);
    CHECK(res.count <= 4 * columns.size());
  }
}

}  // TEST_SUITE
