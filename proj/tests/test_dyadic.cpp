#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>

#include "doctest.h"
#include "furstlab/dyadic.hpp"
#include "furstlab/error.hpp"
#include "oracles.hpp"

using namespace furstlab;
using namespace furstlab::dyadic;

namespace {

std::vector<Point> grid_1d(int level, double hi = 1.0) {
  std::vector<Point> pts;
  const int n = static_cast<int>(std::llround(hi * std::exp2(level)));
  for (int k = 0; k <= n; ++k) pts.push_back({k / std::exp2(level), 0.0});
  return pts;
}

std::vector<Point> centres_1d(int level) {
  std::vector<Point> pts;
  for (std::int64_t k = 0; k < (std::int64_t{1} << level); ++k) pts.push_back({cell_center(k, level), 0.0});
  return pts;
}

}  // namespace

TEST_SUITE("dyadic") {

TEST_CASE("cells: half-open convention and centres") {
  CHECK(cell_index(0.25, 2) == 1);
  CHECK(cell_index(0.2499999, 2) == 0);
  CHECK(cell_center(3, 2) == 0.875);
  const Cell c{3, 5, 2};
  CHECK(c.ancestor(1) == Cell{1, 1, 0});
  CHECK(side(10) == 1.0 / 1024);
}

TEST_CASE("dyadic_cover examples") {
  CHECK(dyadic_cover({{0.1, 0.1}, {0.6, 0.6}}, 2, 1).size() == 2);
  CHECK(dyadic_cover({{0.25, 0.25}}, 2, 2).size() == 1);
  CHECK(dyadic_cover({{0.25, 0.25}}, 2, 2)[0] == Cell{2, 1, 1});
  CHECK(dyadic_cover(grid_1d(4), 1, 4).size() == 17);
}

TEST_CASE("property: dyadic_cover matches the floor oracle and is idempotent") {
  oracle::Gen g(1);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Point> pts;
    const int n = static_cast<int>(g.integer(1, 200));
    for (int i = 0; i < n; ++i) pts.push_back({g.uniform(0, 1), g.uniform(0, 1)});
    const int level = static_cast<int>(g.integer(0, 8));
    const auto cover = dyadic_cover(pts, 2, level);
    CHECK(cover.size() == oracle::cells_of(pts, 2, level).size());
    std::vector<Point> centres;
    for (const auto& c : cover) centres.push_back({c.cx(), c.cy()});
    CHECK(dyadic_cover(centres, 2, level) == cover);
  }
}

TEST_CASE("point sets reject duplicates and bad dimensions") {
  CHECK_THROWS_AS(DiscretePointSet(2, {{0.1, 0.1}, {0.1, 0.1}}, 3), Error);
  CHECK_THROWS_AS(DiscretePointSet(3, {{0.1, 0.1}}, 3), Error);
  CHECK_THROWS_AS(AtomicMeasure(1, {{0.1, 0}}, {-0.5}), Error);
}

TEST_CASE("covering_number examples") {
  const DiscretePointSet line(1, grid_1d(4), 4);
  CHECK(covering_number(line, 0.25, CoveringMode::Exact).value == 2);
  CHECK(covering_number(DiscretePointSet(2, {{0.3, 0.4}}, 4), 0.01).value == 1);
  CHECK(covering_number(DiscretePointSet(2, {{0.3, 0.4}}, 4), 0.01, CoveringMode::Exact).value == 1);
}

TEST_CASE("covering_number: exact mode agrees with subset enumeration") {
  oracle::Gen g(2);
  for (int trial = 0; trial < 25; ++trial) {
    const auto pts = oracle::random_grid_points(g, 5, static_cast<std::size_t>(g.integer(2, 14)));
    const DiscretePointSet P(2, pts, 5);
    const double r = g.uniform(0.05, 0.4);
    const auto exact = covering_number(P, r, CoveringMode::Exact);
    REQUIRE(exact.proven);
    CHECK(exact.value == oracle::covering_exact(pts, r));
  }
}

TEST_CASE("covering_number: greedy bracket on random 300-point sets") {
  oracle::Gen g(3);
  for (int trial = 0; trial < 3; ++trial) {
    const auto pts = oracle::random_grid_points(g, 8, 300);
    const DiscretePointSet P(2, pts, 8);
    const double r = 0.125;
    const auto greedy = covering_number(P, r).value;
    const auto exact = covering_number(P, r, CoveringMode::Exact);
    const auto exact_half = covering_number(P, r / 2, CoveringMode::Exact);
    // the greedy centres are r-separated, so balls of radius r/2 around them are disjoint
    CHECK(exact.lower_bound <= greedy);
    CHECK(greedy <= exact_half.value);
    if (exact.proven) CHECK(exact.value <= greedy);
  }
}

TEST_CASE("covering_number: line sweep is optimal") {
  oracle::Gen g(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = oracle::random_grid_points(g, 6, static_cast<std::size_t>(g.integer(1, 12)), 1);
    const double r = g.uniform(0.02, 0.3);
    const auto exact = covering_number(DiscretePointSet(1, pts, 6), r, CoveringMode::Exact);
    CHECK(exact.proven);
    // closed balls on the line may be centred anywhere, so the oracle over
    // centres in P only gives an upper bound
    CHECK(exact.value <= oracle::covering_exact(pts, r));
    CHECK(exact.value <= covering_number(DiscretePointSet(1, pts, 6), r).value);
  }
}

TEST_CASE("delta_set_constant examples") {
  const DiscretePointSet grid(1, centres_1d(4), 4);
  const auto rep = delta_set_constant(grid, 4, 1.0);
  CHECK(rep.best_constant >= 1.0);
  CHECK(rep.best_constant <= 4.0);
  CHECK(rep.best_constant == doctest::Approx(oracle::delta_set_constant(grid.points(), 1, 4, 1.0)));

  CHECK(delta_set_constant(DiscretePointSet(2, {{0.5, 0.5}}, 4), 4, 0.0).best_constant == 1.0);

  // two antipodal points: the smallest ball holds one of two cells, 1/(2 r) at r = 2^-4
  const DiscretePointSet two(2, {{0.03125, 0.03125}, {0.96875, 0.96875}}, 4);
  const double c = delta_set_constant(two, 4, 1.0).best_constant;
  CHECK(c == doctest::Approx(oracle::delta_set_constant(two.points(), 2, 4, 1.0)));
  CHECK(c == doctest::Approx(8.0));
}

TEST_CASE("upper_regular_constant examples") {
  const DiscretePointSet grid(1, centres_1d(5), 5);
  const double full = upper_regular_constant(grid, 5, 1.0).best_constant;
  CHECK(full <= 4.0);
  CHECK(full == doctest::Approx(oracle::upper_regular_constant(grid.points(), 1, 5, 1.0)));
  CHECK(upper_regular_constant(DiscretePointSet(1, {{0.3, 0}}, 5), 5, 0.7).best_constant == 1.0);

  std::vector<Point> half;
  for (const auto& p : grid.points())
    if (p[0] < 0.5) half.push_back(p);
  CHECK(upper_regular_constant(DiscretePointSet(1, half, 5), 5, 1.0).best_constant == doctest::Approx(full));
}

TEST_CASE("katz_tao_constant examples") {
  const DiscretePointSet grid(1, centres_1d(6), 6);
  const double K = katz_tao_constant(grid, 6, 1.0).best_constant;
  CHECK(K >= 1.0);
  CHECK(K <= 4.0);
  CHECK(katz_tao_constant(DiscretePointSet(1, {{0.3, 0}}, 6), 6, 0.37).best_constant == 1.0);

  // 2^3 equispaced points at delta = 2^-6, s = 1/2
  std::vector<Point> sparse;
  for (int k = 0; k < 8; ++k) sparse.push_back({(k + 0.5) / 8.0, 0.0});
  const DiscretePointSet S(1, sparse, 6);
  const double Ks = katz_tao_constant(S, 6, 0.5).best_constant;
  CHECK(Ks <= 4.0);
  CHECK(Ks == doctest::Approx(oracle::katz_tao_constant(sparse, 1, 6, 0.5)));
}

TEST_CASE("frostman_constant examples") {
  const int level = 6;
  auto atoms = centres_1d(level);
  std::vector<double> w(atoms.size(), 1.0 / atoms.size());
  const AtomicMeasure mu(1, atoms, w);
  const double C1 = frostman_constant(mu, 1.0, level).best_constant;
  CHECK(C1 <= 3.0);
  CHECK(C1 == doctest::Approx(oracle::frostman_constant(atoms, w, 1.0, level)));
  CHECK(frostman_constant(AtomicMeasure(2, {{0.2, 0.2}}, {1.0}), 0.0, level).best_constant == 1.0);
  // t = 2 blows up like delta^-1 and is reported, not rejected
  const double C2 = frostman_constant(mu, 2.0, level).best_constant;
  CHECK(C2 == doctest::Approx(oracle::frostman_constant(atoms, w, 2.0, level)));
  CHECK(C2 >= std::exp2(level) / 2);
}

TEST_CASE("property: set-class constants match the brute-force oracles and their witnesses") {
  oracle::Gen g(9);
  for (int trial = 0; trial < 25; ++trial) {
    const int dim = g.coin() ? 2 : 1;
    const int level = static_cast<int>(g.integer(3, 6));
    const auto pts = oracle::random_grid_points(g, level, static_cast<std::size_t>(g.integer(1, 60)), dim);
    const DiscretePointSet P(dim, pts, level);
    const double s = g.uniform(0, dim);
    const auto ds = delta_set_constant(P, level, s);
    const auto kt = katz_tao_constant(P, level, s);
    const auto ur = upper_regular_constant(P, level, s);
    CHECK(ds.best_constant == doctest::Approx(oracle::delta_set_constant(pts, dim, level, s)).epsilon(1e-12));
    CHECK(kt.best_constant == doctest::Approx(oracle::katz_tao_constant(pts, dim, level, s)).epsilon(1e-12));
    CHECK(ur.best_constant == doctest::Approx(oracle::upper_regular_constant(pts, dim, level, s)).epsilon(1e-12));
    CHECK(delta_set_ratio(P, level, s, ds.witness_center, ds.witness_radius) ==
          doctest::Approx(ds.best_constant).epsilon(1e-9));
    CHECK(katz_tao_ratio(P, level, s, kt.witness_center, kt.witness_radius) ==
          doctest::Approx(kt.best_constant).epsilon(1e-9));
    CHECK(upper_regular_ratio(P, s, ur.witness_center, ur.witness_radius, ur.witness_inner_level) ==
          doctest::Approx(ur.best_constant).epsilon(1e-9));
  }
}

TEST_CASE("property: frostman constants match the oracle and witnesses reproduce") {
  oracle::Gen g(10);
  for (int trial = 0; trial < 15; ++trial) {
    const auto atoms = oracle::random_grid_points(g, 6, static_cast<std::size_t>(g.integer(1, 50)));
    std::vector<double> w;
    double total = 0;
    for (std::size_t i = 0; i < atoms.size(); ++i) total += w.emplace_back(g.uniform(0.1, 1));
    for (auto& x : w) x /= total;
    const AtomicMeasure mu(2, atoms, w);
    const double t = g.uniform(0, 2);
    const auto rep = frostman_constant(mu, t, 6);
    CHECK(rep.best_constant == doctest::Approx(oracle::frostman_constant(atoms, w, t, 6)).epsilon(1e-12));
    CHECK(frostman_ratio(mu, t, rep.witness_center, rep.witness_radius) ==
          doctest::Approx(rep.best_constant).epsilon(1e-9));
  }
}

TEST_CASE("property: delta_set_constant is monotone in s") {
  oracle::Gen g(12);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pts = oracle::random_grid_points(g, 6, 80);
    const DiscretePointSet P(2, pts, 6);
    double prev = 0.0;
    for (double s : {0.0, 0.5, 1.0, 1.5, 2.0}) {
      const double c = delta_set_constant(P, 6, s).best_constant;
      CHECK(c >= prev - 1e-12);
      prev = c;
    }
  }
}

TEST_CASE("max_ball_population matches direct counting, lattice and scattered inputs") {
  oracle::Gen g(13);
  for (int trial = 0; trial < 20; ++trial) {
    const int level = static_cast<int>(g.integer(3, 7));
    auto pts = oracle::random_grid_points(g, level, static_cast<std::size_t>(g.integer(1, 300)));
    if (trial % 2) pts.push_back({g.uniform(0, 1), g.uniform(0, 1)});  // off-lattice point
    const DiscretePointSet P(2, pts, level + 2);
    const double r = std::exp2(-static_cast<double>(g.integer(0, level)));
    std::size_t best = 0;
    for (const auto& x : pts) {
      std::size_t k = 0;
      for (const auto& y : pts) k += std::hypot(x[0] - y[0], x[1] - y[1]) <= r;
      best = std::max(best, k);
    }
    CHECK(max_ball_population(P, r).first == best);
  }
}

TEST_CASE("generate_delta_set examples") {
  const auto full = generate_delta_set(1, 6, 1.0, 1, 3);
  CHECK(full.size() == 64);
  CHECK(generate_delta_set(2, 8, 0.5, 2, 7).size() == 16);
  for (int T : {1, 2, 4}) CHECK(generate_delta_set(2, 8, 0.0, T, 1).size() == 1);
  CHECK_THROWS_AS(generate_delta_set(2, 9, 0.5, 2, 1), Error);
}

TEST_CASE("property: generated sets are uniform and (delta, s)-sets with constant <= 64") {
  oracle::Gen g(14);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = g.coin() ? 2 : 1;
    const int T = static_cast<int>(g.integer(1, 3));
    const int m = static_cast<int>(g.integer(1, 7 / T));
    const int level = m * T;
    const double s = g.uniform(0, dim);
    const auto P = generate_delta_set(dim, level, s, T, static_cast<std::uint64_t>(trial));
    const auto per = static_cast<std::size_t>(std::llround(std::exp2(s * T)));
    CHECK(P.size() == static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(per), m))));
    CHECK(delta_set_constant(P, level, s).best_constant <= 64.0);
    for (int j = 1; j <= m; ++j) {
      std::map<std::pair<std::int64_t, std::int64_t>, std::set<std::pair<std::int64_t, std::int64_t>>> kids;
      for (const auto& c : oracle::cells_of(P.points(), dim, j * T)) {
        const int d = T;
        kids[{c.first >> d, c.second >> d}].insert(c);
      }
      for (const auto& [parent, children] : kids) CHECK(children.size() == per);
    }
  }
}

TEST_CASE("points CSV round trip") {
  const auto path = (std::filesystem::temp_directory_path() / "furstlab_points_test.csv").string();
  const std::vector<Point> pts = {{0.1, 0.2}, {1.0 / 3.0, 2.0 / 3.0}};
  const std::vector<double> w = {0.25, 0.75};
  write_points_csv(path, 2, pts, &w);
  const auto back = read_points_csv(path);
  CHECK(back.dim == 2);
  REQUIRE(back.points.size() == 2);
  CHECK(back.points[1][0] == pts[1][0]);
  CHECK(back.points[1][1] == pts[1][1]);
  REQUIRE(back.weights);
  CHECK((*back.weights)[1] == 0.75);
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_points_csv(path), Error);
}

}  // TEST_SUITE
