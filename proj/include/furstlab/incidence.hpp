#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "furstlab/dyadic.hpp"
#include "furstlab/famspace.hpp"
#include "furstlab/family.hpp"

namespace furstlab::incidence {

using dyadic::Cell;
using family::CurveFunction;
using family::TransversalFamily;

struct IncidencePair {
  std::uint32_t curve = 0;
  std::uint32_t square = 0;  // index into the square list
  friend bool operator==(const IncidencePair&, const IncidencePair&) = default;
};

struct IncidenceResult {
  std::uint64_t count = 0;
  std::vector<IncidencePair> pairs;  // sorted by (curve, square ix, square iy)
};

// z_p lies in the open vertical neighbourhood of the graph.
inline bool in_neighbourhood(const CurveFunction& f, const Cell& p, double halfwidth) {
  const double x = p.cx();
  if (!f.interval().contains(x)) return false;
  return std::abs(p.cy() - f.value(x)) < halfwidth;
}

// Squares must be distinct and share one level. Requires 0 < lambda and
// lambda * delta <= 1/2.
IncidenceResult incidences(const TransversalFamily& F, const std::vector<Cell>& P, double lambda,
                           bool keep_pairs = true);
std::uint64_t incidences_brute(const TransversalFamily& F, const std::vector<Cell>& P,
                               double lambda);

// Column-bucketed count with an arbitrary half-width (no range restriction).
std::uint64_t count_within(const TransversalFamily& F, const std::vector<Cell>& P,
                           double halfwidth);

double weighted_incidences(const TransversalFamily& F, const std::vector<Cell>& P,
                           const std::vector<double>& wF, const std::vector<double>& wP,
                           double lambda);
double weighted_incidences_brute(const TransversalFamily& F, const std::vector<Cell>& P,
                                 const std::vector<double>& wF, const std::vector<double>& wP,
                                 double lambda);

struct SeparationReport {
  bool separated = true;
  double min_distance = 0.0;  // smallest C^2 distance among close pairs checked
  std::size_t i = 0, j = 0;
};

// Uses |A(f) - A(g)| <= ||f - g|| to skip pairs whose images are delta apart.
SeparationReport check_separation(const TransversalFamily& F, int level);

struct HighLowReport {
  double lhs = 0.0;
  double high_term = 0.0;
  double low_term = 0.0;
  std::uint64_t low_incidences = 0;  // I^2(F, P^{S delta}), half-width 2 S delta
  double S = 0.0;
  double lambda = 0.0;
  int level = 0;
  double fitted_C = 0.0;
  std::size_t F_size = 0, P_size = 0;
  // lhs <= C log2(1/delta) high + low
  bool holds_with(double C) const;
};

HighLowReport high_low_report(const TransversalFamily& F, const std::vector<Cell>& P,
                              double lambda, double S);

// The r-scale count (dyadic cells of the embedding images, r a power of two)
// of {g in K : ||f - g|| <= R, |f(theta) - g(theta)| <= r}.
std::size_t multiplicity(const TransversalFamily& K, double theta, std::size_t f_index, double r,
                         double R);
std::vector<std::size_t> high_multiplicity_set(const TransversalFamily& K, double theta,
                                               std::size_t M, double r, double R);

// Number of level-k cells met by {f(theta) : f in subset}.
std::size_t slice_cover(const TransversalFamily& F, const std::vector<std::size_t>& subset,
                        double theta, int level);

// {f in K : lo <= f(theta) <= hi}
std::vector<std::size_t> bundle(const TransversalFamily& K, double theta, double lo, double hi);

// Number of cubes of D_Delta(F) holding at least b curves with |y_p - f(x_p)| < lambda delta.
std::size_t n_delta_b(const Cell& p, const TransversalFamily& F,
                      const std::vector<famspace::FamilyDyadicCube>& cubes, std::size_t b,
                      double lambda = 2.0);

// For every square of D_delta([0,1]^2): the positive per-cube incident counts,
// sorted descending. Index of square (ix, iy) is ix * 2^level + iy.
std::vector<std::vector<std::uint32_t>> cube_incidence_profile(
    const TransversalFamily& F, const std::vector<famspace::FamilyDyadicCube>& cubes, int level,
    double lambda = 2.0);

}  // namespace furstlab::incidence
