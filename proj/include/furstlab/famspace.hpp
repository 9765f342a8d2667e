#pragma once

#include <cstdint>
#include <vector>

#include "furstlab/dyadic.hpp"
#include "furstlab/family.hpp"

namespace furstlab::famspace {

using dyadic::Point;
using family::TransversalFamily;

struct EmbeddingViolation {
  std::size_t i = 0, j = 0;
  double ratio = 0.0;  // ||f - g|| / |A(f) - A(g)|, or its inverse for the lower side
  bool upper_side = true;
};

// A(f) = (f(x0), f'(x0)) with x0 the midpoint of the family interval.
struct FamilyEmbedding {
  double x0 = 0.0;
  std::vector<Point> images;
  bool pairs_checked = false;
  double max_upper_ratio = 0.0;  // max ||f-g|| / |A(f)-A(g)|
  double max_lower_ratio = 0.0;  // max |A(f)-A(g)| / ||f-g||
  std::vector<EmbeddingViolation> violations;
};

// With check_pairs the two-sided inequality is verified on every pair
// against sqrt(2) * t_const * (1 + 1e-6); failures are listed, not thrown.
FamilyEmbedding embed(const TransversalFamily& F, bool check_pairs = true);

struct FamilyDyadicCube {
  int level = 0;
  std::int64_t ix = 0, iy = 0;
  std::vector<std::size_t> members;  // indices into the family, ascending
};

// Preimages under A of the level-k dyadic squares, sorted by (ix, iy).
std::vector<FamilyDyadicCube> family_dyadic_cubes(const std::vector<Point>& images, int level);
inline std::vector<FamilyDyadicCube> family_dyadic_cubes(const FamilyEmbedding& A, int level) {
  return family_dyadic_cubes(A.images, level);
}

// Pairwise C^2 distances at the family grid, row-major n x n.
std::vector<double> c2_distance_matrix(const TransversalFamily& F);

// Greedy closed-ball covering number of the family in the C^2 metric.
std::size_t family_covering_number(const std::vector<double>& dist, std::size_t n, double r);

int lipschitz_threshold(double t_const);  // ceil(log2(640 T^4))

struct UniformStructure {
  int T = 1;
  int m = 0;
  std::vector<std::uint64_t> N;          // N[j-1] = children per level-(j-1) cube
  std::vector<std::size_t> cube_counts;  // |D_{2^{-jT}}(F')| for j = 0..m
};

struct UniformOptions {
  bool require_lipschitz_threshold = true;
};

struct UniformResult {
  std::vector<std::size_t> subset;  // indices of retained curves, ascending
  UniformStructure structure;
  std::size_t cubes_before = 0;  // |D_delta(F)|
  std::size_t cubes_after = 0;   // |D_delta(F')|
  double guaranteed = 0.0;       // (6T)^-m |D_delta(F)|
  int threshold = 0;
};

// Pigeonholes child counts into classes [2^k, 2^{k+1}) from the finest level
// up, keeping the class with the most children (ties: smaller k) and trimming
// every kept parent to its 2^k lexicographically first children.
UniformResult extract_uniform_subset(const std::vector<Point>& images, double t_const, int T,
                                     int m, UniformOptions opts = {});
UniformResult extract_uniform_subset(const TransversalFamily& F, int T, int m,
                                     UniformOptions opts = {});

struct UniformityAudit {
  bool uniform = true;
  std::vector<std::uint64_t> N;
  std::vector<std::size_t> cube_counts;
};

// Independent recount of the branching of a set of images at levels jT.
UniformityAudit audit_uniformity(const std::vector<Point>& images, int T, int m);

// Values at 0..m, linear in between.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  explicit PiecewiseLinear(std::vector<double> values);
  double operator()(double x) const;
  int m() const { return static_cast<int>(values_.size()) - 1; }
  const std::vector<double>& values() const { return values_; }
  double lipschitz() const;
  double slope(double a, double b) const { return ((*this)(b) - (*this)(a)) / (b - a); }

 private:
  std::vector<double> values_;
};

struct BranchingFunction {
  int T = 1;
  PiecewiseLinear beta;
};

// beta(j) = (1/T) sum_{i<=j} log2 N_i.
BranchingFunction branching_function(const UniformStructure& s);

struct CheckResult {
  bool holds = true;
  double max_violation = 0.0;
};

CheckResult check_superlinear(const PiecewiseLinear& f, double sigma, double eps, double a,
                              double b);
CheckResult check_linear(const PiecewiseLinear& f, double sigma, double eps, double a, double b);
// f(x) >= min{f(c) + u(x-c), f(d) - s(d-x)} - eps (d - c) on [c, d].
CheckResult check_two_slope_floor(const PiecewiseLinear& f, double s, double u, double eps,
                                  double c, double d);

struct StructuredInterval {
  int c = 0, d = 0;
  char type = 'a';
  double slope = 0.0;
};

struct StructuredIntervals {
  std::vector<StructuredInterval> intervals;
  double leftover_ratio = 1.0;
  int min_length = 0;
};

StructuredIntervals find_structured_intervals(const PiecewiseLinear& beta, double s, double t,
                                              double u, double eps);

}  // namespace furstlab::famspace
