#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace furstlab::dyadic {

// Scales are powers of two, identified by their level k (side 2^-k).
inline double side(int level) { return std::ldexp(1.0, -level); }

// Index of the half-open cell [i 2^-k, (i+1) 2^-k) containing x.
inline std::int64_t cell_index(double x, int level) {
  return static_cast<std::int64_t>(std::floor(std::ldexp(x, level)));
}

inline double cell_center(std::int64_t i, int level) {
  return std::ldexp(static_cast<double>(i) + 0.5, -level);
}

// Dyadic interval (dim 1, iy = 0) or square (dim 2).
struct Cell {
  int level = 0;
  std::int64_t ix = 0;
  std::int64_t iy = 0;

  double cx() const { return cell_center(ix, level); }
  double cy() const { return cell_center(iy, level); }
  // Parent at a coarser level.
  Cell ancestor(int coarser) const {
    const int d = level - coarser;
    return {coarser, ix >> d, iy >> d};
  }
  friend bool operator==(const Cell& a, const Cell& b) {
    return a.level == b.level && a.ix == b.ix && a.iy == b.iy;
  }
  friend bool operator<(const Cell& a, const Cell& b) {
    if (a.level != b.level) return a.level < b.level;
    if (a.ix != b.ix) return a.ix < b.ix;
    return a.iy < b.iy;
  }
};
using DyadicSquare = Cell;
using DyadicInterval = Cell;

struct CellHash {
  std::size_t operator()(const Cell& c) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(c.ix) * 0x9E3779B97F4A7C15ULL;
    h ^= static_cast<std::uint64_t>(c.iy) + 0x7F4A7C159E3779B9ULL + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(c.level) * 0xC2B2AE3D27D4EB4FULL;
    return static_cast<std::size_t>(h);
  }
};

using Point = std::array<double, 2>;  // y = 0 in dimension 1

class DiscretePointSet {
 public:
  // Throws on duplicate points or dim outside {1, 2}.
  DiscretePointSet(int dim, std::vector<Point> points, int level);

  int dim() const { return dim_; }
  int level() const { return level_; }
  double delta() const { return side(level_); }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<Point>& points() const { return points_; }
  const Point& operator[](std::size_t i) const { return points_[i]; }

 private:
  int dim_;
  std::vector<Point> points_;
  int level_;
};

class AtomicMeasure {
 public:
  AtomicMeasure(int dim, std::vector<Point> atoms, std::vector<double> weights);

  int dim() const { return dim_; }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<Point>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  double total_mass() const { return total_; }

 private:
  int dim_;
  std::vector<Point> atoms_;
  std::vector<double> weights_;
  double total_ = 0.0;
};

double distance(const Point& a, const Point& b);

// Exact set of level-k cells meeting P, sorted.
std::vector<Cell> dyadic_cover(const std::vector<Point>& pts, int dim, int level);
inline std::vector<Cell> dyadic_cover(const DiscretePointSet& P, int level) {
  return dyadic_cover(P.points(), P.dim(), level);
}

enum class CoveringMode { Greedy, Exact };

struct CoveringResult {
  std::size_t value = 0;
  // Exact mode only: true when the value is a certified optimum. For sets in
  // the plane the optimum is over balls centred at points of P.
  bool proven = false;
  std::size_t lower_bound = 0;
};

// Closed r-balls. Greedy: maximal set of centers pairwise > r apart, chosen in
// lexicographic order, so N(r) <= value <= N(r/2). Exact: optimal sweep on the
// line; branch and bound over centers in P in the plane (|P| <= 512).
CoveringResult covering_number(const DiscretePointSet& P, double r,
                               CoveringMode mode = CoveringMode::Greedy);

struct SetClassReport {
  double best_constant = 0.0;
  Point witness_center{0.0, 0.0};
  double witness_radius = 0.0;  // r, or R for upper regularity
  int witness_inner_level = 0;  // scale r of |.|_r for upper regularity
  int level_lo = 0;             // radii 2^-level_lo ... 2^-level_hi
  int level_hi = 0;
};

// |P ∩ B(x,r)|_δ counted as the number of δ-cells met by the points in the ball.
std::size_t ball_cover_count(const std::vector<Point>& pts, int dim, const Point& x, double r,
                             int level);

SetClassReport delta_set_constant(const DiscretePointSet& P, int delta_level, double s);
SetClassReport upper_regular_constant(const DiscretePointSet& P, int delta_level, double s);
SetClassReport katz_tao_constant(const DiscretePointSet& P, int delta_level, double s);
SetClassReport frostman_constant(const AtomicMeasure& mu, double t, int delta_level);

// Largest number of points of P in a closed r-ball centred at a point of P,
// with the index of a maximizing center.
std::pair<std::size_t, std::size_t> max_ball_population(const DiscretePointSet& P, double r);

// Ratio recomputed at a single (center, radius), for witness checks.
double delta_set_ratio(const DiscretePointSet& P, int delta_level, double s, const Point& x,
                       double r);
double upper_regular_ratio(const DiscretePointSet& P, double s, const Point& x, double R,
                           int inner_level);
double katz_tao_ratio(const DiscretePointSet& P, int delta_level, double s, const Point& x,
                      double r);
double frostman_ratio(const AtomicMeasure& mu, double t, const Point& x, double r);

// {2^-jT}-uniform random set: round(2^{sT}) children per cell per level.
// delta = 2^-level with level = m T.
DiscretePointSet generate_delta_set(int dim, int level, double s, int T, std::uint64_t seed);

// CSV with header x[,y][,w], 17 significant digits.
void write_points_csv(const std::string& path, int dim, const std::vector<Point>& pts,
                      const std::vector<double>* weights = nullptr);
struct PointsCsv {
  int dim = 1;
  std::vector<Point> points;
  std::optional<std::vector<double>> weights;
};
PointsCsv read_points_csv(const std::string& path);

}  // namespace furstlab::dyadic
