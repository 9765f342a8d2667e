#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "furstlab/dyadic.hpp"
#include "furstlab/family.hpp"

namespace furstlab::config {

using dyadic::Cell;
using dyadic::Point;
using family::TransversalFamily;

enum class CurveKind { Affine, Parabola, Exponential, Convex };

std::string kind_name(CurveKind kind);
// Accepts "affine", "parabola", "exp"/"exponential". Throws InvalidArgument otherwise.
CurveKind parse_kind(const std::string& name);

struct BuildOptions {
  // Every curve shares one column set instead of drawing its own.
  bool correlated = false;
  // Measure the (delta, t)-constant of F and the (delta, s)-constants of the
  // square sets. Off for bulk experiments.
  bool audit = true;
  // Work budget for the square-set audit, in units of |F| * M^2; beyond it an
  // evenly spaced subsample of curves is audited.
  double audit_budget = 2e7;
  int grid_n = family::kDefaultGridN;
  // Seed used when kind == Convex.
  std::optional<family::ConvexSeed> convex_seed;
};

struct NiceConfiguration {
  std::string kind = "custom";
  int level = 0;  // delta = 2^-level
  double s = 0.0;
  double t = 0.0;
  int T = 1;
  std::uint64_t seed = 0;
  TransversalFamily F;
  std::vector<Point> parameters;           // parameter-plane point of every curve
  std::vector<std::vector<Cell>> squares;  // P(f), sorted, one list per curve
  std::size_t M = 0;                       // common cardinality, 0 when they differ
  // Measured constants; negative when not audited.
  double C_family = -1.0;
  double C_squares = -1.0;
  std::size_t audited_curves = 0;

  double delta() const { return dyadic::side(level); }
};

// delta = 2^-level with level a multiple of T; s in [0,1], t in [0,2].
// Curves: affine a x + b on [-2,2] with (a, b) = (u - 1/2, v), or translates
// g(x - a) + b on [-5,5] of g = x^2/2 (parabola), e^x, or a supplied convex seed,
// where (u, v) ranges over a (delta, t)-set in [0,1]^2.
NiceConfiguration build_nice_configuration(CurveKind kind, int level, double s, double t, int T,
                                           std::uint64_t seed, const BuildOptions& opts = {});

// Assembles a configuration from explicit parts (used for hand-built cases).
NiceConfiguration make_configuration(TransversalFamily F, std::vector<std::vector<Cell>> squares,
                                     int level, double s, double t);

struct NiceReport {
  bool ok = true;
  bool graphs_hit = true;
  bool cardinality_ok = true;
  bool squares_valid = true;  // right level, no repeats
  bool separated = true;
  double separation_margin = 0.0;  // min C^2 distance of close pairs over delta
  double max_graph_gap = 0.0;      // worst min |y - f(x)| over a square, in units of delta
  double C_family = -1.0;
  double C_squares = -1.0;
  std::size_t audited_curves = 0;
  std::size_t bad_curve = 0, bad_square = 0;
  std::string failure;
};

// Re-checks every invariant. Report-style: never throws on a failed check.
NiceReport verify_nice(const NiceConfiguration& conf, bool measure_constants = true);

// Does the graph of f meet the closed square p?
bool graph_meets_square(const family::CurveFunction& f, const Cell& p, double lipschitz);

std::vector<Cell> union_of_squares(const NiceConfiguration& conf);

struct ExperimentResult {
  std::string kind;
  int level = 0;
  double s = 0.0, t = 0.0;
  int T = 1;
  std::uint64_t seed = 0;
  std::size_t F_size = 0, M = 0, P_size = 0;
  double bound = 0.0;
  double eta_emp = 0.0;
};

double furstenberg_bound(int level, double s, double t, std::size_t M);
ExperimentResult furstenberg_experiment(const NiceConfiguration& conf);

// delta^-s vertical translates of x^2/2 spaced delta^s, each with its own
// column set: a Katz-Tao (delta, s)-family.
NiceConfiguration katz_tao_configuration(int level, double s, int T, std::uint64_t seed,
                                         const BuildOptions& opts = {});

struct EndpointReport {
  double katz_tao_K = 0.0;     // katz_tao_constant of F at exponent s
  double delta_set_C = 0.0;    // delta_set_constant of F at exponent 2 - s
  std::size_t P_size = 0;
  double ratio_dense = 0.0;    // |P| / (delta^-1 M)
  double ratio_katz_tao = 0.0; // |P| / (|F| M)
  double eps_dense = 0.0;      // log_delta of the ratio, clamped at 0
  double eps_katz_tao = 0.0;
};

EndpointReport endpoint_checks(const NiceConfiguration& conf);

struct SpacingReport {
  double high_ratio = 0.0;  // max |F ∩ B(x,r)| / (r^{2-s} |F|), r in [Delta, 1]
  double low_ratio = 0.0;   // max |F ∩ B(x,r)| / (r/delta)^s,   r in [delta, Delta]
  double high_radius = 0.0, low_radius = 0.0;
  double allowance = 1.0;   // delta^{-eps^2}
  bool high_ok = true, low_ok = true;
};

// Points are embedding images or parameter points at resolution 2^-level.
SpacingReport semi_well_spaced_check(const std::vector<Point>& pts, int level, int Delta_level,
                                     double eps, double s);
SpacingReport semi_well_spaced_check(const TransversalFamily& F, int level, int Delta_level,
                                     double eps, double s);

// Dense (exponent 2 - s) above Delta, round((Delta/delta)^s) points on the
// diagonal of every Delta-cell below it.
std::vector<Point> product_construction(int level, int Delta_level, double s, std::uint64_t seed);

// Lines f(x) = a x + b on [-2,2] with (b, a) = (p_x, p_y - 1/2).
TransversalFamily line_family(const std::vector<Point>& params, int grid_n = family::kDefaultGridN);

struct MainlemCell {
  std::size_t a = 0, b = 0;
  bool hypothesis = false;  // a >= 2, b >= 1, ab >= delta^{1-2 eps} |F|
  std::size_t P_ab = 0;
  std::size_t P_ab_without_i = 0;  // same count with condition (i) dropped, not asserted
  double bound = 0.0;
  bool violation = false;
};

struct MainlemReport {
  std::vector<MainlemCell> cells;
  std::size_t violations = 0;
  std::size_t cubes = 0;            // |D_Delta(F)|
  std::size_t max_population = 0;   // largest Delta-cube
  std::size_t hypothesis_i_squares = 0;  // squares passing condition (i)
};

// Sweeps dyadic a in [2, 2|D_Delta(F)|] and b in [1, 2 max population].
MainlemReport mainlem_experiment(const TransversalFamily& F, int level, int Delta_level, double eps,
                                 double lambda = 2.0);
MainlemCell mainlem_experiment(const TransversalFamily& F, int level, int Delta_level, double eps,
                               std::size_t a, std::size_t b, double lambda = 2.0);

}  // namespace furstlab::config
