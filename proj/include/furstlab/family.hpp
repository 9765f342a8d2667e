#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace furstlab::family {

inline constexpr int kDefaultGridN = 2049;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const { return hi - lo; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool contains(const Interval& o) const { return o.lo >= lo && o.hi <= hi; }
  // k-th of n equispaced points, with both endpoints hit exactly.
  double grid_point(int k, int n) const {
    if (k == n - 1) return hi;
    return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  }
};

enum class FamilyTag { Affine, ConvexTranslate, Custom };

using Evaluator = std::function<double(double)>;

class CurveFunction {
 public:
  CurveFunction(Interval interval, Evaluator f, Evaluator df, Evaluator d2f,
                std::vector<double> params = {}, FamilyTag tag = FamilyTag::Custom);

  // f(x) = a x + b, with exact derivatives a and 0.
  static CurveFunction affine(Interval interval, double a, double b);

  // Piecewise-linear interpolation of equispaced samples; derivatives come
  // from centered differences (O(h^2) in the interior, one-sided at the ends).
  // Marked approximate().
  static CurveFunction tabulated(Interval interval, std::vector<double> samples);

  double value(double x) const { return f_(x); }
  double d1(double x) const { return df_(x); }
  double d2(double x) const { return d2f_(x); }
  double operator()(double x) const { return f_(x); }

  const Interval& interval() const { return interval_; }
  const std::vector<double>& params() const { return params_; }
  FamilyTag tag() const { return tag_; }
  bool approximate() const { return approximate_; }

  // Optional bound on |f'''| used to bound grid error; NaN when unknown.
  double third_derivative_bound() const { return d3_bound_; }
  CurveFunction& set_third_derivative_bound(double b) {
    d3_bound_ = b;
    return *this;
  }

  const Evaluator& f() const { return f_; }
  const Evaluator& df() const { return df_; }
  const Evaluator& d2f() const { return d2f_; }

 private:
  Interval interval_;
  Evaluator f_, df_, d2f_;
  std::vector<double> params_;
  FamilyTag tag_;
  bool approximate_ = false;
  double d3_bound_ = std::numeric_limits<double>::quiet_NaN();
};

// Values of f, f', f'' on the grid_n equispaced points of the interval.
struct Jet {
  double v0, v1, v2;
};
std::vector<Jet> sample(const CurveFunction& f, int grid_n);

double c2_norm(const CurveFunction& f, int grid_n = kDefaultGridN);
double c2_distance(const CurveFunction& f, const CurveFunction& g, int grid_n = kDefaultGridN);
double transversality_defect(const CurveFunction& f, const CurveFunction& g,
                             int grid_n = kDefaultGridN);

// Norm and defect computed from pre-sampled jets (same grid).
double c2_distance(const std::vector<Jet>& a, const std::vector<Jet>& b);
double transversality_defect(const std::vector<Jet>& a, const std::vector<Jet>& b);

struct TransversalityEstimate {
  double t_const = 1.0;
  double min_defect = std::numeric_limits<double>::infinity();
  std::size_t worst_i = 0, worst_j = 0;
  std::size_t pairs_checked = 0;
};

class TransversalFamily {
 public:
  TransversalFamily() = default;  // empty
  // Estimates the transversality constant over all pairs. Throws on
  // duplicate curves (C^2 distance < 1e-12) or mismatched intervals.
  explicit TransversalFamily(std::vector<CurveFunction> curves, int grid_n = kDefaultGridN);

  // For large families: trusts a declared constant after certifying it on
  // near neighbours in the (f(x0), f'(x0)) plane plus a seeded random sample
  // of pairs. Duplicates are still detected exactly via the embedding.
  static TransversalFamily with_declared_constant(std::vector<CurveFunction> curves,
                                                  double t_declared,
                                                  int grid_n = kDefaultGridN,
                                                  std::size_t random_pairs = 256,
                                                  unsigned long long seed = 1);

  std::size_t size() const { return curves_.size(); }
  const CurveFunction& operator[](std::size_t i) const { return curves_[i]; }
  const std::vector<CurveFunction>& curves() const { return curves_; }
  const Interval& interval() const { return interval_; }
  int grid_n() const { return grid_n_; }
  double t_const() const { return estimate_.t_const; }
  double c2_bound() const { return c2_bound_; }
  const TransversalityEstimate& estimate() const { return estimate_; }
  // True when t_const was certified on all pairs.
  bool exhaustive() const { return exhaustive_; }

 private:
  std::vector<CurveFunction> curves_;
  Interval interval_;
  int grid_n_ = kDefaultGridN;
  TransversalityEstimate estimate_;
  double c2_bound_ = 0.0;
  bool exhaustive_ = true;
};

// All-pairs estimate. Throws IdenticalCurves naming the first duplicate pair.
TransversalityEstimate estimate_transversality_constant(const std::vector<CurveFunction>& curves,
                                                        int grid_n = kDefaultGridN);
inline TransversalityEstimate estimate_transversality_constant(const TransversalFamily& F) {
  return estimate_transversality_constant(F.curves(), F.grid_n());
}

class ConvexSeed {
 public:
  ConvexSeed(Evaluator g0, Evaluator g1, Evaluator g2, Evaluator g3, std::string name = "custom");

  static ConvexSeed parabola(double c = 1.0);  // c x^2
  static ConvexSeed exponential();             // e^x
  static ConvexSeed cosh();

  const Evaluator& g0() const { return g0_; }
  const Evaluator& g1() const { return g1_; }
  const Evaluator& g2() const { return g2_; }
  const Evaluator& g3() const { return g3_; }
  double frak_G() const { return frak_G_; }
  double frak_g() const { return frak_g_; }
  const std::string& name() const { return name_; }

 private:
  Evaluator g0_, g1_, g2_, g3_;
  double frak_G_ = 0.0, frak_g_ = 0.0;
  std::string name_;
};

struct Center {
  double a = 0.0, b = 0.0;
};

// g_z(x) = g(x - a) + b on [x0 - 5, x0 + 5].
CurveFunction convex_translate(const ConvexSeed& seed, Center z, double x0);

struct ConvexTranslateFamily {
  TransversalFamily family;
  // min and max of ||g_z1 - g_z2|| / |z1 - z2| over the checked pairs
  double comparability_lower = 0.0;
  double comparability_upper = 0.0;
};

// Pairs beyond max_exact_pairs are checked on a deterministic subsample for
// the comparability constants; the transversality estimate is always exhaustive.
ConvexTranslateFamily convex_translate_family(const ConvexSeed& seed,
                                              const std::vector<Center>& centers, double x0,
                                              int grid_n = kDefaultGridN);

// (f - f0) / r0 for every curve.
TransversalFamily rescale_ball(const TransversalFamily& F, const CurveFunction& f0, double r0);
CurveFunction rescale_ball(const CurveFunction& f, const CurveFunction& f0, double r0);

struct WindowRescale {
  TransversalFamily family;
  double t_in = 1.0;
  double t_out = 1.0;
  double bound = 0.0;  // |J| t_in + 1 + grid tolerance
  bool within_bound = true;
};

// x -> (f(r x + x0) - y0) / r on J.
WindowRescale rescale_window(const TransversalFamily& F, double x0, double y0, double r,
                             Interval J);

struct IntersectionReport {
  std::vector<Interval> components;  // open intervals
  double distance = 0.0;             // C^2 distance of f and g
  bool resolution_warning = false;
  double max_length() const;
};

// Components of {x in interior(I) : |f - g| < 2r}; endpoints refined by bisection.
IntersectionReport intersection_components(const CurveFunction& f, const CurveFunction& g,
                                           double r, int grid_n = kDefaultGridN);

}  // namespace furstlab::family
