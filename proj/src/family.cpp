#include "furstlab/family.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "furstlab/error.hpp"
#include "furstlab/parallel.hpp"
#include "furstlab/rng.hpp"

namespace furstlab::family {

namespace {

void check_grid(int grid_n) {
  if (grid_n < 2) fail(ErrorKind::InvalidArgument, "grid_n must be at least 2");
}

bool same_interval(const Interval& a, const Interval& b) { return a.lo == b.lo && a.hi == b.hi; }

std::vector<std::vector<Jet>> sample_all(const std::vector<CurveFunction>& curves, int grid_n) {
  std::vector<std::vector<Jet>> out(curves.size());
  parallel_for(curves.size(), [&](std::size_t i) { out[i] = sample(curves[i], grid_n); });
  return out;
}

std::string pair_name(std::size_t i, std::size_t j) {
  std::ostringstream os;
  os << "(" << i << ", " << j << ")";
  return os.str();
}

double interp(const std::vector<double>& ys, const Interval& I, double x) {
  const double n1 = static_cast<double>(ys.size() - 1);
  double u = (x - I.lo) / I.length() * n1;
  u = std::clamp(u, 0.0, n1);
  auto k = static_cast<std::size_t>(std::floor(u));
  if (k >= ys.size() - 1) return ys.back();
  const double w = u - static_cast<double>(k);
  return ys[k] * (1.0 - w) + ys[k + 1] * w;
}

}  // namespace

CurveFunction::CurveFunction(Interval interval, Evaluator f, Evaluator df, Evaluator d2f,
                             std::vector<double> params, FamilyTag tag)
    : interval_(interval),
      f_(std::move(f)),
      df_(std::move(df)),
      d2f_(std::move(d2f)),
      params_(std::move(params)),
      tag_(tag) {
  if (!(interval_.hi > interval_.lo)) fail(ErrorKind::InvalidArgument, "empty curve interval");
}

CurveFunction CurveFunction::affine(Interval interval, double a, double b) {
  CurveFunction c(
      interval, [a, b](double x) { return a * x + b; }, [a](double) { return a; },
      [](double) { return 0.0; }, {a, b}, FamilyTag::Affine);
  c.d3_bound_ = 0.0;
  return c;
}

CurveFunction CurveFunction::tabulated(Interval interval, std::vector<double> samples) {
  if (samples.size() < 3) fail(ErrorKind::InvalidArgument, "tabulated curve needs 3 samples");
  const double h = interval.length() / static_cast<double>(samples.size() - 1);
  auto ys = std::make_shared<std::vector<double>>(std::move(samples));
  auto v = [ys, interval](double x) { return interp(*ys, interval, x); };
  auto d1 = [v, h, interval](double x) {
    if (x - h < interval.lo) return (v(x + h) - v(x)) / h;
    if (x + h > interval.hi) return (v(x) - v(x - h)) / h;
    return (v(x + h) - v(x - h)) / (2.0 * h);
  };
  auto d2 = [v, h, interval](double x) {
    const double c = std::clamp(x, interval.lo + h, interval.hi - h);
    return (v(c + h) - 2.0 * v(c) + v(c - h)) / (h * h);
  };
  CurveFunction c(interval, v, d1, d2, {}, FamilyTag::Custom);
  c.approximate_ = true;
  return c;
}

std::vector<Jet> sample(const CurveFunction& f, int grid_n) {
  check_grid(grid_n);
  std::vector<Jet> out(static_cast<std::size_t>(grid_n));
  const Interval& I = f.interval();
  for (int k = 0; k < grid_n; ++k) {
    const double x = I.grid_point(k, grid_n);
    Jet j{f.value(x), f.d1(x), f.d2(x)};
    if (!std::isfinite(j.v0) || !std::isfinite(j.v1) || !std::isfinite(j.v2)) {
      std::ostringstream os;
      os.precision(17);
      os << "non-finite curve evaluation at x = " << x;
      fail(ErrorKind::Evaluation, os.str());
    }
    out[static_cast<std::size_t>(k)] = j;
  }
  return out;
}

double c2_norm(const CurveFunction& f, int grid_n) {
  double m = 0.0;
  for (const Jet& j : sample(f, grid_n))
    m = std::max(m, std::abs(j.v0) + std::abs(j.v1) + std::abs(j.v2));
  return m;
}

double c2_distance(const std::vector<Jet>& a, const std::vector<Jet>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double s =
        std::abs(a[k].v0 - b[k].v0) + std::abs(a[k].v1 - b[k].v1) + std::abs(a[k].v2 - b[k].v2);
    m = std::max(m, s);
  }
  return m;
}

double transversality_defect(const std::vector<Jet>& a, const std::vector<Jet>& b) {
  double lo = std::numeric_limits<double>::infinity();
  double norm = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d0 = std::abs(a[k].v0 - b[k].v0);
    const double d1 = std::abs(a[k].v1 - b[k].v1);
    const double d2 = std::abs(a[k].v2 - b[k].v2);
    lo = std::min(lo, d0 + d1);
    norm = std::max(norm, d0 + d1 + d2);
  }
  if (norm < 1e-12) fail(ErrorKind::IdenticalCurves, "curves are identical (zero C2 distance)");
  return lo / norm;
}

double c2_distance(const CurveFunction& f, const CurveFunction& g, int grid_n) {
  if (!same_interval(f.interval(), g.interval()))
    fail(ErrorKind::InvalidArgument, "curves live on different intervals");
  return c2_distance(sample(f, grid_n), sample(g, grid_n));
}

double transversality_defect(const CurveFunction& f, const CurveFunction& g, int grid_n) {
  if (!same_interval(f.interval(), g.interval()))
    fail(ErrorKind::InvalidArgument, "curves live on different intervals");
  return transversality_defect(sample(f, grid_n), sample(g, grid_n));
}

namespace {

TransversalityEstimate estimate_from_jets(const std::vector<std::vector<Jet>>& jets) {
  const std::size_t n = jets.size();
  struct Row {
    double min_defect = std::numeric_limits<double>::infinity();
    std::size_t j = 0;
    std::size_t dup = SIZE_MAX;
  };
  std::vector<Row> rows(n);
  parallel_for(n, [&](std::size_t i) {
    Row& r = rows[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (c2_distance(jets[i], jets[j]) < 1e-12) {
        r.dup = j;
        return;
      }
      const double d = transversality_defect(jets[i], jets[j]);
      if (d < r.min_defect) {
        r.min_defect = d;
        r.j = j;
      }
    }
  });
  TransversalityEstimate est;
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].dup != SIZE_MAX)
      fail(ErrorKind::IdenticalCurves, "duplicate curves at indices " + pair_name(i, rows[i].dup));
    if (rows[i].min_defect < est.min_defect) {
      est.min_defect = rows[i].min_defect;
      est.worst_i = i;
      est.worst_j = rows[i].j;
    }
  }
  est.pairs_checked = n * (n - 1) / 2;
  est.t_const = n < 2 ? 1.0 : std::max(1.0, 1.0 / est.min_defect);
  return est;
}

Interval common_interval(const std::vector<CurveFunction>& curves) {
  if (curves.empty()) fail(ErrorKind::InvalidArgument, "family must contain at least one curve");
  const Interval I = curves.front().interval();
  for (const auto& c : curves)
    if (!same_interval(c.interval(), I))
      fail(ErrorKind::InvalidArgument, "all curves of a family must share one interval");
  return I;
}

}  // namespace

TransversalityEstimate estimate_transversality_constant(const std::vector<CurveFunction>& curves,
                                                        int grid_n) {
  check_grid(grid_n);
  common_interval(curves);
  return estimate_from_jets(sample_all(curves, grid_n));
}

TransversalFamily::TransversalFamily(std::vector<CurveFunction> curves, int grid_n)
    : curves_(std::move(curves)), grid_n_(grid_n) {
  check_grid(grid_n);
  interval_ = common_interval(curves_);
  const auto jets = sample_all(curves_, grid_n);
  estimate_ = estimate_from_jets(jets);
  for (const auto& js : jets)
    for (const Jet& j : js)
      c2_bound_ = std::max(c2_bound_, std::abs(j.v0) + std::abs(j.v1) + std::abs(j.v2));
}

TransversalFamily TransversalFamily::with_declared_constant(std::vector<CurveFunction> curves,
                                                            double t_declared, int grid_n,
                                                            std::size_t random_pairs,
                                                            unsigned long long seed) {
  check_grid(grid_n);
  if (!(t_declared >= 1.0)) fail(ErrorKind::InvalidArgument, "declared constant must be >= 1");
  TransversalFamily F;
  F.curves_ = std::move(curves);
  F.grid_n_ = grid_n;
  F.interval_ = common_interval(F.curves_);
  F.exhaustive_ = false;
  const std::size_t n = F.curves_.size();
  const double x0 = 0.5 * (F.interval_.lo + F.interval_.hi);

  std::vector<std::pair<double, double>> img(n);
  for (std::size_t i = 0; i < n; ++i) img[i] = {F.curves_[i].value(x0), F.curves_[i].d1(x0)};
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return img[a] != img[b] ? img[a] < img[b] : a < b;
  });

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  // coincident embedding images: either duplicates or a transversality failure
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const auto& p = img[order[k]];
    const auto& q = img[order[k + 1]];
    if (std::hypot(p.first - q.first, p.second - q.second) <= 1e-12)
      pairs.emplace_back(order[k], order[k + 1]);
  }
  // neighbours in the sorted order, subsampled deterministically
  if (n >= 2) {
    const std::size_t stride = std::max<std::size_t>(1, (n - 1) / random_pairs);
    for (std::size_t k = 0; k + 1 < n; k += stride) pairs.emplace_back(order[k], order[k + 1]);
    Rng rng(seed);
    for (std::size_t k = 0; k < random_pairs; ++k) {
      const std::size_t i = rng.below(n);
      const std::size_t j = rng.below(n);
      if (i != j) pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
  }

  std::vector<double> defects(pairs.size());
  std::vector<double> bounds(pairs.size());
  std::vector<int> dup(pairs.size(), 0);
  parallel_for(pairs.size(), [&](std::size_t k) {
    const auto a = sample(F.curves_[pairs[k].first], grid_n);
    const auto b = sample(F.curves_[pairs[k].second], grid_n);
    if (c2_distance(a, b) < 1e-12) {
      dup[k] = 1;
      return;
    }
    defects[k] = transversality_defect(a, b);
    double m = 0.0;
    for (const auto* js : {&a, &b})
      for (const Jet& j : *js) m = std::max(m, std::abs(j.v0) + std::abs(j.v1) + std::abs(j.v2));
    bounds[k] = m;
  });
  TransversalityEstimate est;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (dup[k])
      fail(ErrorKind::IdenticalCurves,
           "duplicate curves at indices " + pair_name(pairs[k].first, pairs[k].second));
    if (defects[k] * t_declared < 1.0 - 1e-9)
      fail(ErrorKind::Invariant, "pair " + pair_name(pairs[k].first, pairs[k].second) +
                                     " violates the declared transversality constant");
    if (defects[k] < est.min_defect) {
      est.min_defect = defects[k];
      est.worst_i = pairs[k].first;
      est.worst_j = pairs[k].second;
    }
    F.c2_bound_ = std::max(F.c2_bound_, bounds[k]);
  }
  if (n == 1) F.c2_bound_ = c2_norm(F.curves_[0], grid_n);
  est.pairs_checked = pairs.size();
  est.t_const = t_declared;
  F.estimate_ = est;
  return F;
}

ConvexSeed::ConvexSeed(Evaluator g0, Evaluator g1, Evaluator g2, Evaluator g3, std::string name)
    : g0_(std::move(g0)), g1_(std::move(g1)), g2_(std::move(g2)), g3_(std::move(g3)),
      name_(std::move(name)) {
  constexpr int n = 4097;
  const Interval I{-6.0, 6.0};
  frak_g_ = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k) {
    const double x = I.grid_point(k, n);
    const double a = g0_(x), b = g1_(x), c = g2_(x), d = g3_(x);
    if (!std::isfinite(a + b + c + d))
      fail(ErrorKind::Evaluation, "convex seed is not finite on [-6, 6]");
    frak_G_ = std::max(frak_G_, std::abs(a) + std::abs(b) + std::abs(c) + std::abs(d));
    frak_g_ = std::min(frak_g_, c);
  }
  if (!(frak_g_ > 0.0)) fail(ErrorKind::Domain, "convex seed needs min g'' > 0 on [-6, 6]");
}

ConvexSeed ConvexSeed::parabola(double c) {
  return ConvexSeed([c](double x) { return c * x * x; }, [c](double x) { return 2.0 * c * x; },
                    [c](double) { return 2.0 * c; }, [](double) { return 0.0; }, "parabola");
}

ConvexSeed ConvexSeed::exponential() {
  auto e = [](double x) { return std::exp(x); };
  return ConvexSeed(e, e, e, e, "exp");
}

ConvexSeed ConvexSeed::cosh() {
  auto c = [](double x) { return std::cosh(x); };
  auto s = [](double x) { return std::sinh(x); };
  return ConvexSeed(c, s, c, s, "cosh");
}

CurveFunction convex_translate(const ConvexSeed& seed, Center z, double x0) {
  const Interval I{x0 - 5.0, x0 + 5.0};
  if (z.a < x0 - 1.0 || z.a > x0 + 1.0)
    fail(ErrorKind::Domain, "translation center outside [x0 - 1, x0 + 1]");
  auto g0 = seed.g0(), g1 = seed.g1(), g2 = seed.g2();
  const double a = z.a, b = z.b;
  CurveFunction c(
      I, [g0, a, b](double x) { return g0(x - a) + b; }, [g1, a](double x) { return g1(x - a); },
      [g2, a](double x) { return g2(x - a); }, {a, b}, FamilyTag::ConvexTranslate);
  c.set_third_derivative_bound(seed.frak_G());
  return c;
}

ConvexTranslateFamily convex_translate_family(const ConvexSeed& seed,
                                              const std::vector<Center>& centers, double x0,
                                              int grid_n) {
  std::vector<CurveFunction> curves;
  curves.reserve(centers.size());
  for (const auto& z : centers) curves.push_back(convex_translate(seed, z, x0));
  ConvexTranslateFamily out{TransversalFamily(curves, grid_n), 0.0, 0.0};

  const std::size_t n = centers.size();
  if (n < 2) return out;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  constexpr std::size_t max_exact_pairs = 32768;
  if (n * (n - 1) / 2 <= max_exact_pairs) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  } else {
    for (std::size_t k = 0; k < max_exact_pairs; ++k) {
      const std::size_t i = k % n;
      const std::size_t j = (i + 1 + k / n) % n;
      if (i != j) pairs.emplace_back(i, j);
    }
  }
  const auto jets = sample_all(out.family.curves(), grid_n);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (auto [i, j] : pairs) {
    const double dz = std::hypot(centers[i].a - centers[j].a, centers[i].b - centers[j].b);
    const double ratio = c2_distance(jets[i], jets[j]) / dz;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  out.comparability_lower = lo;
  out.comparability_upper = hi;
  return out;
}

CurveFunction rescale_ball(const CurveFunction& f, const CurveFunction& f0, double r0) {
  if (!(r0 > 0.0)) fail(ErrorKind::InvalidArgument, "rescaling radius must be positive");
  if (!f0.interval().contains(f.interval()))
    fail(ErrorKind::Domain, "center curve does not cover the family interval");
  const auto fa = f.f(), fb = f.df(), fc = f.d2f();
  const auto ga = f0.f(), gb = f0.df(), gc = f0.d2f();
  return CurveFunction(
      f.interval(), [=](double x) { return (fa(x) - ga(x)) / r0; },
      [=](double x) { return (fb(x) - gb(x)) / r0; },
      [=](double x) { return (fc(x) - gc(x)) / r0; }, f.params(), FamilyTag::Custom);
}

TransversalFamily rescale_ball(const TransversalFamily& F, const CurveFunction& f0, double r0) {
  std::vector<CurveFunction> out;
  out.reserve(F.size());
  for (const auto& f : F.curves()) out.push_back(rescale_ball(f, f0, r0));
  return TransversalFamily(std::move(out), F.grid_n());
}

WindowRescale rescale_window(const TransversalFamily& F, double x0, double y0, double r,
                             Interval J) {
  if (!(r > 0.0 && r <= 1.0)) fail(ErrorKind::InvalidArgument, "window scale must lie in (0, 1]");
  const Interval& I = F.interval();
  const double slack = 1e-12 * std::max(1.0, I.length());
  if (!(J.hi > J.lo) || r * J.lo + x0 < I.lo - slack || r * J.hi + x0 > I.hi + slack)
    fail(ErrorKind::Domain, "window interval J is not inside (I - x0) / r");
  std::vector<CurveFunction> out;
  out.reserve(F.size());
  for (const auto& f : F.curves()) {
    if (f.tag() == FamilyTag::Affine) {
      const double a = f.params()[0], b = f.params()[1];
      out.push_back(CurveFunction::affine(J, a, (a * x0 + b - y0) / r));
      continue;
    }
    const auto fa = f.f(), fb = f.df(), fc = f.d2f();
    const double lo = I.lo, hi = I.hi;
    auto clampx = [lo, hi](double u) { return std::clamp(u, lo, hi); };
    out.emplace_back(
        J, [=](double x) { return (fa(clampx(r * x + x0)) - y0) / r; },
        [=](double x) { return fb(clampx(r * x + x0)); },
        [=](double x) { return r * fc(clampx(r * x + x0)); }, f.params(), FamilyTag::Custom);
  }
  WindowRescale w{TransversalFamily(std::move(out), F.grid_n()), F.t_const(), 1.0, 0.0, true};
  w.t_out = w.family.t_const();
  w.bound = (J.length() * w.t_in + 1.0) * (1.0 + 10.0 / F.grid_n());
  w.within_bound = w.t_out <= w.bound;
  return w;
}

double IntersectionReport::max_length() const {
  double m = 0.0;
  for (const auto& c : components) m = std::max(m, c.length());
  return m;
}

IntersectionReport intersection_components(const CurveFunction& f, const CurveFunction& g,
                                           double r, int grid_n) {
  if (!(r > 0.0)) fail(ErrorKind::InvalidArgument, "radius must be positive");
  IntersectionReport rep;
  rep.distance = c2_distance(f, g, grid_n);
  if (rep.distance < 1e-12) fail(ErrorKind::IdenticalCurves, "curves are identical");
  const Interval& I = f.interval();
  auto inside = [&](double x) { return std::abs(f.value(x) - g.value(x)) < 2.0 * r; };
  auto crossing = [&](double out_x, double in_x) {
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (out_x + in_x);
      (inside(mid) ? in_x : out_x) = mid;
    }
    return 0.5 * (out_x + in_x);
  };
  std::vector<char> flag(static_cast<std::size_t>(grid_n));
  for (int k = 0; k < grid_n; ++k) flag[static_cast<std::size_t>(k)] = inside(I.grid_point(k, grid_n));
  int k = 0;
  while (k < grid_n) {
    if (!flag[static_cast<std::size_t>(k)]) {
      ++k;
      continue;
    }
    int e = k;
    while (e + 1 < grid_n && flag[static_cast<std::size_t>(e + 1)]) ++e;
    const double a = k == 0 ? I.lo : crossing(I.grid_point(k - 1, grid_n), I.grid_point(k, grid_n));
    const double b =
        e == grid_n - 1 ? I.hi : crossing(I.grid_point(e + 1, grid_n), I.grid_point(e, grid_n));
    rep.components.push_back({a, b});
    if (e - k + 1 < 2) rep.resolution_warning = true;
    k = e + 1;
  }
  return rep;
}

}  // namespace furstlab::family
