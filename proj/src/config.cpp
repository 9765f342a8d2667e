#include "furstlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "furstlab/error.hpp"
#include "furstlab/famspace.hpp"
#include "furstlab/incidence.hpp"
#include "furstlab/parallel.hpp"
#include "furstlab/rng.hpp"

namespace furstlab::config {

using family::ConvexSeed;
using family::CurveFunction;
using family::Interval;

namespace {

constexpr double kLineHalfWidth = 2.0;

void check_common(int level, double s, double t, int T) {
  if (T < 1) fail(ErrorKind::Parameter, "T must be >= 1");
  if (level < 0 || level % T != 0) fail(ErrorKind::Parameter, "delta exponent must be a multiple of T");
  if (!(s >= 0.0 && s <= 1.0)) fail(ErrorKind::Parameter, "s must lie in [0, 1]");
  if (!(t >= 0.0 && t <= 2.0)) fail(ErrorKind::Parameter, "t must lie in [0, 2]");
}

ConvexSeed seed_for(CurveKind kind, const BuildOptions& opts) {
  switch (kind) {
    case CurveKind::Parabola:
      return ConvexSeed::parabola(0.5);
    case CurveKind::Exponential:
      return ConvexSeed::exponential();
    case CurveKind::Convex:
      if (!opts.convex_seed) fail(ErrorKind::InvalidArgument, "convex kind needs a seed function");
      return *opts.convex_seed;
    case CurveKind::Affine:
      break;
  }
  fail(ErrorKind::InvalidArgument, "affine kind has no convex seed");
}

// Differences of affine maps, or of translates of a parabola, are affine:
// on an interval of length L their defect is at least 1 / (1 + L).
double affine_difference_constant(const Interval& I) { return 1.0 + I.length(); }

// Translates e^{x-a} + b differ by A e^x + c. With u = e^x and rho = c / A the
// pair ratio is (|u + rho| + 2u) / (|u + rho| + u) up to the extremes in u: the
// numerator is convex in u, the denominator piecewise linear with a kink at
// u = -rho. The continuous ratio dominates the grid-measured one.
double exp_translate_constant(const std::vector<CurveFunction>& curves) {
  const Interval I = curves.front().interval();
  const double u0 = std::exp(I.lo), u1 = std::exp(I.hi);
  const std::size_t n = curves.size();
  std::vector<double> ea(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    ea[i] = std::exp(-curves[i].params()[0]);
    b[i] = curves[i].params()[1];
  }
  double worst = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double A = ea[i] - ea[j];
      if (A == 0.0) continue;
      const double rho = (b[i] - b[j]) / A;
      const double num = std::max(std::abs(u0 + rho) + 2 * u0, std::abs(u1 + rho) + 2 * u1);
      double den = std::min(std::abs(u0 + rho) + u0, std::abs(u1 + rho) + u1);
      if (-rho > u0 && -rho < u1) den = std::min(den, -rho);
      worst = std::max(worst, num / den);
    }
  return worst * (1.0 + 1e-9);
}

TransversalFamily certified_family(std::vector<CurveFunction> curves, CurveKind kind, int grid_n,
                                   std::uint64_t seed) {
  if (curves.size() <= 96) return TransversalFamily(std::move(curves), grid_n);
  double declared;
  if (kind == CurveKind::Affine || kind == CurveKind::Parabola) {
    declared = affine_difference_constant(curves.front().interval());
  } else if (kind == CurveKind::Exponential) {
    declared = exp_translate_constant(curves);
  } else {
    // reference estimate on an evenly spaced subsample, with margin
    std::vector<CurveFunction> sub;
    const std::size_t stride = curves.size() / 96;
    for (std::size_t i = 0; i < curves.size() && sub.size() < 96; i += stride) sub.push_back(curves[i]);
    declared = 1.25 * family::estimate_transversality_constant(sub, grid_n).t_const;
  }
  try {
    return TransversalFamily::with_declared_constant(std::move(curves), declared, grid_n, 256, seed);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Invariant)
      fail(ErrorKind::Invariant, std::string("construction error: ") + e.what());
    throw;
  }
}

std::vector<CurveFunction> curves_from_parameters(CurveKind kind, const std::vector<Point>& params,
                                                  const BuildOptions& opts) {
  std::vector<CurveFunction> curves;
  curves.reserve(params.size());
  if (kind == CurveKind::Affine) {
    for (const auto& p : params)
      curves.push_back(CurveFunction::affine({-kLineHalfWidth, kLineHalfWidth}, p[0] - 0.5, p[1]));
    return curves;
  }
  const ConvexSeed g = seed_for(kind, opts);
  for (const auto& p : params) curves.push_back(family::convex_translate(g, {p[0] - 0.5, p[1]}, 0.0));
  return curves;
}

std::vector<Cell> squares_on_graph(const CurveFunction& f, const std::vector<Point>& columns,
                                   int level) {
  std::vector<Cell> out;
  out.reserve(columns.size());
  for (const auto& c : columns) {
    const double x = c[0];
    out.push_back({level, dyadic::cell_index(x, level), dyadic::cell_index(f.value(x), level)});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t common_cardinality(const std::vector<std::vector<Cell>>& squares) {
  if (squares.empty()) return 0;
  const std::size_t M = squares.front().size();
  for (const auto& P : squares)
    if (P.size() != M) return 0;
  return M;
}

std::vector<Point> centers(const std::vector<Cell>& cells) {
  std::vector<Point> pts;
  pts.reserve(cells.size());
  for (const auto& c : cells) pts.push_back({c.cx(), c.cy()});
  return pts;
}

// Indices of the curves whose square sets are audited.
std::vector<std::size_t> audit_selection(std::size_t n, std::size_t M, double budget) {
  const double full_cost = static_cast<double>(n) * static_cast<double>(M) * static_cast<double>(M);
  std::size_t k = n;
  if (full_cost > budget && M > 0)
    k = std::max<std::size_t>(
        std::min<std::size_t>(n, 64),
        static_cast<std::size_t>(budget / (static_cast<double>(M) * static_cast<double>(M))));
  k = std::min(k, n);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < k; ++i) idx.push_back(i * n / k);
  return idx;
}

struct Constants {
  double family = -1.0;
  double squares = -1.0;
  std::size_t audited = 0;
};

Constants measure_constants(const NiceConfiguration& conf, double budget) {
  Constants c;
  if (conf.F.size() == 0) return c;
  if (!conf.parameters.empty()) {
    dyadic::DiscretePointSet params(2, conf.parameters, conf.level);
    c.family = dyadic::delta_set_constant(params, conf.level, conf.t).best_constant;
  }
  const auto idx = audit_selection(conf.squares.size(), conf.M, budget);
  std::vector<double> per(idx.size(), 0.0);
  parallel_for(idx.size(), [&](std::size_t k) {
    const auto& P = conf.squares[idx[k]];
    if (P.empty()) return;
    dyadic::DiscretePointSet set(2, centers(P), conf.level);
    per[k] = dyadic::delta_set_constant(set, conf.level, conf.s).best_constant;
  });
  c.squares = idx.empty() ? -1.0 : *std::max_element(per.begin(), per.end());
  c.audited = idx.size();
  return c;
}

double log_delta(double ratio, int level) {
  // log_delta(x) = log2(x) / log2(delta) = -log2(x) / level
  if (level == 0) return 0.0;
  return -std::log2(ratio) / static_cast<double>(level);
}

}  // namespace

std::string kind_name(CurveKind kind) {
  switch (kind) {
    case CurveKind::Affine:
      return "affine";
    case CurveKind::Parabola:
      return "parabola";
    case CurveKind::Exponential:
      return "exp";
    case CurveKind::Convex:
      return "convex";
  }
  return "custom";
}

CurveKind parse_kind(const std::string& name) {
  if (name == "affine" || name == "line") return CurveKind::Affine;
  if (name == "parabola") return CurveKind::Parabola;
  if (name == "exp" || name == "exponential") return CurveKind::Exponential;
  fail(ErrorKind::InvalidArgument, "unknown curve kind '" + name + "'");
}

NiceConfiguration build_nice_configuration(CurveKind kind, int level, double s, double t, int T,
                                           std::uint64_t seed, const BuildOptions& opts) {
  check_common(level, s, t, T);
  NiceConfiguration conf;
  conf.kind = kind_name(kind);
  conf.level = level;
  conf.s = s;
  conf.t = t;
  conf.T = T;
  conf.seed = seed;

  const auto params = dyadic::generate_delta_set(2, level, t, T, mix_seed(seed, 0));
  conf.parameters = params.points();
  conf.F = certified_family(curves_from_parameters(kind, conf.parameters, opts), kind, opts.grid_n,
                            mix_seed(seed, 1u << 30));

  const std::size_t n = conf.F.size();
  conf.squares.resize(n);
  std::vector<Point> shared;
  if (opts.correlated) shared = dyadic::generate_delta_set(1, level, s, T, mix_seed(seed, 1)).points();
  parallel_for(n, [&](std::size_t i) {
    if (opts.correlated) {
      conf.squares[i] = squares_on_graph(conf.F[i], shared, level);
    } else {
      const auto cols = dyadic::generate_delta_set(1, level, s, T, mix_seed(seed, i + 1));
      conf.squares[i] = squares_on_graph(conf.F[i], cols.points(), level);
    }
  });
  conf.M = common_cardinality(conf.squares);
  if (opts.audit) {
    const auto c = measure_constants(conf, opts.audit_budget);
    conf.C_family = c.family;
    conf.C_squares = c.squares;
    conf.audited_curves = c.audited;
  }
  return conf;
}

NiceConfiguration make_configuration(TransversalFamily F, std::vector<std::vector<Cell>> squares,
                                     int level, double s, double t) {
  if (squares.size() != F.size())
    fail(ErrorKind::InvalidArgument, "need one square list per curve");
  NiceConfiguration conf;
  conf.level = level;
  conf.s = s;
  conf.t = t;
  conf.F = std::move(F);
  for (auto& P : squares) std::sort(P.begin(), P.end());
  conf.squares = std::move(squares);
  conf.M = common_cardinality(conf.squares);
  return conf;
}

bool graph_meets_square(const CurveFunction& f, const Cell& p, double lipschitz) {
  const double d = dyadic::side(p.level);
  const double x0 = std::ldexp(static_cast<double>(p.ix), -p.level);
  const double y0 = std::ldexp(static_cast<double>(p.iy), -p.level);
  const double lo = std::max(x0, f.interval().lo), hi = std::min(x0 + d, f.interval().hi);
  if (lo > hi) return false;
  auto probe = [&](int n, double* gap) {
    int prev_side = 0;
    *gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
      const double x = lo + (hi - lo) * k / (n - 1);
      const double y = f.value(x);
      const int side = y < y0 ? -1 : (y > y0 + d ? 1 : 0);
      if (side == 0) return true;
      if (prev_side != 0 && side != prev_side) return true;  // crossed the strip
      prev_side = side;
      *gap = std::min(*gap, side < 0 ? y0 - y : y - y0 - d);
    }
    return false;
  };
  double gap = 0.0;
  if (probe(9, &gap)) return true;
  // Between samples f moves by at most lipschitz * step / 2 from the nearer one.
  if (gap > lipschitz * (hi - lo) / 16.0) return false;
  return probe(257, &gap);
}

NiceReport verify_nice(const NiceConfiguration& conf, bool measure) {
  NiceReport rep;
  const double delta = conf.delta();
  const std::size_t n = conf.F.size();
  auto flag = [&](const std::string& what, std::size_t f, std::size_t p) {
    if (!rep.ok) return;
    rep.ok = false;
    rep.failure = what;
    rep.bad_curve = f;
    rep.bad_square = p;
  };

  if (conf.squares.size() != n) {
    rep.cardinality_ok = false;
    flag("square lists do not match the family", 0, 0);
    return rep;
  }
  const std::size_t M = n ? conf.squares.front().size() : 0;
  for (std::size_t i = 0; i < n; ++i)
    if (conf.squares[i].size() != M) {
      rep.cardinality_ok = false;
      flag("|P(f)| differs from M at curve " + std::to_string(i), i, 0);
      break;
    }

  for (std::size_t i = 0; i < n && rep.squares_valid; ++i) {
    const auto& P = conf.squares[i];
    for (std::size_t k = 0; k < P.size(); ++k) {
      if (P[k].level != conf.level || (k > 0 && P[k] == P[k - 1])) {
        rep.squares_valid = false;
        flag("square " + std::to_string(k) + " of curve " + std::to_string(i) +
                 " is repeated or at the wrong level",
             i, k);
        break;
      }
    }
  }

  // Lipschitz bound for the interval fallback: sup |f'| on the sampled grid
  // plus a margin of sup |f''| times the grid step.
  struct Miss {
    bool hit = true;
    std::size_t square = 0;
    double gap = 0.0;
  };
  std::vector<Miss> misses(n);
  parallel_for(n, [&](std::size_t i) {
    const auto& f = conf.F[i];
    const auto& P = conf.squares[i];
    double lip = 0.0;
    for (const auto& p : P) lip = std::max(lip, std::abs(f.d1(p.cx())) + delta * std::abs(f.d2(p.cx())));
    lip = lip * 2.0 + 1e-12;
    for (std::size_t k = 0; k < P.size(); ++k) {
      const auto& p = P[k];
      const double x = p.cx();
      double gap = 0.0;
      if (f.interval().contains(x)) gap = std::abs(f.value(x) - p.cy()) / delta;
      misses[i].gap = std::max(misses[i].gap, gap);
      if (misses[i].hit && !graph_meets_square(f, p, lip)) {
        misses[i].hit = false;
        misses[i].square = k;
      }
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    rep.max_graph_gap = std::max(rep.max_graph_gap, misses[i].gap);
    if (!misses[i].hit && rep.graphs_hit) {
      rep.graphs_hit = false;
      const auto& p = conf.squares[i][misses[i].square];
      flag("square (" + std::to_string(p.ix) + ", " + std::to_string(p.iy) + ") of curve " +
               std::to_string(i) + " misses the graph",
           i, misses[i].square);
    }
  }

  if (n >= 2) {
    const auto sep = incidence::check_separation(conf.F, conf.level);
    rep.separated = sep.separated;
    rep.separation_margin = std::isfinite(sep.min_distance) ? sep.min_distance / delta
                                                            : std::numeric_limits<double>::infinity();
    if (!sep.separated)
      flag("curves " + std::to_string(sep.i) + " and " + std::to_string(sep.j) +
               " are closer than delta",
           sep.i, 0);
  } else {
    rep.separation_margin = std::numeric_limits<double>::infinity();
  }

  if (measure && rep.cardinality_ok) {
    const auto c = measure_constants(conf, 2e7);
    rep.C_family = c.family;
    rep.C_squares = c.squares;
    rep.audited_curves = c.audited;
  }
  return rep;
}

std::vector<Cell> union_of_squares(const NiceConfiguration& conf) {
  std::size_t total = 0;
  for (const auto& P : conf.squares) total += P.size();
  std::vector<Cell> all;
  all.reserve(total);
  for (const auto& P : conf.squares) all.insert(all.end(), P.begin(), P.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

double furstenberg_bound(int level, double s, double t, std::size_t M) {
  const double L = static_cast<double>(level);
  const double e = std::min({t, 0.5 * (s + t), 1.0});
  return std::exp2(e * L) * static_cast<double>(M);
}

ExperimentResult furstenberg_experiment(const NiceConfiguration& conf) {
  ExperimentResult r;
  r.kind = conf.kind;
  r.level = conf.level;
  r.s = conf.s;
  r.t = conf.t;
  r.T = conf.T;
  r.seed = conf.seed;
  r.F_size = conf.F.size();
  r.M = conf.M;
  r.P_size = union_of_squares(conf).size();
  r.bound = furstenberg_bound(conf.level, conf.s, conf.t, conf.M);
  if (r.bound > 0.0 && r.P_size > 0)
    r.eta_emp = std::max(0.0, log_delta(static_cast<double>(r.P_size) / r.bound, conf.level));
  return r;
}

NiceConfiguration katz_tao_configuration(int level, double s, int T, std::uint64_t seed,
                                         const BuildOptions& opts) {
  check_common(level, s, s, T);
  NiceConfiguration conf;
  conf.kind = "katz-tao";
  conf.level = level;
  conf.s = s;
  conf.t = s;
  conf.T = T;
  conf.seed = seed;
  const auto n = static_cast<std::size_t>(std::llround(std::exp2(s * level)));
  Rng rng(mix_seed(seed, 0));
  const double offset = rng.uniform();
  const ConvexSeed g = ConvexSeed::parabola(0.5);
  std::vector<CurveFunction> curves;
  for (std::size_t i = 0; i < n; ++i) {
    const double b = (static_cast<double>(i) + offset) / static_cast<double>(n);
    conf.parameters.push_back({0.5, b});
    curves.push_back(family::convex_translate(g, {0.0, b}, 0.0));
  }
  conf.F = certified_family(std::move(curves), CurveKind::Parabola, opts.grid_n, mix_seed(seed, 1u << 30));
  conf.squares.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const auto cols = dyadic::generate_delta_set(1, level, s, T, mix_seed(seed, i + 1));
    conf.squares[i] = squares_on_graph(conf.F[i], cols.points(), level);
  });
  conf.M = common_cardinality(conf.squares);
  if (opts.audit) {
    const auto c = measure_constants(conf, opts.audit_budget);
    conf.C_family = c.family;
    conf.C_squares = c.squares;
    conf.audited_curves = c.audited;
  }
  return conf;
}

EndpointReport endpoint_checks(const NiceConfiguration& conf) {
  EndpointReport rep;
  if (conf.F.size() == 0) fail(ErrorKind::InvalidArgument, "empty configuration");
  std::vector<Point> pts = conf.parameters;
  if (pts.empty()) pts = famspace::embed(conf.F, false).images;
  dyadic::DiscretePointSet set(2, pts, conf.level);
  rep.katz_tao_K = dyadic::katz_tao_constant(set, conf.level, conf.s).best_constant;
  rep.delta_set_C = dyadic::delta_set_constant(set, conf.level, 2.0 - conf.s).best_constant;
  rep.P_size = union_of_squares(conf).size();
  const double P = static_cast<double>(rep.P_size);
  const double M = static_cast<double>(conf.M);
  rep.ratio_dense = M > 0 ? P / (std::exp2(conf.level) * M) : 0.0;
  rep.ratio_katz_tao = M > 0 ? P / (static_cast<double>(conf.F.size()) * M) : 0.0;
  if (rep.ratio_dense > 0) rep.eps_dense = std::max(0.0, log_delta(rep.ratio_dense, conf.level));
  if (rep.ratio_katz_tao > 0)
    rep.eps_katz_tao = std::max(0.0, log_delta(rep.ratio_katz_tao, conf.level));
  return rep;
}

SpacingReport semi_well_spaced_check(const std::vector<Point>& pts, int level, int Delta_level,
                                     double eps, double s) {
  if (pts.empty()) fail(ErrorKind::InvalidArgument, "empty family");
  if (Delta_level < 0 || Delta_level > level)
    fail(ErrorKind::Parameter, "Delta must lie in [delta, 1]");
  dyadic::DiscretePointSet set(2, pts, level);
  const double n = static_cast<double>(pts.size());
  SpacingReport rep;
  rep.allowance = std::exp2(eps * eps * level);
  for (int j = 0; j <= level; ++j) {
    const double r = dyadic::side(j);
    const double pop = static_cast<double>(dyadic::max_ball_population(set, r).first);
    if (j <= Delta_level) {
      const double ratio = pop / (std::pow(r, 2.0 - s) * n);
      if (ratio > rep.high_ratio) {
        rep.high_ratio = ratio;
        rep.high_radius = r;
      }
    }
    if (j >= Delta_level) {
      const double ratio = pop / std::pow(std::ldexp(1.0, level - j), s);
      if (ratio > rep.low_ratio) {
        rep.low_ratio = ratio;
        rep.low_radius = r;
      }
    }
  }
  rep.high_ok = rep.high_ratio <= rep.allowance;
  rep.low_ok = rep.low_ratio <= rep.allowance;
  return rep;
}

SpacingReport semi_well_spaced_check(const TransversalFamily& F, int level, int Delta_level,
                                     double eps, double s) {
  return semi_well_spaced_check(famspace::embed(F, false).images, level, Delta_level, eps, s);
}

std::vector<Point> product_construction(int level, int Delta_level, double s, std::uint64_t seed) {
  if (Delta_level < 0 || Delta_level > level) fail(ErrorKind::Parameter, "need delta <= Delta <= 1");
  const auto coarse = dyadic::generate_delta_set(2, Delta_level, 2.0 - s, 1, seed);
  const auto per = static_cast<std::int64_t>(std::llround(std::exp2(s * (level - Delta_level))));
  const double D = dyadic::side(Delta_level);
  std::vector<Point> pts;
  for (const auto& c : coarse.points()) {
    const double x0 = c[0] - 0.5 * D, y0 = c[1] - 0.5 * D;
    for (std::int64_t k = 0; k < per; ++k) {
      const double f = (static_cast<double>(k) + 0.5) / static_cast<double>(per);
      pts.push_back({x0 + f * D, y0 + f * D});
    }
  }
  return pts;
}

TransversalFamily line_family(const std::vector<Point>& params, int grid_n) {
  std::vector<CurveFunction> curves;
  curves.reserve(params.size());
  for (const auto& p : params)
    curves.push_back(CurveFunction::affine({-kLineHalfWidth, kLineHalfWidth}, p[1] - 0.5, p[0]));
  return certified_family(std::move(curves), CurveKind::Affine, grid_n, 7);
}

namespace {

// Condition (i): for every rho = Delta^{k eps}, the number of rho-cubes of F
// with a member whose graph meets 6 p^rho is at most Delta^{-eps} rho |D_rho(F)|.
std::vector<char> hypothesis_i_table(const TransversalFamily& F, const std::vector<Point>& images,
                                     int level, int Delta_level, double eps) {
  const std::int64_t side_n = std::int64_t{1} << level;
  std::vector<char> ok(static_cast<std::size_t>(side_n * side_n), 1);
  const int steps = static_cast<int>(std::llround(1.0 / eps));
  const double allowance = std::exp2(eps * Delta_level);
  for (int k = 1; k <= steps; ++k) {
    const int q = static_cast<int>(std::llround(k * eps * Delta_level));
    const double rho = dyadic::side(q);
    const auto cubes = famspace::family_dyadic_cubes(images, q);
    const double limit = allowance * rho * static_cast<double>(cubes.size());
    const std::int64_t qn = std::int64_t{1} << q;
    // per rho-square of [0,1]^2: number of cubes meeting 6 p^rho
    std::vector<std::size_t> hits(static_cast<std::size_t>(qn * qn), 0);
    parallel_for(static_cast<std::size_t>(qn * qn), [&](std::size_t idx) {
      const double cx = dyadic::cell_center(static_cast<std::int64_t>(idx) / qn, q);
      const double cy = dyadic::cell_center(static_cast<std::int64_t>(idx) % qn, q);
      const double xlo = std::max(cx - 3.0 * rho, F.interval().lo);
      const double xhi = std::min(cx + 3.0 * rho, F.interval().hi);
      std::size_t count = 0;
      for (const auto& cube : cubes) {
        for (std::size_t m : cube.members) {
          // graphs are lines here; sampled extremes are exact for them
          double lo = std::numeric_limits<double>::infinity(), hi = -lo;
          for (int j = 0; j <= 16; ++j) {
            const double y = F[m].value(xlo + (xhi - xlo) * j / 16.0);
            lo = std::min(lo, y);
            hi = std::max(hi, y);
          }
          if (hi >= cy - 3.0 * rho && lo <= cy + 3.0 * rho) {
            ++count;
            break;
          }
        }
      }
      hits[idx] = count;
    });
    const int shift = level - q;
    for (std::int64_t ix = 0; ix < side_n; ++ix)
      for (std::int64_t iy = 0; iy < side_n; ++iy) {
        const std::size_t parent = static_cast<std::size_t>((ix >> shift) * qn + (iy >> shift));
        if (static_cast<double>(hits[parent]) > limit) ok[static_cast<std::size_t>(ix * side_n + iy)] = 0;
      }
  }
  return ok;
}

struct MainlemData {
  std::vector<std::vector<std::uint32_t>> profile;
  std::vector<char> hyp_i;
  std::size_t cubes = 0, max_pop = 0;
};

MainlemData mainlem_data(const TransversalFamily& F, int level, int Delta_level, double eps,
                         double lambda) {
  if (!(eps > 0.0 && eps <= 1.0)) fail(ErrorKind::Parameter, "eps must lie in (0, 1]");
  if (Delta_level < 0 || Delta_level > level) fail(ErrorKind::Parameter, "need delta <= Delta");
  if (level > 12) fail(ErrorKind::Parameter, "delta exponent above 12 is not supported here");
  const auto A = famspace::embed(F, false);
  const auto cubes = famspace::family_dyadic_cubes(A, Delta_level);
  MainlemData d;
  d.profile = incidence::cube_incidence_profile(F, cubes, level, lambda);
  d.hyp_i = hypothesis_i_table(F, A.images, level, Delta_level, eps);
  d.cubes = cubes.size();
  for (const auto& c : cubes) d.max_pop = std::max(d.max_pop, c.members.size());
  return d;
}

MainlemCell evaluate_cell(const MainlemData& d, const TransversalFamily& F, int level, double eps,
                          std::size_t a, std::size_t b) {
  MainlemCell c;
  c.a = a;
  c.b = b;
  const double L = static_cast<double>(level);
  const double nF = static_cast<double>(F.size());
  c.hypothesis = a >= 2 && b >= 1 &&
                 static_cast<double>(a) * static_cast<double>(b) >= std::exp2(-(1.0 - 2.0 * eps) * L) * nF;
  for (std::size_t idx = 0; idx < d.profile.size(); ++idx) {
    const auto& counts = d.profile[idx];  // descending
    const auto n_ab = static_cast<std::size_t>(
        std::upper_bound(counts.begin(), counts.end(), static_cast<std::uint32_t>(b),
                         [](std::uint32_t v, std::uint32_t e) { return v > e; }) -
        counts.begin());
    if (n_ab < a) continue;
    ++c.P_ab_without_i;
    if (d.hyp_i[idx]) ++c.P_ab;
  }
  const double ad = static_cast<double>(a), bd = static_cast<double>(b);
  c.bound = std::exp2(10.0 * eps * L) * nF * nF / (ad * ad * ad * bd * bd);
  c.violation = c.hypothesis && static_cast<double>(c.P_ab) > c.bound;
  return c;
}

}  // namespace

MainlemReport mainlem_experiment(const TransversalFamily& F, int level, int Delta_level, double eps,
                                 double lambda) {
  const auto d = mainlem_data(F, level, Delta_level, eps, lambda);
  MainlemReport rep;
  rep.cubes = d.cubes;
  rep.max_population = d.max_pop;
  for (char ok : d.hyp_i) rep.hypothesis_i_squares += ok ? 1 : 0;
  for (std::size_t a = 2; a <= 2 * std::max<std::size_t>(1, d.cubes); a *= 2)
    for (std::size_t b = 1; b <= 2 * std::max<std::size_t>(1, d.max_pop); b *= 2) {
      rep.cells.push_back(evaluate_cell(d, F, level, eps, a, b));
      if (rep.cells.back().violation) ++rep.violations;
    }
  return rep;
}

MainlemCell mainlem_experiment(const TransversalFamily& F, int level, int Delta_level, double eps,
                               std::size_t a, std::size_t b, double lambda) {
  const auto d = mainlem_data(F, level, Delta_level, eps, lambda);
  return evaluate_cell(d, F, level, eps, a, b);
}

}  // namespace furstlab::config
