#include "furstlab/famspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "furstlab/error.hpp"
#include "furstlab/parallel.hpp"

namespace furstlab::famspace {

using dyadic::Cell;
using dyadic::cell_index;

std::vector<double> c2_distance_matrix(const TransversalFamily& F) {
  const std::size_t n = F.size();
  std::vector<std::vector<family::Jet>> jets(n);
  parallel_for(n, [&](std::size_t i) { jets[i] = family::sample(F[i], F.grid_n()); });
  std::vector<double> d(n * n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = family::c2_distance(jets[i], jets[j]);
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) d[i * n + j] = d[j * n + i];
  return d;
}

FamilyEmbedding embed(const TransversalFamily& F, bool check_pairs) {
  FamilyEmbedding A;
  A.x0 = 0.5 * (F.interval().lo + F.interval().hi);
  A.images.reserve(F.size());
  for (const auto& f : F.curves()) A.images.push_back({f.value(A.x0), f.d1(A.x0)});
  if (!check_pairs) return A;
  A.pairs_checked = true;
  const std::size_t n = F.size();
  const auto dist = c2_distance_matrix(F);
  const double limit = std::sqrt(2.0) * F.t_const() * (1.0 + 1e-6);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double da = dyadic::distance(A.images[i], A.images[j]);
      const double dc = dist[i * n + j];
      const double up = da > 0.0 ? dc / da : std::numeric_limits<double>::infinity();
      const double low = da / dc;
      A.max_upper_ratio = std::max(A.max_upper_ratio, up);
      A.max_lower_ratio = std::max(A.max_lower_ratio, low);
      if (up > limit) A.violations.push_back({i, j, up, true});
      if (low > 1.0 + 1e-12) A.violations.push_back({i, j, low, false});
    }
  return A;
}

std::vector<FamilyDyadicCube> family_dyadic_cubes(const std::vector<Point>& images, int level) {
  std::map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < images.size(); ++i)
    groups[{cell_index(images[i][0], level), cell_index(images[i][1], level)}].push_back(i);
  std::vector<FamilyDyadicCube> cubes;
  cubes.reserve(groups.size());
  for (auto& [key, members] : groups) cubes.push_back({level, key.first, key.second, std::move(members)});
  return cubes;
}

std::size_t family_covering_number(const std::vector<double>& dist, std::size_t n, double r) {
  std::vector<std::size_t> centers;
  for (std::size_t i = 0; i < n; ++i) {
    bool covered = false;
    for (std::size_t c : centers)
      if (dist[c * n + i] <= r) {
        covered = true;
        break;
      }
    if (!covered) centers.push_back(i);
  }
  return centers.size();
}

int lipschitz_threshold(double t_const) {
  return static_cast<int>(std::ceil(std::log2(640.0 * std::pow(t_const, 4))));
}

namespace {

Cell cell_of(const Point& p, int level) {
  return {level, cell_index(p[0], level), cell_index(p[1], level)};
}

}  // namespace

UniformityAudit audit_uniformity(const std::vector<Point>& images, int T, int m) {
  UniformityAudit audit;
  for (int j = 0; j <= m; ++j) {
    std::vector<Cell> cells;
    for (const auto& p : images) cells.push_back(cell_of(p, j * T));
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    audit.cube_counts.push_back(cells.size());
    if (j == 0) continue;
    std::map<Cell, std::uint64_t> children;
    for (const Cell& c : cells) ++children[c.ancestor((j - 1) * T)];
    std::uint64_t first = children.empty() ? 0 : children.begin()->second;
    for (const auto& [parent, count] : children)
      if (count != first) audit.uniform = false;
    audit.N.push_back(first);
  }
  return audit;
}

UniformResult extract_uniform_subset(const std::vector<Point>& images, double t_const, int T,
                                     int m, UniformOptions opts) {
  if (T < 1 || m < 1) fail(ErrorKind::Parameter, "uniformization needs T >= 1 and m >= 1");
  if (m * T > 60) fail(ErrorKind::Parameter, "uniformization depth m T exceeds 60 levels");
  UniformResult res;
  res.threshold = lipschitz_threshold(t_const);
  if (opts.require_lipschitz_threshold && T < res.threshold)
    fail(ErrorKind::Parameter,
         "T = " + std::to_string(T) + " is below ceil(log2(640 T^4)) = " +
             std::to_string(res.threshold) +
             "; the branching function is only guaranteed 3-Lipschitz above it");
  if (images.empty()) fail(ErrorKind::InvalidArgument, "empty family");

  const int fine = m * T;
  std::vector<Cell> leaf_of(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) leaf_of[i] = cell_of(images[i], fine);
  std::vector<Cell> leaves = leaf_of;
  std::sort(leaves.begin(), leaves.end());
  leaves.erase(std::unique(leaves.begin(), leaves.end()), leaves.end());
  res.cubes_before = leaves.size();

  std::vector<std::uint64_t> N(static_cast<std::size_t>(m), 0);
  for (int l = m - 1; l >= 0; --l) {
    const int child_level = (l + 1) * T;
    const int parent_level = l * T;
    std::vector<Cell> children;
    for (const Cell& c : leaves) children.push_back(c.ancestor(child_level));
    std::sort(children.begin(), children.end());
    children.erase(std::unique(children.begin(), children.end()), children.end());
    std::map<Cell, std::vector<Cell>> by_parent;
    for (const Cell& c : children) by_parent[c.ancestor(parent_level)].push_back(c);
    std::map<int, std::uint64_t> class_total;
    for (const auto& [p, kids] : by_parent)
      class_total[static_cast<int>(std::floor(std::log2(static_cast<double>(kids.size()))))] += kids.size();
    int best_k = 0;
    std::uint64_t best_total = 0;
    for (const auto& [k, total] : class_total)
      if (total > best_total) {
        best_total = total;
        best_k = k;
      }
    const std::uint64_t keep = 1ULL << best_k;
    std::vector<Cell> kept_children;
    for (const auto& [p, kids] : by_parent) {
      if (static_cast<int>(std::floor(std::log2(static_cast<double>(kids.size())))) != best_k) continue;
      kept_children.insert(kept_children.end(), kids.begin(), kids.begin() + static_cast<std::ptrdiff_t>(keep));
    }
    std::sort(kept_children.begin(), kept_children.end());
    std::vector<Cell> next;
    for (const Cell& c : leaves)
      if (std::binary_search(kept_children.begin(), kept_children.end(), c.ancestor(child_level)))
        next.push_back(c);
    leaves = std::move(next);
    N[static_cast<std::size_t>(l)] = keep;
  }
  res.cubes_after = leaves.size();
  for (std::size_t i = 0; i < images.size(); ++i)
    if (std::binary_search(leaves.begin(), leaves.end(), leaf_of[i])) res.subset.push_back(i);
  res.structure.T = T;
  res.structure.m = m;
  res.structure.N = N;
  for (int j = 0; j <= m; ++j) {
    std::vector<Cell> cells;
    for (const Cell& c : leaves) cells.push_back(c.ancestor(j * T));
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    res.structure.cube_counts.push_back(cells.size());
  }
  res.guaranteed = std::pow(6.0 * T, -m) * static_cast<double>(res.cubes_before);
  return res;
}

UniformResult extract_uniform_subset(const TransversalFamily& F, int T, int m,
                                     UniformOptions opts) {
  return extract_uniform_subset(embed(F, false).images, F.t_const(), T, m, opts);
}

PiecewiseLinear::PiecewiseLinear(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) fail(ErrorKind::InvalidArgument, "piecewise linear function needs a value at 0");
}

double PiecewiseLinear::operator()(double x) const {
  const double mm = static_cast<double>(m());
  x = std::clamp(x, 0.0, mm);
  const double fl = std::floor(x);
  const auto k = static_cast<std::size_t>(fl);
  if (k >= values_.size() - 1) return values_.back();
  const double w = x - fl;
  return values_[k] + w * (values_[k + 1] - values_[k]);
}

double PiecewiseLinear::lipschitz() const {
  double L = 0.0;
  for (std::size_t k = 0; k + 1 < values_.size(); ++k) L = std::max(L, std::abs(values_[k + 1] - values_[k]));
  return L;
}

BranchingFunction branching_function(const UniformStructure& s) {
  std::vector<double> v{0.0};
  double acc = 0.0;
  for (std::uint64_t n : s.N) {
    if (n == 0) fail(ErrorKind::InvalidArgument, "branching numbers must be positive");
    acc += std::log2(static_cast<double>(n));
    v.push_back(acc / s.T);
  }
  return {s.T, PiecewiseLinear(std::move(v))};
}

namespace {

// Breakpoints of f inside [a, b] together with the endpoints.
std::vector<double> probe_points(double a, double b) {
  std::vector<double> xs{a};
  for (double k = std::ceil(a); k < b; k += 1.0)
    if (k > a) xs.push_back(k);
  xs.push_back(b);
  return xs;
}

constexpr double kSlack = 1e-12;

}  // namespace

CheckResult check_superlinear(const PiecewiseLinear& f, double sigma, double eps, double a,
                              double b) {
  CheckResult r;
  const double fa = f(a);
  for (double x : probe_points(a, b)) {
    const double gap = fa + sigma * (x - a) - eps * (b - a) - f(x);
    r.max_violation = std::max(r.max_violation, gap);
  }
  r.holds = r.max_violation <= kSlack;
  return r;
}

CheckResult check_linear(const PiecewiseLinear& f, double sigma, double eps, double a, double b) {
  CheckResult r;
  const double fa = f(a);
  for (double x : probe_points(a, b)) {
    const double gap = std::abs(f(x) - fa - sigma * (x - a)) - eps * std::abs(b - a);
    r.max_violation = std::max(r.max_violation, gap);
  }
  r.holds = r.max_violation <= kSlack;
  return r;
}

CheckResult check_two_slope_floor(const PiecewiseLinear& f, double s, double u, double eps,
                                  double c, double d) {
  auto xs = probe_points(c, d);
  if (u != s) {
    const double cross = (f(d) - s * d - f(c) + u * c) / (u - s);
    if (cross > c && cross < d) xs.push_back(cross);
  }
  CheckResult r;
  for (double x : xs) {
    const double floor_val = std::min(f(c) + u * (x - c), f(d) - s * (d - x)) - eps * (d - c);
    r.max_violation = std::max(r.max_violation, floor_val - f(x));
  }
  r.holds = r.max_violation <= kSlack;
  return r;
}

StructuredIntervals find_structured_intervals(const PiecewiseLinear& beta, double s, double t,
                                              double u, double eps) {
  if (!(s <= t && t <= u)) fail(ErrorKind::Parameter, "slopes must satisfy s <= t <= u");
  if (std::abs(beta(0.0)) > kSlack) fail(ErrorKind::Invariant, "branching function must vanish at 0");
  if (beta.lipschitz() > 3.0 + kSlack) fail(ErrorKind::Invariant, "branching function is not 3-Lipschitz");
  const int m = beta.m();
  std::vector<std::vector<StructuredInterval>> per_c(static_cast<std::size_t>(std::max(m, 0)));
  parallel_for(per_c.size(), [&](std::size_t cc) {
    const int c = static_cast<int>(cc);
    for (int d = c + 1; d <= m; ++d) {
      const double slope = beta.slope(c, d);
      if (slope < s - kSlack || slope > u + kSlack) continue;
      if (check_linear(beta, slope, eps, c, d).holds)
        per_c[cc].push_back({c, d, 'a', slope});
      else if (check_superlinear(beta, slope, eps, c, d).holds &&
               check_two_slope_floor(beta, s, u, eps, c, d).holds)
        per_c[cc].push_back({c, d, 'b', slope});
    }
  });
  std::vector<StructuredInterval> all;
  for (auto& v : per_c) all.insert(all.end(), v.begin(), v.end());
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
    const int lx = x.d - x.c, ly = y.d - y.c;
    return lx != ly ? lx > ly : x.c < y.c;
  });
  StructuredIntervals out;
  int covered = 0;
  for (const auto& cand : all) {
    bool clash = false;
    for (const auto& k : out.intervals)
      if (cand.c < k.d && k.c < cand.d) {
        clash = true;
        break;
      }
    if (clash) continue;
    out.intervals.push_back(cand);
    covered += cand.d - cand.c;
  }
  std::sort(out.intervals.begin(), out.intervals.end(),
            [](const auto& x, const auto& y) { return x.c < y.c; });
  out.leftover_ratio = m > 0 ? static_cast<double>(m - covered) / m : 0.0;
  out.min_length = 0;
  for (const auto& k : out.intervals)
    out.min_length = out.min_length == 0 ? k.d - k.c : std::min(out.min_length, k.d - k.c);
  return out;
}

}  // namespace furstlab::famspace
