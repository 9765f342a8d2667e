#include "furstlab/incidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "furstlab/error.hpp"
#include "furstlab/parallel.hpp"

namespace furstlab::incidence {

namespace {

int common_level(const std::vector<Cell>& P) {
  if (P.empty()) return 0;
  const int level = P.front().level;
  for (const auto& p : P)
    if (p.level != level) fail(ErrorKind::InvalidArgument, "squares must share one dyadic level");
  return level;
}

void check_distinct(const std::vector<Cell>& P) {
  std::vector<Cell> s = P;
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end())
    fail(ErrorKind::InvalidArgument, "square list contains duplicates");
}

void check_lambda(double lambda, int level) {
  if (!(lambda > 0.0) || lambda * dyadic::side(level) > 0.5)
    fail(ErrorKind::Parameter, "lambda must satisfy 0 < lambda and lambda * delta <= 1/2");
}

struct Column {
  std::int64_t ix;
  std::vector<std::pair<std::int64_t, std::uint32_t>> rows;  // (iy, square index), sorted
};

std::vector<Column> bucket_columns(const std::vector<Cell>& P) {
  std::vector<std::uint32_t> order(P.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return P[a] < P[b]; });
  std::vector<Column> cols;
  for (std::uint32_t i : order) {
    if (cols.empty() || cols.back().ix != P[i].ix) cols.push_back({P[i].ix, {}});
    cols.back().rows.emplace_back(P[i].iy, i);
  }
  return cols;
}

// Visits the squares of one column whose centers lie within halfwidth of v.
template <class Fn>
void scan_column(const Column& col, int level, double v, double halfwidth, Fn&& fn) {
  const double delta = dyadic::side(level);
  const double lo_d = std::floor((v - halfwidth) / delta - 0.5) - 1.0;
  const double hi_d = std::ceil((v + halfwidth) / delta - 0.5) + 1.0;
  if (!(lo_d < 9e18 && hi_d > -9e18)) return;
  const auto lo = static_cast<std::int64_t>(std::max(lo_d, -9e18));
  const auto hi = static_cast<std::int64_t>(std::min(hi_d, 9e18));
  auto it = std::lower_bound(col.rows.begin(), col.rows.end(),
                             std::make_pair(lo, std::uint32_t{0}));
  for (; it != col.rows.end() && it->first <= hi; ++it)
    if (std::abs(dyadic::cell_center(it->first, level) - v) < halfwidth) fn(it->second);
}

std::uint64_t column_count(const TransversalFamily& F, const std::vector<Cell>& P,
                           double halfwidth, std::vector<IncidencePair>* pairs) {
  if (P.empty() || F.size() == 0) return 0;
  const int level = common_level(P);
  const auto cols = bucket_columns(P);
  std::vector<std::uint64_t> counts(cols.size(), 0);
  std::vector<std::vector<IncidencePair>> found(pairs ? cols.size() : 0);
  parallel_for(cols.size(), [&](std::size_t c) {
    const double x = dyadic::cell_center(cols[c].ix, level);
    for (std::uint32_t f = 0; f < F.size(); ++f) {
      if (!F[f].interval().contains(x)) continue;
      const double v = F[f].value(x);
      scan_column(cols[c], level, v, halfwidth, [&](std::uint32_t sq) {
        ++counts[c];
        if (pairs) found[c].push_back({f, sq});
      });
    }
  });
  std::uint64_t total = 0;
  for (auto n : counts) total += n;
  if (pairs) {
    pairs->clear();
    for (auto& v : found) pairs->insert(pairs->end(), v.begin(), v.end());
    std::sort(pairs->begin(), pairs->end(), [&](const IncidencePair& a, const IncidencePair& b) {
      if (a.curve != b.curve) return a.curve < b.curve;
      return P[a.square] < P[b.square];
    });
  }
  return total;
}

}  // namespace

IncidenceResult incidences(const TransversalFamily& F, const std::vector<Cell>& P, double lambda,
                           bool keep_pairs) {
  const int level = common_level(P);
  check_lambda(lambda, level);
  check_distinct(P);
  IncidenceResult res;
  res.count = column_count(F, P, lambda * dyadic::side(level), keep_pairs ? &res.pairs : nullptr);
  return res;
}

std::uint64_t incidences_brute(const TransversalFamily& F, const std::vector<Cell>& P,
                               double lambda) {
  const int level = common_level(P);
  check_lambda(lambda, level);
  const double L = lambda * dyadic::side(level);
  std::uint64_t n = 0;
  for (const auto& f : F.curves())
    for (const auto& p : P)
      if (in_neighbourhood(f, p, L)) ++n;
  return n;
}

std::uint64_t count_within(const TransversalFamily& F, const std::vector<Cell>& P,
                           double halfwidth) {
  return column_count(F, P, halfwidth, nullptr);
}

double weighted_incidences(const TransversalFamily& F, const std::vector<Cell>& P,
                           const std::vector<double>& wF, const std::vector<double>& wP,
                           double lambda) {
  if (wF.size() != F.size() || wP.size() != P.size())
    fail(ErrorKind::InvalidArgument, "weight vectors must match family and square counts");
  const auto res = incidences(F, P, lambda, true);
  double total = 0.0;
  for (const auto& pr : res.pairs) total += wF[pr.curve] * wP[pr.square];
  return total;
}

double weighted_incidences_brute(const TransversalFamily& F, const std::vector<Cell>& P,
                                 const std::vector<double>& wF, const std::vector<double>& wP,
                                 double lambda) {
  const int level = common_level(P);
  check_lambda(lambda, level);
  const double L = lambda * dyadic::side(level);
  double total = 0.0;
  for (std::size_t f = 0; f < F.size(); ++f)
    for (std::size_t p = 0; p < P.size(); ++p)
      if (in_neighbourhood(F[f], P[p], L)) total += wF[f] * wP[p];
  return total;
}

SeparationReport check_separation(const TransversalFamily& F, int level) {
  const double delta = dyadic::side(level);
  const auto A = famspace::embed(F, false);
  SeparationReport rep;
  rep.min_distance = std::numeric_limits<double>::infinity();
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
  auto b = [delta](double v) { return static_cast<std::int64_t>(std::floor(v / delta)); };
  auto key = [](std::int64_t x, std::int64_t y) {
    return (static_cast<std::uint64_t>(x) << 32) ^ (static_cast<std::uint64_t>(y) & 0xffffffffULL);
  };
  for (std::size_t i = 0; i < A.images.size(); ++i)
    buckets[key(b(A.images[i][0]), b(A.images[i][1]))].push_back(i);
  for (std::size_t i = 0; i < A.images.size(); ++i) {
    const auto bx = b(A.images[i][0]), by = b(A.images[i][1]);
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = buckets.find(key(bx + dx, by + dy));
        if (it == buckets.end()) continue;
        for (std::size_t j : it->second) {
          if (j <= i || dyadic::distance(A.images[i], A.images[j]) >= delta) continue;
          const double d = family::c2_distance(F[i], F[j], F.grid_n());
          if (d < rep.min_distance) {
            rep.min_distance = d;
            rep.i = i;
            rep.j = j;
          }
        }
      }
  }
  rep.separated = !(rep.min_distance < delta * (1.0 - 1e-9));
  return rep;
}

bool HighLowReport::holds_with(double C) const {
  const double rhs = C * static_cast<double>(level) * high_term + low_term;
  return lhs <= rhs * (1.0 + 1e-12);
}

HighLowReport high_low_report(const TransversalFamily& F, const std::vector<Cell>& P,
                              double lambda, double S) {
  const int level = common_level(P);
  const double delta = dyadic::side(level);
  if (lambda < 2.0 || lambda > 0.5 / delta)
    fail(ErrorKind::Parameter, "lambda must lie in [2, 1/(2 delta)]");
  if (S < 2.0 * lambda || S > 1.0 / delta)
    fail(ErrorKind::Parameter, "S must lie in [2 lambda, 1/delta]");
  const auto sep = check_separation(F, level);
  if (!sep.separated)
    fail(ErrorKind::InvalidArgument, "family is not delta-separated: curves " +
                                         std::to_string(sep.i) + " and " + std::to_string(sep.j));
  HighLowReport rep;
  rep.S = S;
  rep.lambda = lambda;
  rep.level = level;
  rep.F_size = F.size();
  rep.P_size = P.size();
  rep.lhs = static_cast<double>(incidences(F, P, lambda, false).count);
  rep.high_term = std::sqrt(S * S * S / delta * static_cast<double>(F.size()) *
                            static_cast<double>(P.size()));
  rep.low_incidences = count_within(F, P, 2.0 * S * delta);
  rep.low_term = static_cast<double>(rep.low_incidences) / S;
  const double denom = static_cast<double>(level) * rep.high_term;
  rep.fitted_C = denom > 0.0 ? std::max(0.0, (rep.lhs - rep.low_term) / denom) : 0.0;
  return rep;
}

namespace {

int dyadic_level_of(double r) {
  int e = 0;
  const double mant = std::frexp(r, &e);
  if (!(r > 0.0) || mant != 0.5) fail(ErrorKind::Parameter, "scale must be a power of two");
  return 1 - e;  // r = 2^(e-1)
}

std::size_t count_cells(const std::vector<famspace::Point>& images,
                        const std::vector<std::size_t>& members, int level) {
  std::vector<std::pair<std::int64_t, std::int64_t>> cells;
  for (std::size_t g : members)
    cells.emplace_back(dyadic::cell_index(images[g][0], level),
                       dyadic::cell_index(images[g][1], level));
  std::sort(cells.begin(), cells.end());
  return static_cast<std::size_t>(std::unique(cells.begin(), cells.end()) - cells.begin());
}

std::vector<std::size_t> multiplicity_members(const TransversalFamily& K,
                                              const std::vector<double>& values,
                                              const std::vector<double>& dist_row,
                                              std::size_t f, double r, double R) {
  std::vector<std::size_t> members;
  for (std::size_t g = 0; g < K.size(); ++g)
    if (dist_row[g] <= R && std::abs(values[f] - values[g]) <= r) members.push_back(g);
  return members;
}

std::vector<double> values_at(const TransversalFamily& K, double theta) {
  if (!K.interval().contains(theta)) fail(ErrorKind::Domain, "theta outside the family interval");
  std::vector<double> v(K.size());
  for (std::size_t i = 0; i < K.size(); ++i) v[i] = K[i].value(theta);
  return v;
}

}  // namespace

std::size_t multiplicity(const TransversalFamily& K, double theta, std::size_t f_index, double r,
                         double R) {
  if (!(r > 0.0 && r <= R)) fail(ErrorKind::InvalidArgument, "scales must satisfy 0 < r <= R");
  if (f_index >= K.size()) fail(ErrorKind::InvalidArgument, "curve index out of range");
  const int level = dyadic_level_of(r);
  const auto values = values_at(K, theta);
  const auto A = famspace::embed(K, false);
  const auto jf = family::sample(K[f_index], K.grid_n());
  std::vector<double> row(K.size());
  for (std::size_t g = 0; g < K.size(); ++g)
    row[g] = g == f_index ? 0.0 : family::c2_distance(jf, family::sample(K[g], K.grid_n()));
  return count_cells(A.images, multiplicity_members(K, values, row, f_index, r, R), level);
}

std::vector<std::size_t> high_multiplicity_set(const TransversalFamily& K, double theta,
                                               std::size_t M, double r, double R) {
  if (!(r > 0.0 && r <= R)) fail(ErrorKind::InvalidArgument, "scales must satisfy 0 < r <= R");
  const int level = dyadic_level_of(r);
  const auto values = values_at(K, theta);
  const auto A = famspace::embed(K, false);
  const auto dist = famspace::c2_distance_matrix(K);
  const std::size_t n = K.size();
  std::vector<char> keep(n, 0);
  parallel_for(n, [&](std::size_t f) {
    std::vector<double> row(dist.begin() + static_cast<std::ptrdiff_t>(f * n),
                            dist.begin() + static_cast<std::ptrdiff_t>((f + 1) * n));
    keep[f] = count_cells(A.images, multiplicity_members(K, values, row, f, r, R), level) >= M;
  });
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < n; ++f)
    if (keep[f]) out.push_back(f);
  return out;
}

std::size_t slice_cover(const TransversalFamily& F, const std::vector<std::size_t>& subset,
                        double theta, int level) {
  std::vector<std::int64_t> cells;
  for (std::size_t i : subset) {
    if (i >= F.size()) fail(ErrorKind::InvalidArgument, "subset index out of range");
    cells.push_back(dyadic::cell_index(F[i].value(theta), level));
  }
  std::sort(cells.begin(), cells.end());
  return static_cast<std::size_t>(std::unique(cells.begin(), cells.end()) - cells.begin());
}

std::vector<std::size_t> bundle(const TransversalFamily& K, double theta, double lo, double hi) {
  const auto values = values_at(K, theta);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < K.size(); ++i)
    if (values[i] >= lo && values[i] <= hi) out.push_back(i);
  return out;
}

std::size_t n_delta_b(const Cell& p, const TransversalFamily& F,
                      const std::vector<famspace::FamilyDyadicCube>& cubes, std::size_t b,
                      double lambda) {
  const double L = lambda * dyadic::side(p.level);
  std::size_t n = 0;
  for (const auto& cube : cubes) {
    std::size_t hits = 0;
    for (std::size_t f : cube.members)
      if (in_neighbourhood(F[f], p, L)) ++hits;
    if (hits >= b) ++n;
  }
  return n;
}

std::vector<std::vector<std::uint32_t>> cube_incidence_profile(
    const TransversalFamily& F, const std::vector<famspace::FamilyDyadicCube>& cubes, int level,
    double lambda) {
  const std::int64_t side_n = std::int64_t{1} << level;
  const double L = lambda * dyadic::side(level);
  std::vector<std::uint32_t> cube_of(F.size(), UINT32_MAX);
  for (std::uint32_t c = 0; c < cubes.size(); ++c)
    for (std::size_t f : cubes[c].members) cube_of[f] = c;
  std::vector<std::vector<std::uint32_t>> profile(static_cast<std::size_t>(side_n * side_n));
  parallel_for(static_cast<std::size_t>(side_n), [&](std::size_t ixs) {
    const auto ix = static_cast<std::int64_t>(ixs);
    const double x = dyadic::cell_center(ix, level);
    std::vector<std::pair<double, std::uint32_t>> vals;
    for (std::uint32_t f = 0; f < F.size(); ++f)
      if (cube_of[f] != UINT32_MAX && F[f].interval().contains(x)) vals.emplace_back(F[f].value(x), f);
    std::sort(vals.begin(), vals.end());
    std::vector<std::uint32_t> counter(cubes.size(), 0);
    std::vector<std::uint32_t> touched;
    for (std::int64_t iy = 0; iy < side_n; ++iy) {
      const double y = dyadic::cell_center(iy, level);
      auto it = std::lower_bound(vals.begin(), vals.end(), std::make_pair(y - 2.0 * L, 0u));
      touched.clear();
      for (; it != vals.end() && it->first < y + 2.0 * L; ++it) {
        if (!(std::abs(y - it->first) < L)) continue;
        const std::uint32_t c = cube_of[it->second];
        if (counter[c]++ == 0) touched.push_back(c);
      }
      auto& out = profile[static_cast<std::size_t>(ix * side_n + iy)];
      for (std::uint32_t c : touched) {
        out.push_back(counter[c]);
        counter[c] = 0;
      }
      std::sort(out.begin(), out.end(), std::greater<>());
    }
  });
  return profile;
}

}  // namespace furstlab::incidence
