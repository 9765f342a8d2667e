#include "furstlab/dyadic.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "furstlab/error.hpp"
#include "furstlab/parallel.hpp"
#include "furstlab/rng.hpp"

namespace furstlab::dyadic {

namespace {

void check_dim(int dim) {
  if (dim != 1 && dim != 2) fail(ErrorKind::InvalidArgument, "dimension must be 1 or 2");
}

void check_level(int level) {
  if (level < 0 || level > 60) fail(ErrorKind::Parameter, "dyadic level must lie in [0, 60]");
}

bool lex_less(const Point& a, const Point& b) { return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1]; }

// Uniform bucket grid of a given side over a point list; answers
// "indices within distance r of x" for r <= side.
class BucketIndex {
 public:
  BucketIndex(const std::vector<Point>& pts, int dim, double bucket_side)
      : pts_(pts), dim_(dim), side_(bucket_side) {
    for (std::size_t i = 0; i < pts.size(); ++i) buckets_[key(bucket(pts[i][0]), by(pts[i]))].push_back(i);
  }

  template <class F>
  void for_each_in_ball(const Point& x, double r, F&& fn) const {
    const std::int64_t bx = bucket(x[0]), byy = by(x);
    const std::int64_t reach = static_cast<std::int64_t>(std::ceil(r / side_));
    const std::int64_t ry = dim_ == 2 ? reach : 0;
    for (std::int64_t dx = -reach; dx <= reach; ++dx)
      for (std::int64_t dy = -ry; dy <= ry; ++dy) {
        auto it = buckets_.find(key(bx + dx, byy + dy));
        if (it == buckets_.end()) continue;
        for (std::size_t i : it->second)
          if (distance(pts_[i], x) <= r) fn(i);
      }
  }

 private:
  std::int64_t bucket(double v) const { return static_cast<std::int64_t>(std::floor(v / side_)); }
  std::int64_t by(const Point& p) const { return dim_ == 2 ? bucket(p[1]) : 0; }
  static std::uint64_t key(std::int64_t a, std::int64_t b) {
    return (static_cast<std::uint64_t>(a) << 32) ^ (static_cast<std::uint64_t>(b) & 0xffffffffULL);
  }
  const std::vector<Point>& pts_;
  int dim_;
  double side_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

// Dense ids of the level-k cell of every point.
std::vector<std::uint32_t> cell_ids(const std::vector<Point>& pts, int dim, int level,
                                    std::size_t* distinct) {
  std::vector<std::pair<Cell, std::size_t>> keyed(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    keyed[i] = {Cell{level, cell_index(pts[i][0], level), dim == 2 ? cell_index(pts[i][1], level) : 0}, i};
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first || (a.first == b.first && a.second < b.second); });
  std::vector<std::uint32_t> ids(pts.size());
  std::uint32_t next = 0;
  for (std::size_t k = 0; k < keyed.size(); ++k) {
    if (k > 0 && !(keyed[k].first == keyed[k - 1].first)) ++next;
    ids[keyed[k].second] = next;
  }
  if (distinct) *distinct = pts.empty() ? 0 : next + 1;
  return ids;
}

// Counts distinct ids among a list of point indices using a stamp array.
class DistinctCounter {
 public:
  explicit DistinctCounter(std::size_t universe) : stamp_(universe, 0) {}
  std::size_t count(const std::vector<std::size_t>& idx, const std::vector<std::uint32_t>& ids) {
    ++epoch_;
    std::size_t c = 0;
    for (std::size_t i : idx) {
      auto& s = stamp_[ids[i]];
      if (s != epoch_) {
        s = epoch_;
        ++c;
      }
    }
    return c;
  }

 private:
  std::vector<std::uint64_t> stamp_;
  std::uint64_t epoch_ = 0;
};

void check_nonempty(std::size_t n) {
  if (n == 0) fail(ErrorKind::InvalidArgument, "point set is empty");
}

// Points sitting exactly on the centers of distinct level-k cells inside
// [0,1)^dim. For these, ball counts reduce to row-wise prefix sums.
class LatticeCounter {
 public:
  static bool applies(const DiscretePointSet& P, int level) {
    if (level > 12) return false;
    const std::int64_t n = std::int64_t{1} << level;
    const double cells = P.dim() == 2 ? static_cast<double>(n) * static_cast<double>(n) : static_cast<double>(n);
    if (cells > 64.0 * static_cast<double>(P.size())) return false;
    for (const auto& p : P.points()) {
      const std::int64_t ix = cell_index(p[0], level);
      if (ix < 0 || ix >= n || cell_center(ix, level) != p[0]) return false;
      if (P.dim() == 2) {
        const std::int64_t iy = cell_index(p[1], level);
        if (iy < 0 || iy >= n || cell_center(iy, level) != p[1]) return false;
      }
    }
    return true;
  }

  LatticeCounter(const DiscretePointSet& P, int level)
      : level_(level), n_(std::int64_t{1} << level), rows_(P.dim() == 2 ? n_ : 1) {
    prefix_.assign(static_cast<std::size_t>(rows_ * (n_ + 1)), 0);
    for (const auto& p : P.points()) {
      const std::int64_t ix = cell_index(p[0], level);
      const std::int64_t iy = P.dim() == 2 ? cell_index(p[1], level) : 0;
      prefix_[static_cast<std::size_t>(iy * (n_ + 1) + ix + 1)] = 1;
    }
    for (std::int64_t r = 0; r < rows_; ++r)
      for (std::int64_t i = 1; i <= n_; ++i)
        prefix_[static_cast<std::size_t>(r * (n_ + 1) + i)] += prefix_[static_cast<std::size_t>(r * (n_ + 1) + i - 1)];
  }

  // Number of points within closed distance r of x, using the same
  // predicate as the brute-force count.
  std::size_t count(const Point& x, double r) const {
    const double delta = side(level_);
    std::size_t total = 0;
    std::int64_t row_lo = 0, row_hi = 0;
    if (rows_ > 1) {
      row_lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((x[1] - r) / delta)) - 1);
      row_hi = std::min<std::int64_t>(rows_ - 1, static_cast<std::int64_t>(std::floor((x[1] + r) / delta)) + 1);
    }
    for (std::int64_t row = row_lo; row <= row_hi; ++row) {
      const double py = rows_ > 1 ? cell_center(row, level_) : 0.0;
      auto inside = [&](std::int64_t ix) {
        return distance(Point{cell_center(ix, level_), py}, x) <= r;
      };
      const double dy = std::abs(py - x[1]);
      if (dy > r) continue;
      const double w = std::sqrt(std::max(0.0, r * r - dy * dy));
      std::int64_t lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor((x[0] - w) / delta - 0.5)) - 1);
      std::int64_t hi = std::min<std::int64_t>(n_ - 1, static_cast<std::int64_t>(std::ceil((x[0] + w) / delta - 0.5)) + 1);
      while (lo <= hi && !inside(lo)) ++lo;
      while (hi >= lo && !inside(hi)) --hi;
      if (lo > hi) continue;
      const std::size_t base = static_cast<std::size_t>(row * (n_ + 1));
      total += prefix_[base + static_cast<std::size_t>(hi + 1)] - prefix_[base + static_cast<std::size_t>(lo)];
    }
    return total;
  }

 private:
  int level_;
  std::int64_t n_, rows_;
  std::vector<std::uint32_t> prefix_;
};

// Shared driver for the single-scale set classes: ratio = count(x, r) / denom(r).
template <class Denominator>
SetClassReport single_scale(const DiscretePointSet& P, int delta_level, Denominator denom) {
  check_nonempty(P.size());
  check_level(delta_level);
  std::size_t universe = 0;
  const auto ids = cell_ids(P.points(), P.dim(), delta_level, &universe);
  const std::size_t n = P.size();
  const int levels = delta_level + 1;
  std::optional<LatticeCounter> lattice;
  if (LatticeCounter::applies(P, delta_level)) lattice.emplace(P, delta_level);
  struct Best {
    double ratio = -1.0;
    std::size_t center = 0;
    int j = 0;
  };
  std::vector<Best> best(static_cast<std::size_t>(levels));
  parallel_for(static_cast<std::size_t>(levels), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    const double r = side(j);
    std::optional<BucketIndex> index;
    std::optional<DistinctCounter> counter;
    if (!lattice) {
      index.emplace(P.points(), P.dim(), r);
      counter.emplace(universe);
    }
    std::vector<std::size_t> hits;
    Best b;
    b.j = j;
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t cnt;
      if (lattice) {
        cnt = lattice->count(P[c], r);
      } else {
        hits.clear();
        index->for_each_in_ball(P[c], r, [&](std::size_t i) { hits.push_back(i); });
        cnt = counter->count(hits, ids);
      }
      const double ratio = static_cast<double>(cnt) / denom(r);
      if (ratio > b.ratio) {
        b.ratio = ratio;
        b.center = c;
      }
    }
    best[jj] = b;
  });
  SetClassReport rep;
  rep.level_lo = 0;
  rep.level_hi = delta_level;
  rep.best_constant = -1.0;
  for (const auto& b : best)
    if (b.ratio > rep.best_constant) {
      rep.best_constant = b.ratio;
      rep.witness_center = P[b.center];
      rep.witness_radius = side(b.j);
    }
  return rep;
}

}  // namespace

double distance(const Point& a, const Point& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

DiscretePointSet::DiscretePointSet(int dim, std::vector<Point> points, int level)
    : dim_(dim), points_(std::move(points)), level_(level) {
  check_dim(dim);
  check_level(level);
  for (auto& p : points_) {
    if (dim == 1) p[1] = 0.0;
    if (!std::isfinite(p[0]) || !std::isfinite(p[1]))
      fail(ErrorKind::InvalidArgument, "point coordinates must be finite");
  }
  std::vector<Point> sorted = points_;
  std::sort(sorted.begin(), sorted.end(), lex_less);
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    fail(ErrorKind::InvalidArgument, "point set contains duplicate points");
}

AtomicMeasure::AtomicMeasure(int dim, std::vector<Point> atoms, std::vector<double> weights)
    : dim_(dim), atoms_(std::move(atoms)), weights_(std::move(weights)) {
  check_dim(dim);
  if (atoms_.size() != weights_.size())
    fail(ErrorKind::InvalidArgument, "atom and weight counts differ");
  for (auto& p : atoms_)
    if (dim == 1) p[1] = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorKind::InvalidArgument, "weights must be nonnegative");
    total_ += w;
  }
  if (total_ > 1.0 + 1e-12) fail(ErrorKind::Domain, "total mass exceeds 1");
  std::vector<Point> sorted = atoms_;
  std::sort(sorted.begin(), sorted.end(), lex_less);
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    fail(ErrorKind::InvalidArgument, "measure has repeated atoms");
}

std::vector<Cell> dyadic_cover(const std::vector<Point>& pts, int dim, int level) {
  check_dim(dim);
  check_level(level);
  std::vector<Cell> cells;
  cells.reserve(pts.size());
  for (const auto& p : pts)
    cells.push_back({level, cell_index(p[0], level), dim == 2 ? cell_index(p[1], level) : 0});
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

namespace {

std::size_t greedy_cover(const std::vector<Point>& pts, int dim, double r) {
  std::vector<Point> sorted = pts;
  std::sort(sorted.begin(), sorted.end(), lex_less);
  std::vector<Point> centers;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
  auto bkt = [r](double v) { return static_cast<std::int64_t>(std::floor(v / r)); };
  auto key = [](std::int64_t a, std::int64_t b) {
    return (static_cast<std::uint64_t>(a) << 32) ^ (static_cast<std::uint64_t>(b) & 0xffffffffULL);
  };
  for (const auto& p : sorted) {
    const std::int64_t bx = bkt(p[0]), by = dim == 2 ? bkt(p[1]) : 0;
    bool covered = false;
    for (std::int64_t dx = -1; dx <= 1 && !covered; ++dx)
      for (std::int64_t dy = (dim == 2 ? -1 : 0); dy <= (dim == 2 ? 1 : 0) && !covered; ++dy) {
        auto it = buckets.find(key(bx + dx, by + dy));
        if (it == buckets.end()) continue;
        for (std::size_t c : it->second)
          if (distance(centers[c], p) <= r) {
            covered = true;
            break;
          }
      }
    if (!covered) {
      buckets[key(bx, by)].push_back(centers.size());
      centers.push_back(p);
    }
  }
  return centers.size();
}

std::size_t sweep_cover_1d(const std::vector<Point>& pts, double r) {
  std::vector<double> xs;
  for (const auto& p : pts) xs.push_back(p[0]);
  std::sort(xs.begin(), xs.end());
  std::size_t count = 0, i = 0;
  while (i < xs.size()) {
    const double reach = xs[i] + 2.0 * r;
    ++count;
    while (i < xs.size() && xs[i] <= reach) ++i;
  }
  return count;
}

class SetCoverSearch {
 public:
  SetCoverSearch(const std::vector<Point>& pts, double r, std::size_t upper)
      : n_(pts.size()), words_((n_ + 63) / 64), best_(upper) {
    cover_.assign(n_, Bits(words_, 0));
    far_.assign(n_, Bits(words_, 0));
    candidates_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        const double d = distance(pts[i], pts[j]);
        if (d <= r) {
          set(cover_[i], j);
          candidates_[j].push_back(i);
        }
        if (d > 2.0 * r) set(far_[i], j);
      }
  }

  void run(std::size_t budget) {
    budget_ = budget;
    Bits all(words_, 0);
    for (std::size_t i = 0; i < n_; ++i) set(all, i);
    root_lb_ = packing_bound(all);
    search(all, 0);
  }

  std::size_t best() const { return best_; }
  bool proven() const { return !exhausted_; }
  std::size_t root_lower_bound() const { return root_lb_; }

 private:
  using Bits = std::vector<std::uint64_t>;
  static void set(Bits& b, std::size_t i) { b[i >> 6] |= 1ULL << (i & 63); }
  static bool test(const Bits& b, std::size_t i) { return (b[i >> 6] >> (i & 63)) & 1ULL; }

  // Points pairwise more than 2r apart each need their own ball.
  std::size_t packing_bound(const Bits& uncovered) const {
    Bits avail = uncovered;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (!test(avail, i)) continue;
      ++count;
      for (std::size_t w = 0; w < words_; ++w) avail[w] &= far_[i][w];
    }
    return count;
  }

  void search(const Bits& uncovered, std::size_t depth) {
    if (exhausted_) return;
    if (++nodes_ > budget_) {
      exhausted_ = true;
      return;
    }
    std::size_t pick = SIZE_MAX, fewest = SIZE_MAX;
    for (std::size_t i = 0; i < n_; ++i)
      if (test(uncovered, i) && candidates_[i].size() < fewest) {
        fewest = candidates_[i].size();
        pick = i;
      }
    if (pick == SIZE_MAX) {
      best_ = std::min(best_, depth);
      return;
    }
    if (depth + packing_bound(uncovered) >= best_) return;
    std::vector<std::pair<std::size_t, std::size_t>> order;
    for (std::size_t c : candidates_[pick]) {
      std::size_t gain = 0;
      for (std::size_t w = 0; w < words_; ++w)
        gain += static_cast<std::size_t>(__builtin_popcountll(cover_[c][w] & uncovered[w]));
      order.emplace_back(gain, c);
    }
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    Bits next(words_);
    for (const auto& [gain, c] : order) {
      for (std::size_t w = 0; w < words_; ++w) next[w] = uncovered[w] & ~cover_[c][w];
      search(next, depth + 1);
    }
  }

  std::size_t n_, words_;
  std::vector<Bits> cover_, far_;
  std::vector<std::vector<std::size_t>> candidates_;
  std::size_t best_;
  std::size_t nodes_ = 0, budget_ = 0;
  std::size_t root_lb_ = 0;
  bool exhausted_ = false;
};

}  // namespace

CoveringResult covering_number(const DiscretePointSet& P, double r, CoveringMode mode) {
  check_nonempty(P.size());
  if (!(r > 0.0)) fail(ErrorKind::InvalidArgument, "covering radius must be positive");
  CoveringResult res;
  if (mode == CoveringMode::Greedy) {
    res.value = greedy_cover(P.points(), P.dim(), r);
    res.lower_bound = 1;
    return res;
  }
  if (P.dim() == 1) {
    res.value = sweep_cover_1d(P.points(), r);
    res.lower_bound = res.value;
    res.proven = true;
    return res;
  }
  if (P.size() > 512) fail(ErrorKind::InvalidArgument, "exact covering supports at most 512 points");
  SetCoverSearch search(P.points(), r, greedy_cover(P.points(), 2, r));
  search.run(2'000'000);
  res.value = search.best();
  res.proven = search.proven();
  res.lower_bound = res.proven ? res.value : search.root_lower_bound();
  return res;
}

std::size_t ball_cover_count(const std::vector<Point>& pts, int dim, const Point& x, double r,
                             int level) {
  std::vector<Cell> cells;
  for (const auto& p : pts)
    if (distance(p, x) <= r)
      cells.push_back({level, cell_index(p[0], level), dim == 2 ? cell_index(p[1], level) : 0});
  std::sort(cells.begin(), cells.end());
  return static_cast<std::size_t>(std::unique(cells.begin(), cells.end()) - cells.begin());
}

SetClassReport delta_set_constant(const DiscretePointSet& P, int delta_level, double s) {
  check_nonempty(P.size());
  if (s < 0.0 || s > P.dim()) fail(ErrorKind::Parameter, "exponent s must lie in [0, dim]");
  const double total = static_cast<double>(dyadic_cover(P, delta_level).size());
  return single_scale(P, delta_level, [&](double r) { return std::pow(r, s) * total; });
}

SetClassReport katz_tao_constant(const DiscretePointSet& P, int delta_level, double s) {
  if (s < 0.0 || s > P.dim()) fail(ErrorKind::Parameter, "exponent s must lie in [0, dim]");
  const double delta = side(delta_level);
  return single_scale(P, delta_level, [&](double r) { return std::pow(r / delta, s); });
}

std::pair<std::size_t, std::size_t> max_ball_population(const DiscretePointSet& P, double r) {
  check_nonempty(P.size());
  std::optional<LatticeCounter> lattice;
  if (LatticeCounter::applies(P, P.level())) lattice.emplace(P, P.level());
  std::optional<BucketIndex> index;
  if (!lattice) index.emplace(P.points(), P.dim(), r);
  std::vector<std::size_t> counts(P.size());
  parallel_for(P.size(), [&](std::size_t c) {
    if (lattice) {
      counts[c] = lattice->count(P[c], r);
    } else {
      std::size_t k = 0;
      index->for_each_in_ball(P[c], r, [&](std::size_t) { ++k; });
      counts[c] = k;
    }
  });
  std::pair<std::size_t, std::size_t> best{0, 0};
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] > best.first) best = {counts[c], c};
  return best;
}

double delta_set_ratio(const DiscretePointSet& P, int delta_level, double s, const Point& x,
                       double r) {
  const double total = static_cast<double>(dyadic_cover(P, delta_level).size());
  return static_cast<double>(ball_cover_count(P.points(), P.dim(), x, r, delta_level)) /
         (std::pow(r, s) * total);
}

double katz_tao_ratio(const DiscretePointSet& P, int delta_level, double s, const Point& x,
                      double r) {
  return static_cast<double>(ball_cover_count(P.points(), P.dim(), x, r, delta_level)) /
         std::pow(r / side(delta_level), s);
}

SetClassReport upper_regular_constant(const DiscretePointSet& P, int delta_level, double s) {
  check_nonempty(P.size());
  check_level(delta_level);
  if (s < 0.0 || s > P.dim()) fail(ErrorKind::Parameter, "exponent s must lie in [0, dim]");
  const std::size_t n = P.size();
  std::vector<std::vector<std::uint32_t>> ids(static_cast<std::size_t>(delta_level + 1));
  std::vector<std::size_t> universe(ids.size());
  for (int j = 0; j <= delta_level; ++j)
    ids[static_cast<std::size_t>(j)] =
        cell_ids(P.points(), P.dim(), j, &universe[static_cast<std::size_t>(j)]);
  struct Best {
    double ratio = -1.0;
    std::size_t center = 0;
    int outer = 0, inner = 0;
  };
  std::vector<Best> best(static_cast<std::size_t>(delta_level + 1));
  parallel_for(best.size(), [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    const double R = side(i);
    BucketIndex index(P.points(), P.dim(), R);
    std::vector<DistinctCounter> counters;
    for (int j = i; j <= delta_level; ++j) counters.emplace_back(universe[static_cast<std::size_t>(j)]);
    std::vector<std::size_t> hits;
    Best b;
    for (std::size_t c = 0; c < n; ++c) {
      hits.clear();
      index.for_each_in_ball(P[c], R, [&](std::size_t k) { hits.push_back(k); });
      for (int j = i; j <= delta_level; ++j) {
        const double cnt = static_cast<double>(
            counters[static_cast<std::size_t>(j - i)].count(hits, ids[static_cast<std::size_t>(j)]));
        const double ratio = cnt / std::pow(R / side(j), s);
        if (ratio > b.ratio) b = {ratio, c, i, j};
      }
    }
    best[ii] = b;
  });
  SetClassReport rep;
  rep.level_lo = 0;
  rep.level_hi = delta_level;
  rep.best_constant = -1.0;
  for (const auto& b : best)
    if (b.ratio > rep.best_constant) {
      rep.best_constant = b.ratio;
      rep.witness_center = P[b.center];
      rep.witness_radius = side(b.outer);
      rep.witness_inner_level = b.inner;
    }
  return rep;
}

double upper_regular_ratio(const DiscretePointSet& P, double s, const Point& x, double R,
                           int inner_level) {
  return static_cast<double>(ball_cover_count(P.points(), P.dim(), x, R, inner_level)) /
         std::pow(R / side(inner_level), s);
}

SetClassReport frostman_constant(const AtomicMeasure& mu, double t, int delta_level) {
  check_nonempty(mu.size());
  check_level(delta_level);
  if (t < 0.0) fail(ErrorKind::Parameter, "Frostman exponent must be nonnegative");
  const std::size_t n = mu.size();
  struct Best {
    double ratio = -1.0;
    std::size_t center = 0;
    int j = 0;
  };
  std::vector<Best> best(static_cast<std::size_t>(delta_level + 1));
  parallel_for(best.size(), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    const double r = side(j);
    BucketIndex index(mu.atoms(), mu.dim(), r);
    std::vector<std::size_t> hits;
    Best b;
    b.j = j;
    for (std::size_t c = 0; c < n; ++c) {
      hits.clear();
      index.for_each_in_ball(mu.atoms()[c], r, [&](std::size_t k) { hits.push_back(k); });
      std::sort(hits.begin(), hits.end());
      double mass = 0.0;
      for (std::size_t k : hits) mass += mu.weights()[k];
      const double ratio = mass / std::pow(r, t);
      if (ratio > b.ratio) {
        b.ratio = ratio;
        b.center = c;
      }
    }
    best[jj] = b;
  });
  SetClassReport rep;
  rep.level_hi = delta_level;
  rep.best_constant = -1.0;
  for (const auto& b : best)
    if (b.ratio > rep.best_constant) {
      rep.best_constant = b.ratio;
      rep.witness_center = mu.atoms()[b.center];
      rep.witness_radius = side(b.j);
    }
  return rep;
}

double frostman_ratio(const AtomicMeasure& mu, double t, const Point& x, double r) {
  double mass = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k)
    if (distance(mu.atoms()[k], x) <= r) mass += mu.weights()[k];
  return mass / std::pow(r, t);
}

DiscretePointSet generate_delta_set(int dim, int level, double s, int T, std::uint64_t seed) {
  check_dim(dim);
  if (T < 1) fail(ErrorKind::Parameter, "branching period T must be positive");
  if (level < 0 || level % T != 0)
    fail(ErrorKind::Parameter, "delta must have the form 2^-(m T)");
  if (s < 0.0 || s > dim) fail(ErrorKind::Parameter, "exponent s must lie in [0, dim]");
  if (dim * T > 62) fail(ErrorKind::Parameter, "branching period too large");
  check_level(level);
  const int m = level / T;
  const std::uint64_t per_axis = 1ULL << T;
  const std::uint64_t subcells = 1ULL << (dim * T);
  const auto keep = static_cast<std::uint64_t>(std::llround(std::exp2(s * T)));
  Rng rng(seed);
  std::vector<Cell> cells{Cell{0, 0, 0}};
  for (int j = 1; j <= m; ++j) {
    std::vector<Cell> next;
    next.reserve(cells.size() * keep);
    for (const Cell& c : cells)
      for (std::uint64_t idx : rng.sample_without_replacement(subcells, keep)) {
        const auto cx = static_cast<std::int64_t>(idx % per_axis);
        const auto cy = static_cast<std::int64_t>(idx / per_axis);
        next.push_back({j * T, c.ix * static_cast<std::int64_t>(per_axis) + cx,
                        c.iy * static_cast<std::int64_t>(per_axis) + cy});
      }
    std::sort(next.begin(), next.end());
    cells = std::move(next);
  }
  std::vector<Point> pts;
  pts.reserve(cells.size());
  for (const Cell& c : cells) pts.push_back({c.cx(), dim == 2 ? c.cy() : 0.0});
  return DiscretePointSet(dim, std::move(pts), level);
}

void write_points_csv(const std::string& path, int dim, const std::vector<Point>& pts,
                      const std::vector<double>* weights) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot open " + path + " for writing");
  out << (dim == 2 ? "x,y" : "x") << (weights ? ",w" : "") << "\n";
  char buf[128];
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (dim == 2)
      std::snprintf(buf, sizeof buf, "%.17g,%.17g", pts[i][0], pts[i][1]);
    else
      std::snprintf(buf, sizeof buf, "%.17g", pts[i][0]);
    out << buf;
    if (weights) {
      std::snprintf(buf, sizeof buf, ",%.17g", (*weights)[i]);
      out << buf;
    }
    out << "\n";
  }
  if (!out) fail(ErrorKind::Io, "failed writing " + path);
}

PointsCsv read_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);
  PointsCsv res;
  std::string line;
  std::vector<std::string> header;
  int col_x = -1, col_y = -1, col_w = -1;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (header.empty()) {
      header = fields;
      for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == "x") col_x = static_cast<int>(k);
        if (header[k] == "y") col_y = static_cast<int>(k);
        if (header[k] == "w") col_w = static_cast<int>(k);
      }
      if (col_x < 0) fail(ErrorKind::Io, path + ": header must name an x column");
      res.dim = col_y >= 0 ? 2 : 1;
      if (col_w >= 0) res.weights.emplace();
      continue;
    }
    if (fields.size() != header.size())
      fail(ErrorKind::Io, path + ": wrong field count on line " + std::to_string(lineno));
    try {
      Point p{std::stod(fields[static_cast<std::size_t>(col_x)]),
              col_y >= 0 ? std::stod(fields[static_cast<std::size_t>(col_y)]) : 0.0};
      res.points.push_back(p);
      if (col_w >= 0) res.weights->push_back(std::stod(fields[static_cast<std::size_t>(col_w)]));
    } catch (const std::exception&) {
      fail(ErrorKind::Io, path + ": unparsable number on line " + std::to_string(lineno));
    }
  }
  if (header.empty()) fail(ErrorKind::Io, path + ": missing header");
  return res;
}

}  // namespace furstlab::dyadic
