#include "furstlab/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "furstlab/error.hpp"
#include "furstlab/parallel.hpp"

namespace furstlab::fourier {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Largest w >= 0 with w^2 + j^2 <= r2, or -1 when row j misses the disc.
std::int64_t half_width(std::int64_t j, double r2) {
  const double rest = r2 - static_cast<double>(j) * static_cast<double>(j);
  if (rest < 0.0) return -1;
  auto w = static_cast<std::int64_t>(std::floor(std::sqrt(rest)));
  while (static_cast<double>((w + 1) * (w + 1) + j * j) <= r2) ++w;
  while (w >= 0 && static_cast<double>(w * w + j * j) > r2) --w;
  return w;
}

bool is_power_of_two(double R) {
  int e = 0;
  return std::frexp(R, &e) == 0.5;
}

}  // namespace

CurveMeasure lift_measure(const family::Evaluator& g, const std::vector<double>& base_points,
                          const std::vector<double>& weights, double s, int level) {
  if (base_points.size() != weights.size())
    fail(ErrorKind::InvalidArgument, "one weight per base point is required");
  std::vector<Point> atoms;
  atoms.reserve(base_points.size());
  for (double x : base_points) {
    if (!(x >= -1.0 && x <= 1.0)) fail(ErrorKind::Domain, "base point outside [-1, 1]");
    const double y = g(x);
    if (!std::isfinite(y)) fail(ErrorKind::Evaluation, "curve value is not finite");
    atoms.push_back({x, y});
  }
  CurveMeasure out{AtomicMeasure(2, std::move(atoms), weights), s, 0.0, level};
  out.frostman_C = dyadic::frostman_constant(out.measure, s, level).best_constant;
  return out;
}

CurveMeasure uniform_parabola_lift(std::size_t n, double c, int level) {
  if (n < 2) fail(ErrorKind::InvalidArgument, "need at least two atoms");
  std::vector<double> xs(n), ws(n, 1.0 / static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k)
    xs[k] = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(n - 1);
  return lift_measure([c](double x) { return c * x * x; }, xs, ws, 1.0, level);
}

std::complex<double> fourier_transform(const AtomicMeasure& mu, const Point& xi) {
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    const auto& x = mu.atoms()[k];
    const double phase = -kTwoPi * (x[0] * xi[0] + x[1] * xi[1]);
    re += mu.weights()[k] * std::cos(phase);
    im += mu.weights()[k] * std::sin(phase);
  }
  return {re, im};
}

std::vector<double> lp_norm_balls(const AtomicMeasure& mu, double p, const std::vector<double>& R,
                                  double h) {
  if (!(p >= 1.0)) fail(ErrorKind::Parameter, "p must be >= 1");
  if (!(h > 0.0 && h <= 0.125)) fail(ErrorKind::Parameter, "grid step must lie in (0, 1/8]");
  if (R.empty()) fail(ErrorKind::InvalidArgument, "no radii given");
  for (double r : R)
    if (!(r >= 1.0)) fail(ErrorKind::Parameter, "radius must be >= 1");
  const double Rmax = *std::max_element(R.begin(), R.end());
  const double r2max = (Rmax / h) * (Rmax / h);
  const auto rows = static_cast<std::int64_t>(std::floor(Rmax / h)) + 1;
  const std::size_t nR = R.size();
  const std::size_t n = mu.size();

  // row_sums[k * rows + j] = sum over row j of the disc of radius R[k]
  std::vector<double> row_sums(nR * static_cast<std::size_t>(rows), 0.0);
  parallel_for(static_cast<std::size_t>(rows), [&](std::size_t jj) {
    const auto j = static_cast<std::int64_t>(jj);
    const std::int64_t w = half_width(j, r2max);
    if (w < 0) return;
    const std::size_t len = static_cast<std::size_t>(2 * w + 1);
    std::vector<double> vals(len);
    std::vector<double> zr(n), zi(n), sr(n), si(n);
    const double eta = static_cast<double>(j) * h;
    auto reseed = [&](std::int64_t i) {
      const double xi0 = static_cast<double>(i) * h;
      for (std::size_t k = 0; k < n; ++k) {
        const auto& x = mu.atoms()[k];
        const double ph = -kTwoPi * (x[0] * xi0 + x[1] * eta);
        zr[k] = mu.weights()[k] * std::cos(ph);
        zi[k] = mu.weights()[k] * std::sin(ph);
      }
    };
    for (std::size_t k = 0; k < n; ++k) {
      const double ph = -kTwoPi * mu.atoms()[k][0] * h;
      sr[k] = std::cos(ph);
      si[k] = std::sin(ph);
    }
    for (std::int64_t i = -w; i <= w; ++i) {
      if ((i + w) % 64 == 0) reseed(i);
      double re = 0.0, im = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        re += zr[k];
        im += zi[k];
        const double a = zr[k] * sr[k] - zi[k] * si[k];
        zi[k] = zr[k] * si[k] + zi[k] * sr[k];
        zr[k] = a;
      }
      vals[static_cast<std::size_t>(i + w)] = std::pow(re * re + im * im, 0.5 * p);
    }
    for (std::size_t k = 0; k < nR; ++k) {
      const std::int64_t wk = half_width(j, (R[k] / h) * (R[k] / h));
      if (wk < 0) continue;
      row_sums[k * static_cast<std::size_t>(rows) + jj] =
          pairwise_sum(vals.data() + (w - wk), static_cast<std::size_t>(2 * wk + 1));
    }
  });

  std::vector<double> out(nR);
  for (std::size_t k = 0; k < nR; ++k) {
    const double* rs = row_sums.data() + k * static_cast<std::size_t>(rows);
    // rows -j mirror rows j: |mu^(-xi)| = |mu^(xi)|
    const double total = rs[0] + 2.0 * pairwise_sum(rs + 1, static_cast<std::size_t>(rows - 1));
    out[k] = total * h * h;
  }
  return out;
}

double lp_norm_ball(const AtomicMeasure& mu, double p, double R, double h) {
  return lp_norm_balls(mu, p, {R}, h).front();
}

double riesz_energy(const AtomicMeasure& mu, double t, double delta) {
  if (!(delta > 0.0)) fail(ErrorKind::Parameter, "delta must be positive");
  if (!(t >= 0.0)) fail(ErrorKind::Parameter, "t must be nonnegative");
  const std::size_t n = mu.size();
  std::vector<double> rows(n);
  parallel_for(n, [&](std::size_t i) {
    std::vector<double> terms(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double d = std::max(dyadic::distance(mu.atoms()[i], mu.atoms()[j]), delta);
      terms[j] = mu.weights()[j] * std::pow(d, -t);
    }
    rows[i] = mu.weights()[i] * pairwise_sum(terms.data(), n);
  });
  return pairwise_sum(rows.data(), n);
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) fail(ErrorKind::InvalidArgument, "need two or more points");
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  if (sxx == 0.0) fail(ErrorKind::InvalidArgument, "abscissae coincide");
  return sxy / sxx;
}

DecayTable decay_slope(const AtomicMeasure& mu, double p, const std::vector<double>& R, double h) {
  if (R.size() < 3) fail(ErrorKind::InvalidArgument, "need at least three radii");
  for (double r : R)
    if (!is_power_of_two(r)) fail(ErrorKind::Parameter, "radii must be powers of two");
  DecayTable tab;
  tab.p = p;
  tab.R = R;
  tab.integral = lp_norm_balls(mu, p, R, h);
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < R.size(); ++k) {
    lx.push_back(std::log2(R[k]));
    ly.push_back(std::log2(tab.integral[k]));
    tab.slope_cum.push_back(k == 0 ? std::nan("") : least_squares_slope(lx, ly));
  }
  tab.slope = tab.slope_cum.back();
  return tab;
}

double gamma(double s, double t) { return std::min({s + t, 0.5 * (3.0 * s + t), s + 1.0}); }

}  // namespace furstlab::fourier
