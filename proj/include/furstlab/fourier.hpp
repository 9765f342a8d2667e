#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "furstlab/dyadic.hpp"
#include "furstlab/family.hpp"

namespace furstlab::fourier {

using dyadic::AtomicMeasure;
using dyadic::Point;

struct CurveMeasure {
  AtomicMeasure measure;
  double s = 0.0;               // target Frostman exponent
  double frostman_C = 0.0;      // measured at scales 1 .. 2^-level
  int level = 0;
};

// Atoms (x, g(x)) carrying the base weights. Base points must lie in [-1, 1];
// total mass above 1 is a Domain error.
CurveMeasure lift_measure(const family::Evaluator& g, const std::vector<double>& base_points,
                          const std::vector<double>& weights, double s, int level);

// n equal atoms on the uniform grid of [-1, 1] lifted to c x^2.
CurveMeasure uniform_parabola_lift(std::size_t n = 1025, double c = 1.0, int level = 8);

// sum_j w_j exp(-2 pi i <x_j, xi>)
std::complex<double> fourier_transform(const AtomicMeasure& mu, const Point& xi);

// h^2 * sum of |mu^|^p over the points of h Z^2 in the closed ball B(R).
// Requires p >= 1, R >= 1 and 0 < h <= 1/8.
double lp_norm_ball(const AtomicMeasure& mu, double p, double R, double h = 0.125);

// Same quantity for several radii from one pass over the largest ball.
std::vector<double> lp_norm_balls(const AtomicMeasure& mu, double p, const std::vector<double>& R,
                                  double h = 0.125);

// sum_{i,j} w_i w_j max(|x_i - x_j|, delta)^-t, diagonal included.
double riesz_energy(const AtomicMeasure& mu, double t, double delta);

struct DecayTable {
  double p = 0.0;
  std::vector<double> R;
  std::vector<double> integral;
  std::vector<double> slope_cum;  // fit over R[0..k]; NaN for k = 0
  double slope = 0.0;
};

// Least-squares slope of log2(integral) against log2(R); at least three
// dyadic radii.
DecayTable decay_slope(const AtomicMeasure& mu, double p, const std::vector<double>& R,
                       double h = 0.125);

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

// min{s + t, (3s + t)/2, s + 1}
double gamma(double s, double t);

}  // namespace furstlab::fourier
