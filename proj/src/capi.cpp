#include "furstlab/furstlab.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "furstlab/config.hpp"
#include "furstlab/dyadic.hpp"
#include "furstlab/error.hpp"
#include "furstlab/family.hpp"
#include "furstlab/fourier.hpp"
#include "furstlab/incidence.hpp"
#include "furstlab/parallel.hpp"
#include "furstlab/runner.hpp"

struct fl_family {
  furstlab::family::TransversalFamily F;
};

struct fl_pointset {
  furstlab::dyadic::DiscretePointSet P;
};

struct fl_run_config {
  furstlab::cli::RunConfig cfg;
};

namespace {

using namespace furstlab;

thread_local std::string t_error;

fl_status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return FL_ERR_INVALID_ARGUMENT;
    case ErrorKind::Domain: return FL_ERR_DOMAIN;
    case ErrorKind::Evaluation: return FL_ERR_EVALUATION;
    case ErrorKind::IdenticalCurves: return FL_ERR_IDENTICAL_CURVES;
    case ErrorKind::Parameter: return FL_ERR_PARAMETER;
    case ErrorKind::Invariant: return FL_ERR_INVARIANT;
    case ErrorKind::Io: return FL_ERR_IO;
  }
  return FL_ERR_INTERNAL;
}

template <class Fn>
fl_status guarded(Fn&& fn) {
  try {
    fn();
    t_error.clear();
    return FL_OK;
  } catch (const Error& e) {
    t_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    t_error = "out of memory";
  } catch (const std::exception& e) {
    t_error = e.what();
  } catch (...) {
    t_error = "unknown failure";
  }
  return FL_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  if (!p) fail(ErrorKind::InvalidArgument, std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<dyadic::Cell> squares_of(const fl_pointset* set) {
  need(set, "point set");
  if (set->P.dim() != 2) fail(ErrorKind::InvalidArgument, "squares need a planar point set");
  return dyadic::dyadic_cover(set->P, set->P.level());
}

dyadic::AtomicMeasure measure_of(const double* xy, const double* w, size_t n) {
  need(xy, "atoms");
  need(w, "weights");
  std::vector<dyadic::Point> atoms(n);
  for (size_t i = 0; i < n; ++i) atoms[i] = {xy[2 * i], xy[2 * i + 1]};
  return dyadic::AtomicMeasure(2, std::move(atoms), std::vector<double>(w, w + n));
}

void fill(fl_set_report* out, const dyadic::SetClassReport& r) {
  out->constant = r.best_constant;
  out->center_x = r.witness_center[0];
  out->center_y = r.witness_center[1];
  out->radius = r.witness_radius;
}

}  // namespace

extern "C" {

const char* fl_last_error_message(void) { return t_error.c_str(); }
const char* fl_version(void) { return cli::kVersion; }

fl_status fl_set_threads(unsigned n) {
  return guarded([&] { set_thread_count(n); });
}

fl_status fl_family_create_affine(const double* slopes, const double* intercepts, size_t n, double lo,
                                  double hi, int grid_n, fl_family** out) {
  return guarded([&] {
    need(slopes, "slopes");
    need(intercepts, "intercepts");
    need(out, "output");
    if (!(lo < hi)) fail(ErrorKind::InvalidArgument, "interval must satisfy lo < hi");
    std::vector<family::CurveFunction> curves;
    for (size_t i = 0; i < n; ++i) curves.push_back(family::CurveFunction::affine({lo, hi}, slopes[i], intercepts[i]));
    *out = new fl_family{family::TransversalFamily(std::move(curves), grid_n)};
  });
}

fl_status fl_family_create_parabola_translates(const double* a, const double* b, size_t n, double c,
                                               int grid_n, fl_family** out) {
  return guarded([&] {
    need(a, "a");
    need(b, "b");
    need(out, "output");
    const auto seed = family::ConvexSeed::parabola(c);
    std::vector<family::Center> centers;
    for (size_t i = 0; i < n; ++i) centers.push_back({a[i], b[i]});
    auto fam = family::convex_translate_family(seed, centers, 0.0, grid_n);
    *out = new fl_family{std::move(fam.family)};
  });
}

fl_status fl_family_create_nice(const char* kind, int delta_exp, double s, double t, int T,
                                uint64_t seed, fl_family** family_out, fl_pointset** squares_out) {
  return guarded([&] {
    need(kind, "kind");
    need(family_out, "family output");
    config::BuildOptions opts;
    opts.audit = false;
    auto conf = config::build_nice_configuration(config::parse_kind(kind), delta_exp, s, t, T, seed, opts);
    std::vector<dyadic::Point> centers;
    for (const auto& c : config::union_of_squares(conf)) centers.push_back({c.cx(), c.cy()});
    std::unique_ptr<fl_pointset> sq;
    if (squares_out) sq.reset(new fl_pointset{dyadic::DiscretePointSet(2, std::move(centers), delta_exp)});
    *family_out = new fl_family{std::move(conf.F)};
    if (squares_out) *squares_out = sq.release();
  });
}

void fl_family_free(fl_family* family) { delete family; }

fl_status fl_family_size(const fl_family* family, size_t* out) {
  return guarded([&] {
    need(family, "family");
    need(out, "output");
    *out = family->F.size();
  });
}

fl_status fl_family_transversality(const fl_family* family, double* t_const) {
  return guarded([&] {
    need(family, "family");
    need(t_const, "output");
    *t_const = family->F.t_const();
  });
}

fl_status fl_family_eval(const fl_family* family, size_t i, double x, double* value, double* d1,
                         double* d2) {
  return guarded([&] {
    need(family, "family");
    if (i >= family->F.size()) fail(ErrorKind::InvalidArgument, "curve index out of range");
    const auto& f = family->F[i];
    if (!f.interval().contains(x)) fail(ErrorKind::Domain, "x outside the family interval");
    if (value) *value = f.value(x);
    if (d1) *d1 = f.d1(x);
    if (d2) *d2 = f.d2(x);
  });
}

fl_status fl_family_c2_distance(const fl_family* family, size_t i, size_t j, double* out) {
  return guarded([&] {
    need(family, "family");
    need(out, "output");
    if (i >= family->F.size() || j >= family->F.size())
      fail(ErrorKind::InvalidArgument, "curve index out of range");
    *out = family::c2_distance(family->F[i], family->F[j], family->F.grid_n());
  });
}

fl_status fl_pointset_create(int dim, const double* xy, size_t n, int delta_exp, fl_pointset** out) {
  return guarded([&] {
    need(xy, "coordinates");
    need(out, "output");
    if (dim != 1 && dim != 2) fail(ErrorKind::InvalidArgument, "dimension must be 1 or 2");
    std::vector<dyadic::Point> pts(n);
    for (size_t i = 0; i < n; ++i)
      pts[i] = {xy[static_cast<size_t>(dim) * i], dim == 2 ? xy[2 * i + 1] : 0.0};
    *out = new fl_pointset{dyadic::DiscretePointSet(dim, std::move(pts), delta_exp)};
  });
}

fl_status fl_pointset_generate(int dim, int delta_exp, double s, int T, uint64_t seed, fl_pointset** out) {
  return guarded([&] {
    need(out, "output");
    *out = new fl_pointset{dyadic::generate_delta_set(dim, delta_exp, s, T, seed)};
  });
}

void fl_pointset_free(fl_pointset* set) { delete set; }

fl_status fl_pointset_size(const fl_pointset* set, size_t* out) {
  return guarded([&] {
    need(set, "point set");
    need(out, "output");
    *out = set->P.size();
  });
}

fl_status fl_pointset_get(const fl_pointset* set, size_t i, double* x, double* y) {
  return guarded([&] {
    need(set, "point set");
    if (i >= set->P.size()) fail(ErrorKind::InvalidArgument, "point index out of range");
    if (x) *x = set->P[i][0];
    if (y) *y = set->P[i][1];
  });
}

fl_status fl_delta_set_constant(const fl_pointset* set, double s, fl_set_report* out) {
  return guarded([&] {
    need(set, "point set");
    need(out, "output");
    fill(out, dyadic::delta_set_constant(set->P, set->P.level(), s));
  });
}

fl_status fl_katz_tao_constant(const fl_pointset* set, double s, fl_set_report* out) {
  return guarded([&] {
    need(set, "point set");
    need(out, "output");
    fill(out, dyadic::katz_tao_constant(set->P, set->P.level(), s));
  });
}

fl_status fl_covering_number(const fl_pointset* set, double r, int exact, size_t* value, int* proven) {
  return guarded([&] {
    need(set, "point set");
    need(value, "output");
    const auto res = dyadic::covering_number(
        set->P, r, exact ? dyadic::CoveringMode::Exact : dyadic::CoveringMode::Greedy);
    *value = res.value;
    if (proven) *proven = res.proven ? 1 : 0;
  });
}

fl_status fl_incidences(const fl_family* family, const fl_pointset* squares, double lambda,
                        uint64_t* count) {
  return guarded([&] {
    need(family, "family");
    need(count, "output");
    *count = incidence::incidences(family->F, squares_of(squares), lambda, false).count;
  });
}

fl_status fl_incidences_brute(const fl_family* family, const fl_pointset* squares, double lambda,
                              uint64_t* count) {
  return guarded([&] {
    need(family, "family");
    need(count, "output");
    *count = incidence::incidences_brute(family->F, squares_of(squares), lambda);
  });
}

fl_status fl_high_low(const fl_family* family, const fl_pointset* squares, double lambda, double S,
                      double* lhs, double* high, double* low, double* fitted_c) {
  return guarded([&] {
    need(family, "family");
    const auto r = incidence::high_low_report(family->F, squares_of(squares), lambda, S);
    if (lhs) *lhs = r.lhs;
    if (high) *high = r.high_term;
    if (low) *low = r.low_term;
    if (fitted_c) *fitted_c = r.fitted_C;
  });
}

fl_status fl_fourier_transform(const double* atoms_xy, const double* weights, size_t n, double xi_x,
                               double xi_y, double* re, double* im) {
  return guarded([&] {
    const auto mu = measure_of(atoms_xy, weights, n);
    const auto z = fourier::fourier_transform(mu, {xi_x, xi_y});
    if (re) *re = z.real();
    if (im) *im = z.imag();
  });
}

fl_status fl_lp_norm_ball(const double* atoms_xy, const double* weights, size_t n, double p, double R,
                          double h, double* out) {
  return guarded([&] {
    need(out, "output");
    *out = fourier::lp_norm_ball(measure_of(atoms_xy, weights, n), p, R, h);
  });
}

fl_status fl_riesz_energy(const double* atoms_xy, const double* weights, size_t n, double t,
                          double delta, double* out) {
  return guarded([&] {
    need(out, "output");
    *out = fourier::riesz_energy(measure_of(atoms_xy, weights, n), t, delta);
  });
}

double fl_gamma(double s, double t) { return fourier::gamma(s, t); }

fl_status fl_run_config_create(fl_run_config** out) {
  return guarded([&] {
    need(out, "output");
    *out = new fl_run_config{};
  });
}

void fl_run_config_free(fl_run_config* cfg) { delete cfg; }

fl_status fl_run_config_set(fl_run_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    need(cfg, "config");
    need(key, "key");
    need(value, "value");
    cfg->cfg.set(key, value);
  });
}

fl_status fl_run_config_load_file(fl_run_config* cfg, const char* path) {
  return guarded([&] {
    need(cfg, "config");
    need(path, "path");
    cfg->cfg.load_file(path);
  });
}

fl_status fl_run(const fl_run_config* cfg, char** csv, char** summary, int* exit_code) {
  return guarded([&] {
    need(cfg, "config");
    need(exit_code, "exit code");
    const auto out = cli::run(cfg->cfg);
    char* c = csv ? dup_string(out.csv) : nullptr;
    char* s = nullptr;
    try {
      s = summary ? dup_string(out.summary) : nullptr;
    } catch (...) {
      std::free(c);
      throw;
    }
    if (csv) *csv = c;
    if (summary) *summary = s;
    *exit_code = out.exit_code;
  });
}

void fl_string_free(char* s) { std::free(s); }

}  // extern "C"
