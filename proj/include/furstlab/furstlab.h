#ifndef FURSTLAB_FURSTLAB_H
#define FURSTLAB_FURSTLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(FURSTLAB_BUILDING)
#define FL_API __declspec(dllexport)
#else
#define FL_API __declspec(dllimport)
#endif
#else
#define FL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fl_status {
  FL_OK = 0,
  FL_ERR_INVALID_ARGUMENT = 1,
  FL_ERR_DOMAIN = 2,
  FL_ERR_EVALUATION = 3,
  FL_ERR_IDENTICAL_CURVES = 4,
  FL_ERR_PARAMETER = 5,
  FL_ERR_INVARIANT = 6,
  FL_ERR_IO = 7,
  FL_ERR_INTERNAL = 99
} fl_status;

/* Message of the last failed call on this thread; empty after a success. */
FL_API const char* fl_last_error_message(void);
FL_API const char* fl_version(void);
FL_API fl_status fl_set_threads(unsigned n);

typedef struct fl_family fl_family;
typedef struct fl_pointset fl_pointset;
typedef struct fl_run_config fl_run_config;

/* ------------------------------------------------------------ families */

/* f_i(x) = slopes[i] x + intercepts[i] on [lo, hi]. */
FL_API fl_status fl_family_create_affine(const double* slopes, const double* intercepts, size_t n,
                                         double lo, double hi, int grid_n, fl_family** out);
/* f_i(x) = c (x - a_i)^2 + b_i on [-5, 5], a_i in [-1, 1]. */
FL_API fl_status fl_family_create_parabola_translates(const double* a, const double* b, size_t n,
                                                      double c, int grid_n, fl_family** out);
/* Nice configuration: family plus the union of its square sets, as the
   centers of the delta-squares. kind is "affine", "parabola" or "exp". */
FL_API fl_status fl_family_create_nice(const char* kind, int delta_exp, double s, double t, int T,
                                       uint64_t seed, fl_family** family_out,
                                       fl_pointset** squares_out);
FL_API void fl_family_free(fl_family* family);

FL_API fl_status fl_family_size(const fl_family* family, size_t* out);
FL_API fl_status fl_family_transversality(const fl_family* family, double* t_const);
FL_API fl_status fl_family_eval(const fl_family* family, size_t i, double x, double* value,
                                double* d1, double* d2);
FL_API fl_status fl_family_c2_distance(const fl_family* family, size_t i, size_t j, double* out);

/* ------------------------------------------------------------ point sets */

/* xy holds dim coordinates per point. delta = 2^-delta_exp. */
FL_API fl_status fl_pointset_create(int dim, const double* xy, size_t n, int delta_exp,
                                    fl_pointset** out);
FL_API fl_status fl_pointset_generate(int dim, int delta_exp, double s, int T, uint64_t seed,
                                      fl_pointset** out);
FL_API void fl_pointset_free(fl_pointset* set);
FL_API fl_status fl_pointset_size(const fl_pointset* set, size_t* out);
FL_API fl_status fl_pointset_get(const fl_pointset* set, size_t i, double* x, double* y);

typedef struct fl_set_report {
  double constant;
  double center_x, center_y;
  double radius;
} fl_set_report;

FL_API fl_status fl_delta_set_constant(const fl_pointset* set, double s, fl_set_report* out);
FL_API fl_status fl_katz_tao_constant(const fl_pointset* set, double s, fl_set_report* out);
/* exact != 0 requests the exact covering number; *proven reports certification. */
FL_API fl_status fl_covering_number(const fl_pointset* set, double r, int exact, size_t* value,
                                    int* proven);

/* ------------------------------------------------------------ incidences */

/* Squares are the distinct delta-squares containing the points of a 2-D set. */
FL_API fl_status fl_incidences(const fl_family* family, const fl_pointset* squares, double lambda,
                               uint64_t* count);
FL_API fl_status fl_incidences_brute(const fl_family* family, const fl_pointset* squares,
                                     double lambda, uint64_t* count);
FL_API fl_status fl_high_low(const fl_family* family, const fl_pointset* squares, double lambda,
                             double S, double* lhs, double* high, double* low, double* fitted_c);

/* ------------------------------------------------------------ fourier */

/* Atoms are (x, y) pairs in the plane. */
FL_API fl_status fl_fourier_transform(const double* atoms_xy, const double* weights, size_t n,
                                      double xi_x, double xi_y, double* re, double* im);
FL_API fl_status fl_lp_norm_ball(const double* atoms_xy, const double* weights, size_t n, double p,
                                 double R, double h, double* out);
FL_API fl_status fl_riesz_energy(const double* atoms_xy, const double* weights, size_t n, double t,
                                 double delta, double* out);
FL_API double fl_gamma(double s, double t);

/* ------------------------------------------------------------ runner */

FL_API fl_status fl_run_config_create(fl_run_config** out);
FL_API void fl_run_config_free(fl_run_config* cfg);
FL_API fl_status fl_run_config_set(fl_run_config* cfg, const char* key, const char* value);
FL_API fl_status fl_run_config_load_file(fl_run_config* cfg, const char* path);
/* Runs the configured subcommand. *csv receives the CSV text when no output
   path is set (else an empty string); *summary the human-readable report.
   Both must be released with fl_string_free. exit_code: 0 ok, 1 usage,
   2 threshold failure. */
FL_API fl_status fl_run(const fl_run_config* cfg, char** csv, char** summary, int* exit_code);
FL_API void fl_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* FURSTLAB_FURSTLAB_H */
