#include "furstlab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "furstlab/config.hpp"
#include "furstlab/dyadic.hpp"
#include "furstlab/error.hpp"
#include "furstlab/fourier.hpp"
#include "furstlab/incidence.hpp"
#include "furstlab/parallel.hpp"

namespace furstlab::cli {

namespace {

const std::vector<std::string> kKeys = {
    "subcommand", "kind",  "delta-exp", "delta",     "s",     "t",     "T",
    "lambda",     "S",     "p",         "R",         "seeds", "seed",  "out",
    "grid-n",     "eta-max", "slope-max", "c0",      "calib-exp", "threads", "input",
    "dim",        "Delta-exp", "eps",   "correlated", "step",    "c-max", "atoms"};

const std::set<std::string> kSubcommands = {"gen",        "check-set", "incidence", "highlow",
                                            "furstenberg", "mainlem",  "fourier",   "suite"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void usage(const std::string& msg) { fail(ErrorKind::InvalidArgument, msg); }

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || !std::isfinite(x)) usage("invalid number for " + key + ": '" + v + "'");
  return x;
}

long long parse_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0') usage("invalid integer for " + key + ": '" + v + "'");
  return x;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  usage("invalid boolean for " + key + ": '" + v + "'");
}

int level_of_delta(const std::string& v) {
  const double d = parse_double("delta", v);
  int e = 0;
  if (!(d > 0.0 && d <= 1.0) || std::frexp(d, &e) != 0.5) usage("delta must be a power of two in (0, 1]: '" + v + "'");
  return 1 - e;
}

bool is_power_of_two(double x) {
  int e = 0;
  return x > 0.0 && std::frexp(x, &e) == 0.5;
}

// Typed view of a RunConfig with subcommand defaults applied.
struct Settings {
  std::string sub;
  std::string kind = "parabola";
  std::vector<int> levels;
  double s = 0.5, t = 1.0;
  int T = 0;  // 0: choose per level set
  double lambda = 2.0;
  std::vector<double> S;
  double p = 8.0;
  std::vector<double> R{4, 8, 16, 32, 64};
  int seeds = 1;
  std::uint64_t seed = 0;
  std::string out;
  int grid_n = family::kDefaultGridN;
  double eta_max = 0.5;
  double slope_max = 0.3;
  std::optional<double> c0;
  int calib_level = 6;
  unsigned threads = 1;
  std::string input;
  int dim = 2;
  int Delta_level = 4;
  double eps = 0.25;
  bool correlated = false;
  double h = 0.125;
  std::optional<double> c_max;
  int atoms = 1025;
};

Settings resolve(const RunConfig& cfg) {
  const auto& v = cfg.values();
  auto get = [&](const std::string& k) -> const std::string* {
    auto it = v.find(k);
    return it == v.end() ? nullptr : &it->second;
  };
  Settings st;
  if (!get("subcommand")) usage("no subcommand given");
  st.sub = *get("subcommand");
  if (!kSubcommands.count(st.sub)) usage("unknown subcommand '" + st.sub + "'");

  // subcommand defaults
  if (st.sub == "furstenberg") {
    st.levels = {9};
    st.seeds = 20;
  } else if (st.sub == "incidence") {
    st.levels = {8};
  } else if (st.sub == "highlow") {
    st.levels = {7, 8, 9, 10};
    st.s = 1.0;
    st.t = 1.0;
    st.T = 1;
    st.seeds = 3;
  } else if (st.sub == "mainlem") {
    st.levels = {8};
    st.kind = "affine";
  } else if (st.sub == "gen") {
    st.levels = {8};
    st.s = 1.0;
  } else if (st.sub == "suite") {
    st.seeds = 20;
    st.out = "furst-lab-suite";
  }

  if (auto x = get("kind")) st.kind = *x;
  if (auto x = get("delta-exp")) {
    st.levels.clear();
    for (const auto& item : split_list(*x)) st.levels.push_back(static_cast<int>(parse_int("delta-exp", item)));
  }
  if (auto x = get("delta")) {
    st.levels.clear();
    for (const auto& item : split_list(*x)) st.levels.push_back(level_of_delta(item));
  }
  if (auto x = get("s")) st.s = parse_double("s", *x);
  if (auto x = get("t")) st.t = parse_double("t", *x);
  if (auto x = get("T")) st.T = static_cast<int>(parse_int("T", *x));
  if (auto x = get("lambda")) st.lambda = parse_double("lambda", *x);
  if (auto x = get("S"))
    for (const auto& item : split_list(*x)) st.S.push_back(parse_double("S", item));
  if (auto x = get("p")) st.p = parse_double("p", *x);
  if (auto x = get("R")) {
    st.R.clear();
    for (const auto& item : split_list(*x)) st.R.push_back(parse_double("R", item));
  }
  if (auto x = get("seeds")) st.seeds = static_cast<int>(parse_int("seeds", *x));
  if (auto x = get("seed")) st.seed = static_cast<std::uint64_t>(parse_int("seed", *x));
  if (auto x = get("out")) st.out = *x;
  if (auto x = get("grid-n")) st.grid_n = static_cast<int>(parse_int("grid-n", *x));
  if (auto x = get("eta-max")) st.eta_max = parse_double("eta-max", *x);
  if (auto x = get("slope-max")) st.slope_max = parse_double("slope-max", *x);
  if (auto x = get("c0")) st.c0 = parse_double("c0", *x);
  if (auto x = get("calib-exp")) st.calib_level = static_cast<int>(parse_int("calib-exp", *x));
  if (auto x = get("threads")) st.threads = static_cast<unsigned>(std::max<long long>(1, parse_int("threads", *x)));
  if (auto x = get("input")) st.input = *x;
  if (auto x = get("dim")) st.dim = static_cast<int>(parse_int("dim", *x));
  if (auto x = get("Delta-exp")) st.Delta_level = static_cast<int>(parse_int("Delta-exp", *x));
  if (auto x = get("eps")) st.eps = parse_double("eps", *x);
  if (auto x = get("correlated")) st.correlated = parse_bool("correlated", *x);
  if (auto x = get("step")) st.h = parse_double("step", *x);
  if (auto x = get("c-max")) st.c_max = parse_double("c-max", *x);
  if (auto x = get("atoms")) st.atoms = static_cast<int>(parse_int("atoms", *x));
  if (st.S.empty()) st.S = {2.0 * st.lambda, 4.0 * st.lambda, 8.0 * st.lambda};

  // validation
  for (int L : st.levels)
    if (L < 0 || L > 30) usage("delta exponent must lie in [0, 30]");
  if (st.seeds < 1) usage("seed list must be nonempty (seeds >= 1)");
  if (!(st.eta_max > 0.0) || !(st.slope_max > 0.0)) usage("thresholds must be positive");
  if (st.c0 && !(*st.c0 > 0.0)) usage("c0 must be positive");
  if (st.c_max && !(*st.c_max > 0.0)) usage("c-max must be positive");
  if (st.T < 0) usage("T must be positive");
  if (st.T > 0)
    for (int L : st.levels)
      if (L % st.T != 0) usage("delta exponent " + std::to_string(L) + " is not a multiple of T");
  for (double r : st.R)
    if (!is_power_of_two(r) || r < 1.0) usage("radii must be dyadic and >= 1");
  for (double x : st.S)
    if (!is_power_of_two(x)) usage("S must be a power of two");
  if (!is_power_of_two(st.h)) usage("grid step h must be a power of two");
  if (st.grid_n < 3) usage("grid-n must be >= 3");
  if (st.dim != 1 && st.dim != 2) usage("dim must be 1 or 2");
  if (st.sub == "check-set" && st.input.empty()) usage("check-set needs --input");
  if (st.kind != "point") config::parse_kind(st.kind);
  return st;
}

int auto_T(const std::vector<int>& levels) {
  for (int T : {3, 4, 2})
    if (std::all_of(levels.begin(), levels.end(), [T](int L) { return L > 0 && L % T == 0; })) return T;
  return 1;
}

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string hex64(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

class Csv {
 public:
  explicit Csv(std::string header) : text_(std::move(header) + "\n") {}
  void row(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) text_ += (k ? "," : "") + cells[k];
    text_ += "\n";
  }
  std::string finish(std::uint64_t hash) const {
    return text_ + "# furst-lab " + kVersion + " config=" + hex64(hash) + "\n";
  }

 private:
  std::string text_;
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::Io, "cannot write " + path);
  f << text;
  if (!f) fail(ErrorKind::Io, "write failed for " + path);
}

struct Section {
  std::string csv;
  std::string summary;
  bool passed = true;
};

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

config::BuildOptions bulk_options(const Settings& st) {
  config::BuildOptions o;
  o.audit = false;
  o.correlated = st.correlated;
  o.grid_n = st.grid_n;
  return o;
}

// ---------------------------------------------------------------- furstenberg

struct FurstCell {
  double s, t;
  int level;
  int T;
};

std::vector<config::ExperimentResult> furstenberg_runs(const Settings& st,
                                                       const std::vector<FurstCell>& cells) {
  struct Job {
    FurstCell cell;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& c : cells)
    for (int i = 0; i < st.seeds; ++i) jobs.push_back({c, st.seed + static_cast<std::uint64_t>(i)});
  std::vector<config::ExperimentResult> res(jobs.size());
  const auto kind = config::parse_kind(st.kind);
  const auto opts = bulk_options(st);
  parallel_for(jobs.size(), [&](std::size_t k) {
    const auto& j = jobs[k];
    const auto conf = config::build_nice_configuration(kind, j.cell.level, j.cell.s, j.cell.t,
                                                       j.cell.T, j.seed, opts);
    res[k] = config::furstenberg_experiment(conf);
  });
  std::stable_sort(res.begin(), res.end(), [](const auto& a, const auto& b) {
    if (a.s != b.s) return a.s < b.s;
    if (a.t != b.t) return a.t < b.t;
    if (a.level != b.level) return a.level < b.level;
    return a.seed < b.seed;
  });
  return res;
}

Csv furstenberg_csv(const std::vector<config::ExperimentResult>& res) {
  Csv csv("kind,delta_exp,s,t,T,seed,F_size,M,P_size,bound,eta_emp");
  for (const auto& r : res)
    csv.row({r.kind, std::to_string(r.level), num(r.s), num(r.t), std::to_string(r.T),
             std::to_string(r.seed), std::to_string(r.F_size), std::to_string(r.M),
             std::to_string(r.P_size), num(r.bound), num(r.eta_emp)});
  return csv;
}

Section run_furstenberg(const Settings& st, std::uint64_t hash) {
  const int T = st.T ? st.T : auto_T(st.levels);
  std::vector<FurstCell> cells;
  for (int L : st.levels) cells.push_back({st.s, st.t, L, T});
  const auto res = furstenberg_runs(st, cells);
  Section sec;
  double worst = 0.0;
  for (const auto& r : res) worst = std::max(worst, r.eta_emp);
  sec.passed = worst <= st.eta_max;
  sec.csv = furstenberg_csv(res).finish(hash);
  sec.summary = "furstenberg: " + std::to_string(res.size()) + " runs, max eta_emp " + num(worst) +
                " (threshold " + num(st.eta_max) + ") " + (sec.passed ? "PASS" : "FAIL") + "\n";
  return sec;
}

// ---------------------------------------------------------------- incidence

Section run_incidence(const Settings& st, std::uint64_t hash) {
  const int T = st.T ? st.T : auto_T(st.levels);
  const auto kind = config::parse_kind(st.kind);
  Csv csv("kind,delta_exp,s,t,T,seed,F_size,P_size,lambda,incidences,brute");
  Section sec;
  for (int L : st.levels)
    for (int i = 0; i < st.seeds; ++i) {
      const std::uint64_t seed = st.seed + static_cast<std::uint64_t>(i);
      const auto conf = config::build_nice_configuration(kind, L, st.s, st.t, T, seed, bulk_options(st));
      const auto P = config::union_of_squares(conf);
      const auto fast = incidence::incidences(conf.F, P, st.lambda, false).count;
      std::string brute = "skipped";
      if (static_cast<double>(conf.F.size()) * static_cast<double>(P.size()) <= 5e7) {
        const auto b = incidence::incidences_brute(conf.F, P, st.lambda);
        brute = std::to_string(b);
        if (b != fast) sec.passed = false;
      }
      csv.row({conf.kind, std::to_string(L), num(st.s), num(st.t), std::to_string(T), std::to_string(seed),
               std::to_string(conf.F.size()), std::to_string(P.size()), num(st.lambda),
               std::to_string(fast), brute});
    }
  sec.csv = csv.finish(hash);
  sec.summary = std::string("incidence: fast and brute-force counts ") +
                (sec.passed ? "agree PASS" : "DIFFER FAIL") + "\n";
  return sec;
}

// ---------------------------------------------------------------- highlow

struct HighLowRow {
  std::string kind;
  int level;
  std::uint64_t seed;
  incidence::HighLowReport rep;
};

std::vector<HighLowRow> highlow_rows(const Settings& st, const std::string& kind_name,
                                     const std::vector<int>& levels) {
  const auto kind = config::parse_kind(kind_name);
  struct Job {
    int level;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (int L : levels)
    for (int i = 0; i < st.seeds; ++i) jobs.push_back({L, st.seed + static_cast<std::uint64_t>(i)});
  std::vector<std::vector<HighLowRow>> out(jobs.size());
  const int T = st.T ? st.T : 1;
  parallel_for(jobs.size(), [&](std::size_t k) {
    const auto conf = config::build_nice_configuration(kind, jobs[k].level, st.s, st.t, T,
                                                       jobs[k].seed, bulk_options(st));
    const auto P = config::union_of_squares(conf);
    for (double S : st.S)
      out[k].push_back({conf.kind, jobs[k].level, jobs[k].seed,
                        incidence::high_low_report(conf.F, P, st.lambda, S)});
  });
  std::vector<HighLowRow> rows;
  for (auto& v : out) rows.insert(rows.end(), v.begin(), v.end());
  return rows;
}

Section run_highlow(const Settings& st, std::uint64_t hash, const std::vector<std::string>& kinds) {
  Csv csv("kind,delta_exp,seed,lambda,S,F_size,P_size,lhs,high,low,fitted_C,C0,role,holds");
  Section sec;
  std::string summary;
  for (const auto& kind : kinds) {
    double C0 = 0.0;
    std::vector<HighLowRow> calib;
    if (st.c0) {
      C0 = *st.c0;
    } else {
      calib = highlow_rows(st, kind, {st.calib_level});
      for (const auto& r : calib) C0 = std::max(C0, r.rep.fitted_C);
    }
    const auto rows = highlow_rows(st, kind, st.levels);
    std::size_t fails = 0;
    for (const auto& r : calib)
      csv.row({r.kind, std::to_string(r.level), std::to_string(r.seed), num(r.rep.lambda), num(r.rep.S),
               std::to_string(r.rep.F_size), std::to_string(r.rep.P_size), num(r.rep.lhs),
               num(r.rep.high_term), num(r.rep.low_term), num(r.rep.fitted_C), num(C0), "calibrate",
               "1"});
    for (const auto& r : rows) {
      const bool holds = r.rep.holds_with(C0);
      if (!holds) ++fails;
      csv.row({r.kind, std::to_string(r.level), std::to_string(r.seed), num(r.rep.lambda), num(r.rep.S),
               std::to_string(r.rep.F_size), std::to_string(r.rep.P_size), num(r.rep.lhs),
               num(r.rep.high_term), num(r.rep.low_term), num(r.rep.fitted_C), num(C0), "check",
               holds ? "1" : "0"});
    }
    if (fails) sec.passed = false;
    summary += "highlow " + kind + ": C0 " + num(C0) + ", " + std::to_string(rows.size()) +
               " checks, " + std::to_string(fails) + " failures " + (fails ? "FAIL" : "PASS") + "\n";
  }
  sec.csv = csv.finish(hash);
  sec.summary = summary;
  return sec;
}

// ---------------------------------------------------------------- mainlem

Section run_mainlem(const Settings& st, std::uint64_t hash) {
  Csv csv("delta_exp,Delta_exp,seed,a,b,hypothesis,P_ab,P_ab_without_i,bound,violation");
  Section sec;
  std::size_t violations = 0, cells = 0, squares_i = 0;
  for (int L : st.levels)
    for (int i = 0; i < st.seeds; ++i) {
      const std::uint64_t seed = st.seed + static_cast<std::uint64_t>(i);
      const auto params = dyadic::generate_delta_set(2, L, st.t, 1, seed);
      const auto F = config::line_family(params.points(), st.grid_n);
      const auto rep = config::mainlem_experiment(F, L, st.Delta_level, st.eps, st.lambda);
      for (const auto& c : rep.cells) {
        ++cells;
        csv.row({std::to_string(L), std::to_string(st.Delta_level), std::to_string(seed),
                 std::to_string(c.a), std::to_string(c.b), c.hypothesis ? "1" : "0",
                 std::to_string(c.P_ab), std::to_string(c.P_ab_without_i), num(c.bound), c.violation ? "1" : "0"});
      }
      violations += rep.violations;
      squares_i += rep.hypothesis_i_squares;
    }
  sec.passed = violations == 0;
  sec.csv = csv.finish(hash);
  sec.summary = "mainlem: " + std::to_string(cells) + " (a,b) cells, " + std::to_string(violations) +
                " violations, " + std::to_string(squares_i) + " squares satisfy condition (i) " +
                (sec.passed ? "PASS" : "FAIL") + "\n";
  return sec;
}

// ---------------------------------------------------------------- fourier

Section run_fourier(const Settings& st, std::uint64_t hash, const std::string& kind) {
  fourier::DecayTable tab;
  if (kind == "point") {
    const dyadic::AtomicMeasure pm(2, {{0.0, 0.0}}, {1.0});
    tab = fourier::decay_slope(pm, st.p, st.R, st.h);
  } else if (kind == "parabola") {
    const auto lift = fourier::uniform_parabola_lift(static_cast<std::size_t>(st.atoms), 1.0);
    tab = fourier::decay_slope(lift.measure, st.p, st.R, st.h);
  } else {
    usage("fourier supports kind parabola or point");
  }
  Csv csv("R,p,integral,slope_cum");
  for (std::size_t k = 0; k < tab.R.size(); ++k)
    csv.row({num(tab.R[k]), num(st.p), num(tab.integral[k]), num(tab.slope_cum[k])});
  Section sec;
  sec.passed = kind == "point" ? std::abs(tab.slope - 2.0) <= 0.05 : tab.slope <= st.slope_max;
  sec.csv = csv.finish(hash);
  sec.summary = "fourier " + kind + ": slope " + num(tab.slope) +
                (kind == "point" ? " (expected 2 +- 0.05) " : " (threshold " + num(st.slope_max) + ") ") +
                (sec.passed ? "PASS" : "FAIL") + "\n";
  return sec;
}

// ---------------------------------------------------------------- gen / check-set

Section run_gen(const Settings& st, std::uint64_t hash) {
  const int L = st.levels.front();
  const int T = st.T ? st.T : auto_T({L});
  const auto P = dyadic::generate_delta_set(st.dim, L, st.s, T, st.seed);
  Csv csv(st.dim == 2 ? "x,y" : "x");
  for (const auto& p : P.points()) {
    char buf[80];
    if (st.dim == 2)
      std::snprintf(buf, sizeof buf, "%.17g,%.17g", p[0], p[1]);
    else
      std::snprintf(buf, sizeof buf, "%.17g", p[0]);
    csv.row({buf});
  }
  Section sec;
  sec.csv = csv.finish(hash);
  sec.summary = "gen: " + std::to_string(P.size()) + " points at delta = 2^-" + std::to_string(L) + "\n";
  return sec;
}

// Smallest level at which all points fall in distinct cells.
int infer_level(const std::vector<dyadic::Point>& pts, int dim) {
  for (int L = 0; L <= 52; ++L)
    if (dyadic::dyadic_cover(pts, dim, L).size() == pts.size()) return L;
  usage("points are too close to infer a dyadic scale");
}

Section run_check_set(const Settings& st, const RunConfig& cfg, std::uint64_t hash) {
  const auto data = dyadic::read_points_csv(st.input);
  if (data.points.empty()) usage("input has no points");
  const int L = (cfg.has("delta-exp") || cfg.has("delta")) ? st.levels.front() : infer_level(data.points, data.dim);
  const dyadic::DiscretePointSet P(data.dim, data.points, L);
  Csv csv("quantity,exponent,value,center_x,center_y,radius");
  auto add = [&](const std::string& q, double e, const dyadic::SetClassReport& r) {
    csv.row({q, num(e), num(r.best_constant), num(r.witness_center[0]), num(r.witness_center[1]),
             num(r.witness_radius)});
  };
  const auto ds = dyadic::delta_set_constant(P, L, st.s);
  const auto kt = dyadic::katz_tao_constant(P, L, st.s);
  add("delta_set_constant", st.s, ds);
  add("katz_tao_constant", st.s, kt);
  Section sec;
  sec.passed = !st.c_max || ds.best_constant <= *st.c_max;
  sec.csv = csv.finish(hash);
  sec.summary = "check-set: " + std::to_string(P.size()) + " points, delta = 2^-" + std::to_string(L) +
                ", (delta," + num(st.s) + ")-constant " + num(ds.best_constant) + " at r = " +
                num(ds.witness_radius) + ", Katz-Tao constant " + num(kt.best_constant);
  if (st.c_max) sec.summary += std::string(" (limit ") + num(*st.c_max) + ") " + (sec.passed ? "PASS" : "FAIL");
  sec.summary += "\n";
  return sec;
}

// ---------------------------------------------------------------- suite

Section run_endpoints(const Settings& st, std::uint64_t hash) {
  const int L = 8, T = 4;
  const double s = 0.5;
  Csv csv("generator,delta_exp,s,seed,F_size,M,P_size,katz_tao_K,delta_set_C,ratio,target,passed");
  Section sec;
  const double target = std::exp2(-0.4 * L);
  struct Row {
    std::string gen;
    std::uint64_t seed;
    std::size_t F, M;
    config::EndpointReport rep;
    double ratio;
  };
  std::vector<Row> rows(2 * static_cast<std::size_t>(st.seeds));
  config::BuildOptions o = bulk_options(st);
  parallel_for(rows.size(), [&](std::size_t k) {
    const std::uint64_t seed = st.seed + k / 2;
    if (k % 2 == 0) {
      const auto conf = config::build_nice_configuration(config::CurveKind::Parabola, L, s, 2.0 - s, T, seed, o);
      const auto rep = config::endpoint_checks(conf);
      rows[k] = {"dense", seed, conf.F.size(), conf.M, rep, rep.ratio_dense};
    } else {
      const auto conf = config::katz_tao_configuration(L, s, T, seed, o);
      const auto rep = config::endpoint_checks(conf);
      rows[k] = {"katz-tao", seed, conf.F.size(), conf.M, rep, rep.ratio_katz_tao};
    }
  });
  for (const auto& r : rows) {
    const bool ok = r.ratio >= target;
    if (!ok) sec.passed = false;
    csv.row({r.gen, std::to_string(L), num(s), std::to_string(r.seed), std::to_string(r.F),
             std::to_string(r.M), std::to_string(r.rep.P_size), num(r.rep.katz_tao_K),
             num(r.rep.delta_set_C), num(r.ratio), num(target), ok ? "1" : "0"});
  }
  sec.csv = csv.finish(hash);
  sec.summary = std::string("endpoints: ") + (sec.passed ? "PASS" : "FAIL") + "\n";
  return sec;
}

Section run_suite(const Settings& st, std::uint64_t hash) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(st.out, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory " + st.out);
  Section total;

  // Furstenberg at delta = 2^-6 and 2^-9 for the three (s, t) pairs.
  Settings fs_st = st;
  fs_st.kind = "parabola";
  std::vector<FurstCell> cells;
  const std::vector<std::pair<double, double>> pairs = {{0.5, 1.0}, {0.5, 0.5}, {0.9, 1.5}};
  for (const auto& [s, t] : pairs)
    for (int L : {6, 9}) cells.push_back({s, t, L, 3});
  const auto res = furstenberg_runs(fs_st, cells);
  bool furst_ok = true;
  std::string fsum;
  for (const auto& [s, t] : pairs) {
    std::vector<double> e6, e9;
    for (const auto& r : res)
      if (r.s == s && r.t == t) (r.level == 6 ? e6 : e9).push_back(r.eta_emp);
    const double worst = *std::max_element(e9.begin(), e9.end());
    const bool ok = worst <= st.eta_max && median(e9) <= median(e6);
    furst_ok = furst_ok && ok;
    fsum += "furstenberg (s,t)=(" + num(s) + "," + num(t) + "): max eta_emp " + num(worst) +
            ", median 2^-9 " + num(median(e9)) + " vs 2^-6 " + num(median(e6)) + (ok ? " PASS" : " FAIL") + "\n";
  }
  write_file((fs::path(st.out) / "furstenberg.csv").string(), furstenberg_csv(res).finish(hash));
  total.summary += fsum;
  total.passed = furst_ok;

  Settings sub = st;
  sub.seeds = std::min(st.seeds, 10);
  auto add = [&](const std::string& name, const Section& sec) {
    write_file((fs::path(st.out) / name).string(), sec.csv);
    total.summary += sec.summary;
    total.passed = total.passed && sec.passed;
  };
  add("endpoints.csv", run_endpoints(sub, hash));

  Settings hl = st;
  hl.levels = {7, 8, 9, 10};
  hl.s = 1.0;
  hl.t = 1.0;
  hl.T = 1;
  hl.seeds = std::min(st.seeds, 3);
  hl.S = {2.0 * st.lambda, 4.0 * st.lambda, 8.0 * st.lambda};
  add("highlow.csv", run_highlow(hl, hash, {"affine", "parabola"}));

  Settings ml = st;
  ml.levels = {8};
  ml.t = 1.0;
  ml.seeds = std::min(st.seeds, 3);
  add("mainlem.csv", run_mainlem(ml, hash));

  add("fourier_parabola.csv", run_fourier(st, hash, "parabola"));
  add("fourier_point.csv", run_fourier(st, hash, "point"));
  return total;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
    fail(ErrorKind::InvalidArgument, "unknown configuration key: " + key);
  values_[key] = trim(value);
}

void RunConfig::load_text(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  std::vector<std::string> unknown;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::InvalidArgument, "line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      unknown.push_back(key);
      continue;
    }
    values_[key] = trim(line.substr(eq + 1));
  }
  if (!unknown.empty()) {
    std::string msg = "unknown configuration keys:";
    for (const auto& k : unknown) msg += " " + k;
    fail(ErrorKind::InvalidArgument, msg);
  }
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::Io, "cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  load_text(ss.str());
}

const std::vector<std::string>& RunConfig::known_keys() { return kKeys; }

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [k, v] : values_) {
    if (k == "out" || k == "threads") continue;
    feed(k);
    feed("=");
    feed(v);
    feed("\n");
  }
  return h;
}

RunOutput run(const RunConfig& cfg) {
  RunOutput out;
  const auto start = std::chrono::steady_clock::now();
  Settings st;
  try {
    st = resolve(cfg);
  } catch (const Error& e) {
    out.exit_code = kExitUsage;
    out.summary = std::string("error: ") + e.what() + "\n";
    return out;
  }
  unsigned threads = st.threads;
  if (const char* env = std::getenv("FURSTLAB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*env != '\0' && *end == '\0' && v > 0) threads = static_cast<unsigned>(v);
  }
  const unsigned saved = thread_count();
  set_thread_count(threads);
  const std::uint64_t hash = cfg.hash();
  Section sec;
  try {
    if (st.sub == "furstenberg") sec = run_furstenberg(st, hash);
    else if (st.sub == "incidence") sec = run_incidence(st, hash);
    else if (st.sub == "highlow") sec = run_highlow(st, hash, {st.kind});
    else if (st.sub == "mainlem") sec = run_mainlem(st, hash);
    else if (st.sub == "fourier") sec = run_fourier(st, hash, st.kind);
    else if (st.sub == "gen") sec = run_gen(st, hash);
    else if (st.sub == "check-set") sec = run_check_set(st, cfg, hash);
    else sec = run_suite(st, hash);
    if (st.sub != "suite") {
      if (st.out.empty())
        out.csv = sec.csv;
      else
        write_file(st.out, sec.csv);
    }
  } catch (const Error& e) {
    set_thread_count(saved);
    out.exit_code = kExitUsage;
    out.summary = std::string("error: ") + e.what() + "\n";
    return out;
  }
  set_thread_count(saved);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  char buf[160];
  std::snprintf(buf, sizeof buf, "furst-lab %s config=%s threads=%u wall=%.3fs\n", kVersion,
                hex64(hash).c_str(), threads, wall);
  out.summary = sec.summary + buf;
  out.exit_code = sec.passed ? kExitOk : kExitThreshold;
  return out;
}

}  // namespace furstlab::cli
