#include <cstdio>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "furstlab/furstlab.h"

namespace {

// Flags forwarded to the run configuration under the same name.
const std::vector<std::pair<std::string, std::string>> kFlags = {
    {"delta-exp", "delta exponents k (delta = 2^-k), comma separated"},
    {"delta", "delta values (powers of two), comma separated"},
    {"s", "dimension of the square sets"},
    {"t", "dimension of the family"},
    {"T", "branching period"},
    {"kind", "affine | parabola | exp (fourier: parabola | point)"},
    {"seeds", "number of trials; trial i uses seed + i"},
    {"seed", "master seed"},
    {"lambda", "incidence neighbourhood factor"},
    {"S", "high-low scale factors, comma separated"},
    {"p", "Lebesgue exponent"},
    {"R", "radii, comma separated"},
    {"grid-n", "C2 evaluation grid size"},
    {"out", "output CSV (suite: directory)"},
    {"eta-max", "threshold for eta_emp"},
    {"slope-max", "threshold for the Fourier decay slope"},
    {"threads", "worker threads (FURSTLAB_THREADS overrides)"},
    {"input", "point CSV for check-set"},
    {"dim", "dimension for gen"},
    {"Delta-exp", "intermediate scale exponent for mainlem"},
    {"eps", "epsilon for mainlem"},
    {"c0", "fixed high-low constant instead of calibration"},
    {"calib-exp", "calibration delta exponent for highlow"},
    {"correlated", "share one column set across curves"},
    {"step", "frequency grid step h"},
    {"c-max", "threshold for the check-set constant"},
    {"atoms", "number of atoms of the parabola lift"},
};

const std::vector<std::pair<std::string, std::string>> kSubcommands = {
    {"gen", "generate a (delta,s)-set of points"},
    {"check-set", "measure set-class constants of a point CSV"},
    {"incidence", "count incidences of a nice configuration"},
    {"highlow", "high-low inequality with calibrated constant"},
    {"furstenberg", "Furstenberg-type lower bound experiment"},
    {"mainlem", "sweep of the P_{a,b} bound on line families"},
    {"fourier", "L^p norms of the Fourier transform on balls"},
    {"suite", "all experiments, CSVs into a directory"},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"furst-lab: discretized Furstenberg and incidence experiments"};
  app.set_version_flag("--version", fl_version());
  app.require_subcommand(1);
  std::string config_path;
  std::map<std::string, std::string> values;
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : kSubcommands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "key=value configuration file");
    for (const auto& [flag, fhelp] : kFlags) sub->add_option("--" + flag, values[flag], fhelp);
    subs.push_back(sub);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  CLI::App* chosen = app.get_subcommands().front();
  fl_run_config* cfg = nullptr;
  if (fl_run_config_create(&cfg) != FL_OK) {
    std::fprintf(stderr, "error: %s\n", fl_last_error_message());
    return 1;
  }
  auto bail = [&](const char* what) {
    std::fprintf(stderr, "error: %s%s\n", what, fl_last_error_message());
    fl_run_config_free(cfg);
    return 1;
  };
  if (!config_path.empty() && fl_run_config_load_file(cfg, config_path.c_str()) != FL_OK) return bail("");
  if (fl_run_config_set(cfg, "subcommand", chosen->get_name().c_str()) != FL_OK) return bail("");
  for (const auto& [flag, help] : kFlags) {
    if (chosen->count("--" + flag) == 0) continue;
    if (fl_run_config_set(cfg, flag.c_str(), values[flag].c_str()) != FL_OK) return bail("");
  }

  char* csv = nullptr;
  char* summary = nullptr;
  int code = 1;
  if (fl_run(cfg, &csv, &summary, &code) != FL_OK) return bail("run failed: ");
  const bool has_csv = csv && *csv;
  if (has_csv) std::fputs(csv, stdout);
  std::fputs(summary, has_csv ? stderr : stdout);
  fl_string_free(csv);
  fl_string_free(summary);
  fl_run_config_free(cfg);
  return code;
}
