// drtplan: command-line front end over the C API.
//
//   drtplan run   --config scenario.json [--fleet-size N] [--alpha A] [--mode acceq|baseline] [--seed S] [--out DIR]
//   drtplan sweep --config scenario.json --sizes 0,4,8,12 [...same overrides] [--csv FILE]
//   drtplan synth --dir DIR [--seed S] [--rows R] [--cols C]
//
// Exit codes: 0 ok, 1 config error, 2 data error, 3 infeasible scenario.
#include <cstdio>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "drtplan/drtplan.h"

namespace {

int exit_code(drt_status s) {
  switch (s) {
    case DRT_OK: return 0;
    case DRT_ERR_CONFIG:
    case DRT_ERR_INVALID_ARGUMENT: return 1;
    case DRT_ERR_DATA:
    case DRT_ERR_INTERNAL: return 2;
    case DRT_ERR_INFEASIBLE: return 3;
  }
  return 2;
}

int report(drt_status s) {
  if (s != DRT_OK) std::fprintf(stderr, "drtplan: error: %s\n", drt_last_error());
  return exit_code(s);
}

struct Overrides {
  std::string config;
  std::optional<int> fleet_size;
  std::optional<double> alpha;
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config, "scenario JSON file")->required();
    cmd->add_option("--fleet-size", fleet_size, "number of DRT buses N");
    cmd->add_option("--alpha", alpha, "score weight of the accessibility rank");
    cmd->add_option("--mode", mode, "acceq or baseline");
    cmd->add_option("--seed", seed, "random seed (baseline mode)");
    cmd->add_option("--out", out, "output directory");
  }

  drt_status apply(drt_scenario* s) const {
    drt_status st = DRT_OK;
    if (fleet_size && (st = drt_scenario_set_fleet_size(s, *fleet_size)) != DRT_OK) return st;
    if (alpha && (st = drt_scenario_set_alpha(s, *alpha)) != DRT_OK) return st;
    if (mode && (st = drt_scenario_set_mode(s, mode->c_str())) != DRT_OK) return st;
    if (seed && (st = drt_scenario_set_seed(s, *seed)) != DRT_OK) return st;
    if (out && (st = drt_scenario_set_output_dir(s, out->c_str())) != DRT_OK) return st;
    return st;
  }
};

struct Handle {
  drt_scenario* s = nullptr;
  ~Handle() { drt_scenario_free(s); }
};

int cmd_run(const Overrides& o) {
  Handle h;
  drt_status st = drt_scenario_load(o.config.c_str(), &h.s);
  if (st == DRT_OK) st = o.apply(h.s);
  if (st == DRT_OK) st = drt_scenario_run(h.s, 1);
  if (st != DRT_OK) return report(st);
  drt_inequality_report before{}, after{};
  drt_scenario_before(h.s, &before);
  drt_scenario_after(h.s, &after);
  std::printf("atkinson %.6f -> %.6f\nmean accessibility %.1f -> %.1f\n", before.atkinson, after.atkinson,
              before.mean, after.mean);
  return 0;
}

int cmd_sweep(const Overrides& o, const std::vector<int>& sizes, const std::string& csv) {
  Handle h;
  drt_status st = drt_scenario_load(o.config.c_str(), &h.s);
  if (st == DRT_OK) st = o.apply(h.s);
  if (st == DRT_OK) st = drt_scenario_sweep(h.s, sizes.data(), sizes.size(), csv.c_str());
  if (st != DRT_OK) return report(st);
  std::printf("wrote %s\n", csv.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equity-oriented allocation of demand-responsive feeder buses"};
  app.set_version_flag("--version", std::string(drt_version()));
  app.require_subcommand(1);

  Overrides run_opts;
  CLI::App* run = app.add_subcommand("run", "run one scenario and write its artifacts");
  run_opts.attach(run);

  Overrides sweep_opts;
  std::vector<int> sizes;
  std::string csv = "sweep.csv";
  CLI::App* sweep = app.add_subcommand("sweep", "metrics over ascending fleet sizes");
  sweep_opts.attach(sweep);
  sweep->add_option("--sizes", sizes, "fleet sizes, ascending")->required()->delimiter(',');
  sweep->add_option("--csv", csv, "output CSV path");

  std::string dir;
  std::uint64_t seed = 7;
  int rows = 10, cols = 10;
  CLI::App* synth = app.add_subcommand("synth", "write a synthetic test city (GTFS, population, scenario.json)");
  synth->add_option("--dir", dir, "target directory")->required();
  synth->add_option("--seed", seed, "population seed");
  synth->add_option("--rows", rows, "tile rows");
  synth->add_option("--cols", cols, "tile columns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (run->parsed()) return cmd_run(run_opts);
  if (sweep->parsed()) return cmd_sweep(sweep_opts, sizes, csv);
  if (synth->parsed()) {
    const drt_status st = drt_write_synthetic_city(dir.c_str(), seed, rows, cols);
    if (st != DRT_OK) return report(st);
    std::printf("wrote synthetic city to %s\n", dir.c_str());
  }
  return 0;
}
