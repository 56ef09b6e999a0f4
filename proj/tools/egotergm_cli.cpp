#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "egotergm/config.hpp"
#include "egotergm/errors.hpp"
#include "egotergm/pipeline.hpp"

namespace {

struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::vector<std::string> periods;
  int replications = 0;
  int jobs = 1;
};

void add_flags(CLI::App* cmd, Flags& f, bool run_flags) {
  cmd->add_option("--config", f.config, "configuration file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "override the configured seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--jobs", f.jobs, "worker threads")->check(CLI::PositiveNumber);
  if (run_flags) {
    cmd->add_option("--period", f.periods, "restrict to the named period (repeatable)");
    cmd->add_option("--replications", f.replications, "bootstrap replications")
        ->check(CLI::PositiveNumber);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ego-network TERGM role analysis"};
  app.set_version_flag("--version", egotergm::kVersion);
  app.require_subcommand(1);
  Flags f;
  auto* ingest = app.add_subcommand("ingest", "build annual networks and the exclusion report");
  auto* fit = app.add_subcommand("fit", "per-period role search");
  auto* pooled = app.add_subcommand("pooled", "bootstrapped pooled fits per role");
  auto* report = app.add_subcommand("report", "per-period model summary table");
  auto* simulate = app.add_subcommand("simulate", "write a synthetic dataset with planted roles");
  for (auto* cmd : {ingest, fit, pooled, report}) add_flags(cmd, f, true);
  add_flags(simulate, f, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  egotergm::RunOverrides o;
  if (app.got_subcommand(ingest) || app.got_subcommand(fit) || app.got_subcommand(pooled) ||
      app.got_subcommand(report) || app.got_subcommand(simulate)) {
    auto* cmd = app.get_subcommands().front();
    if (cmd->count("--seed")) o.seed = f.seed;
    if (cmd->count("--out")) o.out = f.out;
    if (cmd->get_option_no_throw("--replications") && cmd->count("--replications"))
      o.replications = f.replications;
  }
  o.periods = f.periods;
  o.jobs = f.jobs;

  try {
    if (app.got_subcommand(simulate)) {
      egotergm::cmd_simulate(egotergm::load_simulate_config(f.config), o, std::cerr);
      return 0;
    }
    const auto cfg = egotergm::load_run_config(f.config);
    if (app.got_subcommand(ingest)) egotergm::cmd_ingest(cfg, o, std::cerr);
    if (app.got_subcommand(fit)) egotergm::cmd_fit(cfg, o, std::cerr);
    if (app.got_subcommand(pooled)) egotergm::cmd_pooled(cfg, o, std::cerr);
    if (app.got_subcommand(report)) egotergm::cmd_report(cfg, o, std::cerr);
  } catch (const egotergm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
