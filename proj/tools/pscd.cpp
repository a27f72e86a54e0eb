// pscd: simulate the sequential procedure, run oracle cross-checks, and print
// detection schedules.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "pscd/checks.hpp"
#include "pscd/config.hpp"
#include "pscd/io.hpp"

namespace fs = std::filesystem;

namespace {

struct SimulateArgs {
  std::string config;
  std::optional<std::size_t> reps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> rule;
  std::optional<std::size_t> k;
  std::optional<std::string> trace;
};

/// Removes the files it tracks unless committed.
class OutputGuard {
 public:
  void track(fs::path p) { files_.push_back(std::move(p)); }
  void commit() { files_.clear(); }
  ~OutputGuard() {
    std::error_code ec;
    for (const auto& f : files_) fs::remove(f, ec);
  }

 private:
  std::vector<fs::path> files_;
};

void write_file(const fs::path& path, OutputGuard& guard, auto&& writer) {
  guard.track(path);
  std::ofstream out(path);
  if (!out) throw pscd::Error("cannot write " + path.string());
  writer(out);
  if (!out) throw pscd::Error("write failed for " + path.string());
}

int simulate(const SimulateArgs& args) {
  pscd::ConfigFile cfg = pscd::load_config(args.config);
  auto& ex = cfg.experiment;
  if (args.reps) ex.replications = *args.reps;
  if (args.seed) ex.seed = *args.seed;
  if (args.out) cfg.out_dir = *args.out;
  if (args.rule) ex.rule = pscd::parse_rule(*args.rule);
  if (args.k) ex.streams = *args.k;
  ex.validate();
  if (!ex.pair.admissible()) {
    std::cerr << "pscd: warning: " << ex.pair.risk.name() << " / " << ex.pair.utility.name()
              << " is not an admissible pair; the simplified rule may not be locally optimal\n";
  }

  OutputGuard guard;
  fs::create_directories(cfg.out_dir);
  const pscd::AggregateReport report = pscd::run_experiment(ex);
  write_file(cfg.out_dir / "trajectory.csv", guard,
             [&](std::ostream& o) { pscd::write_trajectory_csv(o, report); });
  write_file(cfg.out_dir / "summary.csv", guard,
             [&](std::ostream& o) { pscd::write_summary_csv(o, report); });
  if (args.trace) {
    const fs::path path = *args.trace;
    guard.track(path);
    pscd::save_trace(pscd::run_replication(ex, 0, true), path);
  }
  guard.commit();

  std::cout << ex.name << ": K=" << ex.streams << " reps=" << ex.replications
            << " rule=" << pscd::rule_name(ex.rule) << " risk=" << ex.pair.risk.name()
            << " utility=" << ex.pair.utility.name() << " alpha=" << ex.pair.alpha << '\n';
  std::cout << "AFDR  " << report.afdr.mean << " (" << report.afdr.se << ")\n"
            << "TADD  " << report.tadd.mean << " (" << report.tadd.se << ")\n"
            << "TARL  " << report.tarl.mean << " (" << report.tarl.se << ")\n"
            << "GFWER " << report.gfwer.mean << " (" << report.gfwer.se << ")\n"
            << "risk bound exceeded in " << report.risk_violations << " of " << report.steps
            << " steps\n"
            << "wrote " << (cfg.out_dir / "trajectory.csv").string() << ", "
            << (cfg.out_dir / "summary.csv").string() << '\n';
  return 0;
}

int oracle_check(const std::string& suite, std::uint64_t seed,
                 const std::optional<std::string>& config) {
  pscd::CheckReport report;
  if (config) {
    if (suite != "counterexample") {
      throw pscd::InvalidArgument("--config is only used by the counterexample suite");
    }
    report = pscd::check_counterexample(pscd::mdp_instance(pscd::load_config(*config).experiment));
  } else {
    report = pscd::run_check_suite(suite, seed);
  }
  report.print(std::cout);
  return report.ok() ? 0 : 1;
}

int schedule(const std::string& path) {
  pscd::write_schedule(std::cout, pscd::load_trace(path));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compound-risk-controlled parallel sequential change detection"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* cmd_sim = app.add_subcommand("simulate", "Run Monte Carlo replications of a config");
  cmd_sim->add_option("--config", sim.config, "Config file (JSON)")->required();
  cmd_sim->add_option("--reps", sim.reps, "Number of replications");
  cmd_sim->add_option("--seed", sim.seed, "Master seed");
  cmd_sim->add_option("--out", sim.out, "Output directory");
  cmd_sim->add_option("--rule", sim.rule, "Selection rule")
      ->check(CLI::IsMember({"general", "simplified"}));
  cmd_sim->add_option("--k", sim.k, "Number of streams");
  cmd_sim->add_option("--trace", sim.trace, "Also write replication 0 as a JSON trace");

  std::string suite;
  std::uint64_t check_seed = 20240601;
  std::optional<std::string> check_config;
  auto* cmd_check = app.add_subcommand("oracle-check", "Cross-check fast paths against oracles");
  cmd_check->add_option("suite", suite, "posterior, selection, glfwer, mdp, counterexample, all")
      ->required()
      ->check(CLI::IsMember({"posterior", "selection", "glfwer", "mdp", "counterexample", "all"}));
  cmd_check->add_option("--seed", check_seed, "Seed for randomized suites");
  cmd_check->add_option("--config", check_config,
                        "Decision-problem config for the counterexample suite");

  std::string trace_path;
  auto* cmd_sched = app.add_subcommand("schedule", "Print the detection schedule of a trace");
  cmd_sched->add_option("trace", trace_path, "Trace file (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_sim->parsed()) return simulate(sim);
    if (cmd_check->parsed()) return oracle_check(suite, check_seed, check_config);
    if (cmd_sched->parsed()) return schedule(trace_path);
  } catch (const std::exception& e) {
    std::cerr << "pscd: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
