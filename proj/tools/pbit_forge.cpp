// pbit-forge: batch driver for the crossbar/SMTJ annealing simulator.
// Subcommands: map, run, oracle, sweep, drift-rerun.
// Exit codes: 0 success, 1 validation error, 2 capacity error,
//             3 campaign-level failure (no trial succeeded / infeasible).

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pbit/errors.hpp"
#include "pbit/harness.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> mode;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool wants_out) {
  cmd->add_option("--config", args.config_path, "experiment config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  if (wants_out) {
    const char* env = std::getenv("PBIT_FORGE_OUT");
    args.out_dir = env ? env : "out";
    cmd->add_option("--out", args.out_dir, "output directory");
  }
  cmd->add_option("--seed", args.seed, "override the config seed");
  cmd->add_option("--trials", args.trials, "override the trial count");
  cmd->add_option("--mode", args.mode, "override the machine mode (hw|ideal)")
      ->check(CLI::IsMember({"hw", "ideal"}));
}

pbit::ExperimentConfig load_with_overrides(const CommonArgs& args) {
  pbit::ExperimentConfig cfg = pbit::load_experiment_config(args.config_path);
  if (args.seed) cfg.seed = *args.seed;
  if (args.trials) cfg.trials = *args.trials;
  if (args.mode)
    cfg.machine.mode = *args.mode == "hw" ? pbit::MachineMode::HardwareFaithful
                                          : pbit::MachineMode::IdealSigmoid;
  cfg.validate();
  return cfg;
}

void print_trial(const pbit::TrialOutcome& t) {
  std::printf("  trial %2d: final energy %.6g -> %s", t.trial, t.final_energy,
              t.optimum ? "optimum" : "suboptimal");
  if (t.updates_to_optimum >= 0)
    std::printf(" (first reached at update %ld)", t.updates_to_optimum);
  if (t.clamp_events > 0) std::printf(", %d compliance clamps", t.clamp_events);
  std::printf("\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pbit-forge: memristor-crossbar / SMTJ annealing simulator"};
  app.require_subcommand(1);

  CommonArgs map_args, run_args, oracle_args, sweep_args, drift_args;
  CLI::App* cmd_map = app.add_subcommand("map", "lower an instance to conductance targets");
  add_common(cmd_map, map_args, true);
  CLI::App* cmd_run = app.add_subcommand("run", "run an annealing campaign");
  add_common(cmd_run, run_args, true);
  CLI::App* cmd_oracle = app.add_subcommand("oracle", "certify the instance optimum");
  add_common(cmd_oracle, oracle_args, false);
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "run the campaign over a parameter grid");
  add_common(cmd_sweep, sweep_args, true);
  CLI::App* cmd_drift =
      app.add_subcommand("drift-rerun", "compare fresh vs aged-array campaigns");
  add_common(cmd_drift, drift_args, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_map->parsed()) {
      const auto cfg = load_with_overrides(map_args);
      const std::filesystem::path out = map_args.out_dir;
      const auto report = pbit::cmd_map(cfg, &out);
      std::printf("instance: %d spins, %d nonzero couplings, %.1f%% zero pairs\n",
                  report.n_spins, report.nonzero_couplings,
                  100.0 * report.zero_coupling_fraction);
      std::printf("crossbar: %dx%d%s\n", report.rows, report.cols,
                  report.has_bias_column ? " (with bias column)" : "");
      std::printf("conductance map written to %s\n",
                  (out / "conductance_map.csv").string().c_str());
      return 0;
    }
    if (cmd_run->parsed()) {
      const auto cfg = load_with_overrides(run_args);
      const std::filesystem::path out = run_args.out_dir;
      const auto outcome = pbit::cmd_run(cfg, &out);
      for (const auto& t : outcome.trials) print_trial(t);
      std::printf("campaign: %d/%zu trials at the oracle optimum (%.6g)\n",
                  outcome.successes, outcome.trials.size(), outcome.oracle_min_energy);
      if (outcome.median_updates_to_optimum >= 0)
        std::printf("median updates to optimum: %ld\n", outcome.median_updates_to_optimum);
      std::printf("traces written to %s\n", out.string().c_str());
      return outcome.successes > 0 ? 0 : 3;
    }
    if (cmd_oracle->parsed()) {
      const auto cfg = load_with_overrides(oracle_args);
      const auto report = pbit::cmd_oracle(cfg);
      if (report.colorable.has_value() && !*report.colorable) {
        std::printf("oracle: no proper coloring with %d colors (UNSAT)\n", cfg.colors);
        return 3;
      }
      std::printf("oracle: min energy %.9g\n", report.min_energy);
      if (report.max_cut_weight)
        std::printf("oracle: max cut weight %.9g\n", *report.max_cut_weight);
      if (report.colorable) std::printf("oracle: proper coloring exists\n");
      if (report.states_scanned)
        std::printf("oracle: %llu states scanned, %llu ground states\n",
                    static_cast<unsigned long long>(report.states_scanned),
                    static_cast<unsigned long long>(report.ground_state_count));
      return 0;
    }
    if (cmd_sweep->parsed()) {
      const auto cfg = load_with_overrides(sweep_args);
      const std::filesystem::path out = sweep_args.out_dir;
      const auto outcome = pbit::cmd_sweep(cfg, &out);
      std::printf("%-48s %8s %10s %8s\n", "point", "trials", "successes", "rate");
      for (const auto& p : outcome.points)
        std::printf("%-48s %8d %10d %7.2f%%\n", p.label.c_str(), p.trials, p.successes,
                    100.0 * p.success_rate);
      std::printf("grid summary written to %s\n", out.string().c_str());
      return 0;
    }
    if (cmd_drift->parsed()) {
      const auto cfg = load_with_overrides(drift_args);
      const std::filesystem::path out = drift_args.out_dir;
      const auto outcome = pbit::cmd_drift_rerun(cfg, &out);
      std::printf("fresh: %d/%d at optimum; aged (+%.3g h drift, software sigmoid): %d/%d\n",
                  outcome.fresh_successes, cfg.trials,
                  cfg.drift ? cfg.drift->elapsed_hours : 0.0, outcome.aged_successes,
                  cfg.trials);
      std::printf("mean final-cost delta (aged - fresh): %.6g\n",
                  outcome.mean_final_cost_delta);
      return outcome.aged_successes > 0 ? 0 : 3;
    }
  } catch (const pbit::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const pbit::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
