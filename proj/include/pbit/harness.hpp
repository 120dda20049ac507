#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pbit/annealer.hpp"
#include "pbit/config.hpp"
#include "pbit/mapping.hpp"
#include "pbit/oracle.hpp"

namespace pbit {

/// Everything derived once per campaign: the instance, its lowering, and the
/// certified optimum (exhaustive search for MAX-CUT, colorability witness
/// plus the closed-form bound for coloring).
struct InstanceBundle {
  WeightedGraph graph;
  IsingModel model;
  CrossbarLowering lowering;
  double oracle_min_energy = 0.0;
  std::uint64_t ground_state_count = 0;  // 0 when certified without enumeration
};

InstanceBundle build_instance(const ExperimentConfig& cfg);

/// Success means the final trace energy matches the oracle optimum within
/// kGroundStateTolerance.
struct TrialOutcome {
  int trial = 0;
  std::uint64_t trial_seed = 0;
  double final_energy = 0.0;
  bool optimum = false;
  long updates_to_optimum = -1;  // first update index at the optimum, -1 if never
  int clamp_events = 0;
  int programming_pulses = 0;
  bool programming_ok = true;
  std::optional<double> cut_weight;
  std::optional<bool> coloring_valid;
};

struct CampaignOutcome {
  double oracle_min_energy = 0.0;
  std::uint64_t ground_state_count = 0;
  std::vector<TrialOutcome> trials;
  int successes = 0;
  long median_updates_to_optimum = -1;  // over successful trials
};

/// Full campaign: per trial program-and-verify, optional drift, annealing
/// run, decode, oracle check. Trials execute concurrently on independent RNG
/// substreams; with an output directory each trial writes its trace CSV and
/// JSON sidecar plus a campaign summary, all byte-deterministic for a fixed
/// (config, seed).
CampaignOutcome cmd_run(const ExperimentConfig& cfg,
                        const std::filesystem::path* out_dir = nullptr);

struct MapReport {
  int n_spins = 0;
  int rows = 0;
  int cols = 0;
  int nonzero_couplings = 0;
  double zero_coupling_fraction = 0.0;
  bool has_bias_column = false;
};

/// Emits model statistics and the conductance target map CSV.
MapReport cmd_map(const ExperimentConfig& cfg,
                  const std::filesystem::path* out_dir = nullptr);

struct OracleReport {
  double min_energy = 0.0;
  std::uint64_t ground_state_count = 0;
  std::uint64_t states_scanned = 0;
  std::optional<double> max_cut_weight;
  std::optional<bool> colorable;
};

OracleReport cmd_oracle(const ExperimentConfig& cfg);

struct SweepPoint {
  std::string label;  // "key=value;key=value"
  Json overrides;
  int trials = 0;
  int successes = 0;
  double success_rate = 0.0;
  long median_updates_to_optimum = -1;
};

struct SweepOutcome {
  std::vector<SweepPoint> points;
};

/// Runs the campaign at every point of the cartesian grid in cfg.sweep and
/// emits success-rate / updates-to-optimum tables.
SweepOutcome cmd_sweep(const ExperimentConfig& cfg,
                       const std::filesystem::path* out_dir = nullptr);

struct DriftRerunOutcome {
  std::vector<TrialOutcome> fresh;
  std::vector<TrialOutcome> aged;
  int fresh_successes = 0;
  int aged_successes = 0;
  double mean_final_cost_delta = 0.0;
};

/// Per trial: program one array, run it fresh in the configured mode, then
/// rerun the identical anneal seed on a drifted copy with the spin-update
/// sigmoid computed in software (IdealSigmoid) while the crossbar keeps its
/// drifted conductances.
DriftRerunOutcome cmd_drift_rerun(const ExperimentConfig& cfg,
                                  const std::filesystem::path* out_dir = nullptr);

/// Re-executes the trial described by a trace sidecar (config echo + seeds)
/// and returns the reproduced final state.
SpinState replay_trial(const Json& sidecar);

void write_trace_csv(const RunTrace& trace, const std::filesystem::path& path);
void write_text_atomic(const std::string& content, const std::filesystem::path& path);

}  // namespace pbit
