#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pbit/annealer.hpp"
#include "pbit/device.hpp"

namespace pbit {

using Json = nlohmann::ordered_json;

enum class ProblemKind { MaxCut, Coloring };

std::string to_string(ProblemKind kind);

/// Resolved experiment description. Parsed from a strict JSON file: unknown
/// keys anywhere are hard errors, defaults depend on the problem kind, and
/// the canonical echo (to_json) reparses to an identical config.
struct ExperimentConfig {
  ProblemKind problem = ProblemKind::MaxCut;
  std::filesystem::path graph_path;  // resolved against the config's directory
  int colors = 3;                    // coloring only
  double A = 1.0;
  double G_scale_uS = 33.0;
  std::vector<double> levels_uS;
  QuantizeMode quantize = QuantizeMode::Exact;

  struct Schedule {
    double v_start_mV = 35.0;
    double v_end_mV = 250.0;
    double v_ref_mV = 250.0;
    int updates_per_step = 50;
    int total_updates = 7200;
  } schedule;

  struct Machine {
    MachineMode mode = MachineMode::HardwareFaithful;
    UpdateOrder order = UpdateOrder::Sequential;
    SmtjAssignment assignment = SmtjAssignment::PerTrial;
    double pulse_width_us = 50.0;
    int snapshot_stride = 50;
  } machine;

  struct Device {
    double K_per_V = 58.9;
    double V_half_mV = 575.0;
    double R_P_ohm = 6600.0;
    double R_AP_ohm = 13200.0;
    double R_plus_ohm = 1000.0;
    double V_compliance_mV = 1200.0;
    double rate_scale_per_s = 1.0e7;
  } device;

  struct Spread {
    double K_rel_sigma = 0.0;
    double V_half_sigma_mV = 0.0;
    double rate_scale_rel_sigma = 0.0;
  };
  std::optional<Spread> device_spread;

  struct Programming {
    double tolerance_uS = 3.0;
    int max_pulses = 50;
    double noise_sigma_uS = 1.0;
    double max_step_uS = 10.0;
    bool settle_check = true;
  } programming;

  double mac_noise_sigma_uA = 0.0;
  int trials = 10;
  std::uint64_t seed = 1;

  struct Drift {
    double elapsed_hours = 720.0;
    double sigma_per_decade_uS = 0.8;
    double bound_uS = 15.0;
  };
  std::optional<Drift> drift;

  Json sweep;  // dotted-key -> value list, used by the sweep command only

  void validate() const;
  Json to_json() const;

  SmtjDevice nominal_device() const;
  ProgramVerifyConfig programming_config() const;
  AnnealSchedule anneal_schedule() const;
  MachineConfig machine_config() const;
  DriftModel drift_model() const;
};

ExperimentConfig parse_experiment_config(const Json& j, const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace pbit
