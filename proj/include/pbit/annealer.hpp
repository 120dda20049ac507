#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pbit/device.hpp"
#include "pbit/ising.hpp"
#include "pbit/mapping.hpp"

namespace pbit {

/// Read-voltage ramp implementing the pseudo-temperature trajectory: beta is
/// proportional to V_read, stepped every updates_per_step spin updates from
/// V_start to V_end.
struct AnnealSchedule {
  double V_start = 0.035;  // V
  double V_end = 0.25;     // V
  double V_ref = 0.25;     // V, beta = V_read / V_ref
  int updates_per_step = 50;
  int total_updates = 7200;

  void validate() const;
  int num_steps() const;
  double v_read_at(int update_index) const;
};

/// beta = V_read / V_ref.
double effective_beta(double v_read, double v_ref);

enum class MachineMode { HardwareFaithful, IdealSigmoid };
enum class UpdateOrder { Sequential, Chromatic };
enum class SmtjAssignment { Fixed, PerTrial, PerRow };

struct MachineConfig {
  MachineMode mode = MachineMode::HardwareFaithful;
  UpdateOrder order = UpdateOrder::Sequential;
  SmtjAssignment assignment = SmtjAssignment::PerTrial;
  double pulse_width_s = 50e-6;
  double mac_noise_sigma_uA = 0.0;
  int snapshot_stride = 50;
};

struct TraceRecord {
  int iteration = 0;
  double v_read = 0.0;
  int site = 0;
  double energy = 0.0;

  bool operator==(const TraceRecord&) const = default;
};

struct RunTrace {
  std::vector<TraceRecord> updates;
  std::vector<std::pair<int, SpinState>> snapshots;  // (iteration, state after it)
  SpinState final_state;
  double final_energy = 0.0;
  std::uint64_t seed = 0;
  int clamp_events = 0;
  double duration_s = 0.0;  // wall clock; kept out of all file outputs
};

/// Gibbs sampler running through the device chain: spin drive voltages ->
/// crossbar MAC row current -> V_mtj conversion -> SMTJ sample. IdealSigmoid
/// mode keeps the crossbar MAC but replaces the junction with the exact
/// sigmoid of the converted voltage (no telegraph dynamics, no compliance
/// clamp), which matches the hardware chain in distribution whenever the
/// pulse width saturates the device.
class GibbsMachine {
 public:
  GibbsMachine(IsingModel model, CrossbarLowering lowering, CrossbarArray array,
               std::vector<SmtjDevice> devices, MachineConfig config);

  /// Machine over a perfectly programmed array holding the exact lowering
  /// targets (no quantization or programming noise).
  static GibbsMachine with_exact_array(IsingModel model, const CrossbarLowering& lowering,
                                       SmtjDevice device, MachineConfig config);

  const IsingModel& model() const { return model_; }
  const CrossbarLowering& lowering() const { return lowering_; }
  const CrossbarArray& array() const { return array_; }
  CrossbarArray& array() { return array_; }
  const MachineConfig& config() const { return config_; }
  const SmtjDevice& device_for_row(int row) const;

  /// Effective sigmoid slope of the composed chain at a given read voltage:
  /// K * R_alpha * G_scale * V_read, in units of 1 / (dimensionless field).
  double hardware_beta(double v_read) const;

  struct StepResult {
    bool changed = false;
    bool clamped = false;
  };

  /// One single-site Gibbs update through the device chain.
  StepResult gibbs_step(SpinState& state, int site, double v_read, Rng& rng) const;

  /// One full sweep of simultaneous class-wise updates: every class member
  /// samples from fields of the pre-class state via its own deterministically
  /// derived substream, so execution order cannot change the result. Returns
  /// the number of compliance clamps.
  int chromatic_sweep(SpinState& state, const std::vector<std::vector<int>>& classes,
                      double v_read, Rng& rng) const;

  /// Full annealing run: total_updates single-site updates in round-robin
  /// order (or class sweeps), V_read ramped by the schedule. Bit-reproducible
  /// for a fixed (seed, config, instance).
  RunTrace run_annealing(const AnnealSchedule& schedule, std::uint64_t seed,
                         const SpinState* init = nullptr,
                         const std::vector<std::vector<int>>* classes = nullptr) const;

 private:
  bool sample_site(double i_mac_uA, const SmtjDevice& device, Rng& rng, bool* clamped) const;

  IsingModel model_;
  CrossbarLowering lowering_;
  CrossbarArray array_;
  std::vector<SmtjDevice> devices_;
  MachineConfig config_;
};

}  // namespace pbit
