#include "pbit/annealer.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "pbit/errors.hpp"

namespace pbit {

void AnnealSchedule::validate() const {
  if (!(V_start > 0.0) || !(V_start <= V_end))
    throw ValidationError("schedule: need 0 < V_start <= V_end");
  if (V_end > kMaxReadVoltageV + 1e-12)
    throw ValidationError("schedule: V_end exceeds the read-voltage budget");
  if (!(V_ref > 0.0)) throw ValidationError("schedule: V_ref must be > 0");
  if (updates_per_step < 1) throw ValidationError("schedule: updates_per_step must be >= 1");
  if (total_updates < updates_per_step)
    throw ValidationError("schedule: total_updates must be >= updates_per_step");
}

int AnnealSchedule::num_steps() const {
  return (total_updates + updates_per_step - 1) / updates_per_step;
}

double AnnealSchedule::v_read_at(int update_index) const {
  const int steps = num_steps();
  const int k = update_index / updates_per_step;
  if (steps <= 1) return V_start;
  return V_start + (V_end - V_start) * static_cast<double>(k) / (steps - 1);
}

double effective_beta(double v_read, double v_ref) {
  if (v_ref <= 0.0) throw ValidationError("effective_beta: V_ref must be > 0");
  return v_read / v_ref;
}

GibbsMachine::GibbsMachine(IsingModel model, CrossbarLowering lowering, CrossbarArray array,
                           std::vector<SmtjDevice> devices, MachineConfig config)
    : model_(std::move(model)),
      lowering_(std::move(lowering)),
      array_(std::move(array)),
      devices_(std::move(devices)),
      config_(config) {
  if (devices_.empty()) throw ValidationError("machine: need at least one SMTJ device");
  for (const auto& d : devices_) d.validate();
  const int n = model_.size();
  const int cols = n + (lowering_.bias_column ? 1 : 0);
  if (array_.rows() != n || array_.cols() != cols)
    throw ValidationError("machine: crossbar geometry does not match the lowering");
  if (array_.column_polarity() != lowering_.column_polarity)
    array_.set_column_polarity(lowering_.column_polarity);
  if (config_.pulse_width_s <= 0.0) throw ValidationError("machine: pulse width must be > 0");
  if (config_.snapshot_stride < 1) throw ValidationError("machine: snapshot stride must be >= 1");
}

GibbsMachine GibbsMachine::with_exact_array(IsingModel model, const CrossbarLowering& lowering,
                                            SmtjDevice device, MachineConfig config) {
  const int rows = static_cast<int>(lowering.conductance_targets_uS.size());
  const int cols = rows ? static_cast<int>(lowering.conductance_targets_uS.front().size()) : 0;
  CrossbarArray array(rows, cols, /*hardware_faithful=*/false);
  array.set_targets(lowering.conductance_targets_uS);
  array.adopt_targets_as_programmed();
  array.set_column_polarity(lowering.column_polarity);
  return GibbsMachine(std::move(model), lowering, std::move(array), {device}, config);
}

const SmtjDevice& GibbsMachine::device_for_row(int row) const {
  if (config_.assignment == SmtjAssignment::PerRow)
    return devices_[static_cast<std::size_t>(row) % devices_.size()];
  return devices_.front();
}

double GibbsMachine::hardware_beta(double v_read) const {
  const SmtjDevice& d = devices_.front();
  return d.K * d.r_alpha() * lowering_.G_scale_uS * 1e-6 * v_read;
}

bool GibbsMachine::sample_site(double i_mac_uA, const SmtjDevice& device, Rng& rng,
                               bool* clamped) const {
  if (config_.mode == MachineMode::HardwareFaithful) {
    const VmtjResult vr = mac_to_vmtj(i_mac_uA, device);
    if (clamped) *clamped = vr.clamped;
    return smtj_sample(device, vr.v_mtj, config_.pulse_width_s, rng);
  }
  // software sigmoid on the same MAC result; no junction, so no clamp
  const double p = logistic(device.K * device.r_alpha() * i_mac_uA * 1e-6);
  return uniform01(rng) < p;
}

GibbsMachine::StepResult GibbsMachine::gibbs_step(SpinState& state, int site, double v_read,
                                                  Rng& rng) const {
  if (site < 0 || site >= model_.size())
    throw ValidationError("gibbs_step: site index out of range");
  if (state.domain != model_.domain() || state.size() != model_.size())
    throw ValidationError("gibbs_step: state does not match the model");
  if (v_read < 0.0 || v_read > kMaxReadVoltageV)
    throw ValidationError("gibbs_step: V_read outside the read budget");

  const auto drives = spin_drive_voltages(state, array_.column_polarity(), v_read);
  double i_mac = mac_current_row(array_, drives, site);
  if (config_.mac_noise_sigma_uA > 0.0)
    i_mac += gaussian(rng, 0.0, config_.mac_noise_sigma_uA);

  StepResult result;
  const bool high = sample_site(i_mac, device_for_row(site), rng, &result.clamped);
  const int new_value = high ? spin_high(state.domain) : spin_low(state.domain);
  result.changed = new_value != state.values[site];
  state.values[site] = new_value;
  return result;
}

int GibbsMachine::chromatic_sweep(SpinState& state,
                                  const std::vector<std::vector<int>>& classes, double v_read,
                                  Rng& rng) const {
  validate_color_classes(model_, classes);
  int clamps = 0;
  for (const auto& klass : classes) {
    const auto drives = spin_drive_voltages(state, array_.column_polarity(), v_read);
    const std::uint64_t nonce = rng();
    std::vector<std::pair<int, int>> pending;
    pending.reserve(klass.size());
    for (int site : klass) {
      Rng sub = make_rng(derive_seed(nonce, static_cast<std::uint64_t>(site)));
      double i_mac = mac_current_row(array_, drives, site);
      if (config_.mac_noise_sigma_uA > 0.0)
        i_mac += gaussian(sub, 0.0, config_.mac_noise_sigma_uA);
      bool clamped = false;
      const bool high = sample_site(i_mac, device_for_row(site), sub, &clamped);
      clamps += clamped;
      pending.emplace_back(site, high ? spin_high(state.domain) : spin_low(state.domain));
    }
    for (const auto& [site, value] : pending) state.values[site] = value;
  }
  return clamps;
}

RunTrace GibbsMachine::run_annealing(const AnnealSchedule& schedule, std::uint64_t seed,
                                     const SpinState* init,
                                     const std::vector<std::vector<int>>* classes) const {
  schedule.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const int n = model_.size();

  Rng rng = make_rng(seed);
  SpinState state = init ? *init : random_state(n, model_.domain(), rng);
  if (init && (init->domain != model_.domain() || init->size() != n))
    throw ValidationError("run_annealing: initial state does not match the model");

  std::vector<std::vector<int>> chromatic_classes;
  if (config_.order == UpdateOrder::Chromatic) {
    chromatic_classes = classes ? *classes : conflict_coloring(model_);
    validate_color_classes(model_, chromatic_classes);
  }

  RunTrace trace;
  trace.seed = seed;
  trace.updates.reserve(schedule.total_updates);
  double e = energy(model_, state);

  auto record = [&](int t, double v, int site) {
    trace.updates.push_back({t, v, site, e});
    if ((t + 1) % config_.snapshot_stride == 0) trace.snapshots.emplace_back(t, state);
  };
  auto apply_update = [&](int t, double v, int site, Rng& source) {
    const int old_value = state.values[site];
    const double f = local_field(model_, state, site);
    const StepResult r = gibbs_step(state, site, v, source);
    e += (old_value - state.values[site]) * f;
    trace.clamp_events += r.clamped;
    record(t, v, site);
  };

  if (config_.order == UpdateOrder::Sequential) {
    for (int t = 0; t < schedule.total_updates; ++t)
      apply_update(t, schedule.v_read_at(t), t % n, rng);
  } else {
    int t = 0;
    while (t < schedule.total_updates) {
      const double v = schedule.v_read_at(t);  // schedule sampled at sweep start
      for (const auto& klass : chromatic_classes) {
        const auto drives = spin_drive_voltages(state, array_.column_polarity(), v);
        const std::uint64_t nonce = rng();
        std::vector<std::pair<int, int>> pending;
        for (int site : klass) {
          Rng sub = make_rng(derive_seed(nonce, static_cast<std::uint64_t>(site)));
          double i_mac = mac_current_row(array_, drives, site);
          if (config_.mac_noise_sigma_uA > 0.0)
            i_mac += gaussian(sub, 0.0, config_.mac_noise_sigma_uA);
          bool clamped = false;
          const bool high = sample_site(i_mac, device_for_row(site), sub, &clamped);
          trace.clamp_events += clamped;
          pending.emplace_back(site,
                               high ? spin_high(state.domain) : spin_low(state.domain));
        }
        // intra-class pairs are uncoupled, so per-site local fields are
        // unchanged by the other pending flips and the energy ledger is exact
        for (const auto& [site, value] : pending) {
          if (t >= schedule.total_updates) break;
          const int old_value = state.values[site];
          const double f = local_field(model_, state, site);
          state.values[site] = value;
          e += (old_value - value) * f;
          record(t, v, site);
          ++t;
        }
        if (t >= schedule.total_updates) break;
      }
    }
  }

  trace.final_state = state;
  trace.final_energy = e;
  trace.duration_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return trace;
}

}  // namespace pbit
