#pragma once

#include <span>
#include <utility>
#include <vector>

#include "pbit/ising.hpp"
#include "pbit/rng.hpp"

namespace pbit {

/// Drive voltages are limited to this magnitude in every read mode.
inline constexpr double kMaxReadVoltageV = 0.5;

struct MemristorCell {
  double target_uS = 0.0;       // requested conductance, 0 = off cell
  double programmed_uS = 0.0;   // conductance right after program-and-verify
  double conductance_uS = 0.0;  // present conductance (drift applies here)
  double programmed_at_h = 0.0;
  int pulses = 0;
  bool failed = false;
};

/// Grid of programmable conductances. In hardware-faithful mode the geometry
/// is capped at the physical 32x64 array; ideal arrays are unconstrained.
class CrossbarArray {
 public:
  static constexpr int kMaxRows = 32;
  static constexpr int kMaxCols = 64;

  CrossbarArray(int rows, int cols, bool hardware_faithful = true);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool hardware_faithful() const { return hardware_faithful_; }

  MemristorCell& cell(int row, int col);
  const MemristorCell& cell(int row, int col) const;

  void set_column_polarity(std::vector<int> polarity);
  const std::vector<int>& column_polarity() const { return column_polarity_; }

  void set_targets(const std::vector<std::vector<double>>& targets_uS);
  /// Copies targets into programmed/present conductances: a perfectly
  /// programmed (ideal) array with zero pulses spent.
  void adopt_targets_as_programmed();

  std::vector<std::vector<double>> conductance_map_uS() const;

 private:
  int rows_;
  int cols_;
  bool hardware_faithful_;
  std::vector<MemristorCell> cells_;
  std::vector<int> column_polarity_;
};

struct SmtjDevice {
  double K = 58.9;             // sigmoid slope, 1/V
  double V_half = 0.575;       // midpoint bias, V
  double R_P = 6600.0;         // parallel-state resistance, ohm
  double R_AP = 13200.0;       // antiparallel-state resistance, ohm
  double R_plus = 1000.0;      // series resistor, ohm
  double V_compliance = 1.2;   // damage guard, V
  double rate_scale = 1.0e7;   // telegraph attempt rate, 1/s

  double mean_resistance() const { return 0.5 * (R_AP + R_P); }
  /// Current-to-voltage conversion constant 2 (mean resistance + R_plus).
  double r_alpha() const { return 2.0 * (mean_resistance() + R_plus); }
  /// Pulse width beyond which the telegraph occupancy is stationary for any
  /// bias (30 relaxation times at the slowest point, the midpoint).
  double saturation_pulse_width() const { return 30.0 / (2.0 * rate_scale); }

  void validate() const;
};

struct ProgramVerifyConfig {
  double tolerance_uS = 3.0;
  int max_pulses = 50;
  double per_pulse_noise_sigma_uS = 1.0;
  double max_step_uS = 10.0;  // largest conductance move of one RESET pulse
  bool settle_check = true;   // verify reads the settled conductance

  void validate() const;
};

struct DriftModel {
  double sigma_per_decade_uS = 0.8;  // spread growth per decade of hours
  double bound_uS = 15.0;            // hard clamp on total drift magnitude
};

struct ProgrammingReport {
  int total_pulses = 0;
  std::vector<std::pair<int, int>> failed_cells;

  bool ok() const { return failed_cells.empty(); }
};

/// Iterative RESET-pulse programming: each cell starts from a formed state
/// above target and steps down (with per-pulse noise) until the verify read
/// lands within tolerance. Cells that undershoot the window are re-formed and
/// retried; cells still outside the window after max_pulses are flagged.
/// Deterministic for a fixed rng seed.
ProgrammingReport program_and_verify(CrossbarArray& array,
                                     const std::vector<std::vector<double>>& targets_uS,
                                     const ProgramVerifyConfig& config, Rng& rng);

/// Kirchhoff summation: I_row = sum_col g[row][col] * V[col], in uA. Optional
/// per-read Gaussian current noise (one draw per row).
std::vector<double> mac_current(const CrossbarArray& array, std::span<const double> drive_V,
                                double noise_sigma_uA = 0.0, Rng* rng = nullptr);
double mac_current_row(const CrossbarArray& array, std::span<const double> drive_V, int row);

/// 1% of the full-scale single-cell current, the variability-mode default.
double default_mac_noise_sigma_uA(double v_read_V, double top_level_uS);

/// Encodes spins as column voltages: V_j = polarity_j * s_j * V_read, so a
/// negative-polarity column drives s = +1 (or 1) with -V_read. Columns beyond
/// the state length are bias columns driven at polarity * V_read.
std::vector<double> spin_drive_voltages(const SpinState& state,
                                        std::span<const int> column_polarity, double v_read);

/// Stationary antiparallel probability 1 / (1 + exp(-K (V - V_half))).
double smtj_probability(const SmtjDevice& device, double v_mtj);

struct VmtjResult {
  double v_mtj = 0.0;
  bool clamped = false;
};

/// V_mtj = V_half + I_MAC * R_alpha, clamped at the compliance voltage.
VmtjResult mac_to_vmtj(double i_mac_uA, const SmtjDevice& device);

/// Antiparallel occupancy after a pulse of the given width. The junction
/// starts parallel (its zero-bias rest state) and relaxes as a two-state
/// telegraph process with rates rate_scale * exp(+-x/2), x = K (V - V_half):
/// stationary occupancy logistic(x), relaxation time 1/(2 rate_scale cosh(x/2)).
double smtj_ap_probability(const SmtjDevice& device, double v_mtj, double pulse_width_s);

/// Single-point readout at pulse end: samples the telegraph end state and
/// classifies the resistance against the P/AP mean. True = antiparallel.
bool smtj_sample(const SmtjDevice& device, double v_mtj, double pulse_width_s, Rng& rng);

struct SigmoidFit {
  double K = 0.0;
  double V_half = 0.0;
};

/// Least-squares fit of logit(p) = K (V - V_half) to (voltage, frequency)
/// points, for recovering device parameters from measured switching curves.
SigmoidFit fit_switching_curve(std::span<const std::pair<double, double>> voltage_freq);

/// Retention drift: perturbs every programmed cell by a zero-mean Gaussian
/// whose sigma grows per decade of hours past 1e-3 h, hard-clamped to
/// +-bound around the programmed value and floored at zero conductance.
void apply_drift(CrossbarArray& array, double elapsed_hours, const DriftModel& model,
                 Rng& rng);

}  // namespace pbit
