#include "pbit/device.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pbit/errors.hpp"

namespace pbit {

CrossbarArray::CrossbarArray(int rows, int cols, bool hardware_faithful)
    : rows_(rows), cols_(cols), hardware_faithful_(hardware_faithful) {
  if (rows_ < 1 || cols_ < 1) throw ValidationError("crossbar: geometry must be positive");
  if (hardware_faithful_ && (rows_ > kMaxRows || cols_ > kMaxCols))
    throw ValidationError("crossbar: " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                          " exceeds the physical " + std::to_string(kMaxRows) + "x" +
                          std::to_string(kMaxCols) + " array");
  cells_.resize(static_cast<std::size_t>(rows_) * cols_);
  column_polarity_.assign(cols_, 1);
}

MemristorCell& CrossbarArray::cell(int row, int col) {
  if (row < 0 || row >= rows_ || col < 0 || col >= cols_)
    throw ValidationError("crossbar: cell index out of range");
  return cells_[static_cast<std::size_t>(row) * cols_ + col];
}

const MemristorCell& CrossbarArray::cell(int row, int col) const {
  return const_cast<CrossbarArray*>(this)->cell(row, col);
}

void CrossbarArray::set_column_polarity(std::vector<int> polarity) {
  if (static_cast<int>(polarity.size()) != cols_)
    throw ValidationError("crossbar: polarity vector length must equal the column count");
  for (int p : polarity)
    if (p != 1 && p != -1) throw ValidationError("crossbar: polarity entries must be +-1");
  column_polarity_ = std::move(polarity);
}

void CrossbarArray::set_targets(const std::vector<std::vector<double>>& targets_uS) {
  if (static_cast<int>(targets_uS.size()) != rows_)
    throw ValidationError("crossbar: target matrix row count mismatch");
  for (int r = 0; r < rows_; ++r) {
    if (static_cast<int>(targets_uS[r].size()) != cols_)
      throw ValidationError("crossbar: target matrix column count mismatch");
    for (int c = 0; c < cols_; ++c) {
      if (targets_uS[r][c] < 0.0)
        throw ValidationError("crossbar: negative conductance target at (" +
                              std::to_string(r) + "," + std::to_string(c) + ")");
      cell(r, c).target_uS = targets_uS[r][c];
    }
  }
}

void CrossbarArray::adopt_targets_as_programmed() {
  for (auto& c : cells_) {
    c.programmed_uS = c.target_uS;
    c.conductance_uS = c.target_uS;
    c.pulses = 0;
    c.failed = false;
  }
}

std::vector<std::vector<double>> CrossbarArray::conductance_map_uS() const {
  std::vector<std::vector<double>> map(rows_, std::vector<double>(cols_, 0.0));
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) map[r][c] = cell(r, c).conductance_uS;
  return map;
}

void SmtjDevice::validate() const {
  if (K <= 0.0) throw ValidationError("smtj: sigmoid slope K must be > 0");
  if (!(R_AP > R_P && R_P > 0.0))
    throw ValidationError("smtj: resistances must satisfy R_AP > R_P > 0");
  if (R_plus < 0.0) throw ValidationError("smtj: series resistor must be >= 0");
  if (V_compliance <= V_half)
    throw ValidationError("smtj: compliance voltage must exceed V_half");
  if (rate_scale <= 0.0) throw ValidationError("smtj: rate_scale must be > 0");
}

void ProgramVerifyConfig::validate() const {
  if (tolerance_uS <= 0.0) throw ValidationError("programming: tolerance must be > 0");
  if (max_pulses < 1) throw ValidationError("programming: max_pulses must be >= 1");
  if (per_pulse_noise_sigma_uS < 0.0 || max_step_uS <= 0.0)
    throw ValidationError("programming: bad pulse parameters");
}

namespace {

double formed_headroom_uS(Rng& rng) {
  return std::uniform_real_distribution<double>(15.0, 40.0)(rng);
}

}  // namespace

ProgrammingReport program_and_verify(CrossbarArray& array,
                                     const std::vector<std::vector<double>>& targets_uS,
                                     const ProgramVerifyConfig& config, Rng& rng) {
  config.validate();
  array.set_targets(targets_uS);
  ProgrammingReport report;

  for (int r = 0; r < array.rows(); ++r) {
    for (int c = 0; c < array.cols(); ++c) {
      MemristorCell& cell = array.cell(r, c);
      cell.pulses = 0;
      cell.failed = false;
      if (cell.target_uS == 0.0) {  // off cell: left unprogrammed
        cell.programmed_uS = 0.0;
        cell.conductance_uS = 0.0;
        continue;
      }
      const double target = cell.target_uS;
      double g = target + formed_headroom_uS(rng);
      bool done = false;
      while (cell.pulses < config.max_pulses) {
        const double observed =
            config.settle_check ? g : g + gaussian(rng, 0.0, config.per_pulse_noise_sigma_uS);
        if (std::abs(observed - target) <= config.tolerance_uS) {
          done = true;
          break;
        }
        ++cell.pulses;
        if (g < target - config.tolerance_uS) {
          // RESET overshot below the verify window; re-form and walk down again
          g = target + formed_headroom_uS(rng);
          continue;
        }
        const double step = std::min(g - target, config.max_step_uS);
        g = std::max(0.0, g - step + gaussian(rng, 0.0, config.per_pulse_noise_sigma_uS));
      }
      cell.programmed_uS = g;
      cell.conductance_uS = g;
      if (!done) {
        cell.failed = true;
        report.failed_cells.emplace_back(r, c);
      }
      report.total_pulses += cell.pulses;
    }
  }
  return report;
}

double mac_current_row(const CrossbarArray& array, std::span<const double> drive_V, int row) {
  if (static_cast<int>(drive_V.size()) != array.cols())
    throw ValidationError("mac_current: drive vector length must equal the column count");
  if (row < 0 || row >= array.rows()) throw ValidationError("mac_current: row out of range");
  double i_uA = 0.0;
  for (int c = 0; c < array.cols(); ++c)
    i_uA += array.cell(row, c).conductance_uS * drive_V[c];
  return i_uA;
}

std::vector<double> mac_current(const CrossbarArray& array, std::span<const double> drive_V,
                                double noise_sigma_uA, Rng* rng) {
  for (double v : drive_V)
    if (std::abs(v) > kMaxReadVoltageV + 1e-12)
      throw ValidationError("mac_current: drive voltage exceeds the read-voltage bound");
  if (noise_sigma_uA > 0.0 && rng == nullptr)
    throw ValidationError("mac_current: noise requested without a random source");
  std::vector<double> currents(array.rows());
  for (int r = 0; r < array.rows(); ++r) {
    currents[r] = mac_current_row(array, drive_V, r);
    if (noise_sigma_uA > 0.0) currents[r] += gaussian(*rng, 0.0, noise_sigma_uA);
  }
  return currents;
}

double default_mac_noise_sigma_uA(double v_read_V, double top_level_uS) {
  return 0.01 * v_read_V * top_level_uS;
}

std::vector<double> spin_drive_voltages(const SpinState& state,
                                        std::span<const int> column_polarity, double v_read) {
  if (v_read < 0.0) throw ValidationError("spin_drive_voltages: V_read must be >= 0");
  const int n = state.size();
  const int cols = static_cast<int>(column_polarity.size());
  if (cols < n || cols > n + 1)
    throw ValidationError("spin_drive_voltages: polarity length must be the spin count "
                          "plus an optional bias column");
  std::vector<double> drives(cols, 0.0);
  for (int j = 0; j < n; ++j) drives[j] = column_polarity[j] * state.values[j] * v_read;
  for (int j = n; j < cols; ++j) drives[j] = column_polarity[j] * v_read;
  return drives;
}

double smtj_probability(const SmtjDevice& device, double v_mtj) {
  device.validate();
  if (v_mtj > device.V_compliance + 1e-12)
    throw ValidationError("smtj: bias exceeds the compliance clamp; route the drive "
                          "through mac_to_vmtj");
  return logistic(device.K * (v_mtj - device.V_half));
}

VmtjResult mac_to_vmtj(double i_mac_uA, const SmtjDevice& device) {
  VmtjResult r;
  r.v_mtj = device.V_half + i_mac_uA * 1e-6 * device.r_alpha();
  if (r.v_mtj > device.V_compliance) {
    r.v_mtj = device.V_compliance;
    r.clamped = true;
  }
  return r;
}

double smtj_ap_probability(const SmtjDevice& device, double v_mtj, double pulse_width_s) {
  if (pulse_width_s <= 0.0) throw ValidationError("smtj: pulse width must be > 0");
  const double stationary = smtj_probability(device, v_mtj);
  const double x = device.K * (v_mtj - device.V_half);
  const double rate_sum = 2.0 * device.rate_scale * std::cosh(0.5 * x);
  return stationary * (1.0 - std::exp(-pulse_width_s * rate_sum));
}

bool smtj_sample(const SmtjDevice& device, double v_mtj, double pulse_width_s, Rng& rng) {
  const double p_ap = smtj_ap_probability(device, v_mtj, pulse_width_s);
  const bool ap = uniform01(rng) < p_ap;
  const double resistance = ap ? device.R_AP : device.R_P;
  return resistance > device.mean_resistance();
}

SigmoidFit fit_switching_curve(std::span<const std::pair<double, double>> voltage_freq) {
  // logit-linearized least squares: y = K v - K V_half
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& [v, p] : voltage_freq) {
    const double q = std::clamp(p, 1e-4, 1.0 - 1e-4);
    const double y = std::log(q / (1.0 - q));
    sx += v;
    sy += y;
    sxx += v * v;
    sxy += v * y;
    ++n;
  }
  if (n < 2) throw ValidationError("fit_switching_curve: need at least two points");
  const double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-30)
    throw ValidationError("fit_switching_curve: degenerate voltage grid");
  SigmoidFit fit;
  fit.K = (n * sxy - sx * sy) / det;
  const double intercept = (sy - fit.K * sx) / n;
  if (fit.K <= 0.0) throw ValidationError("fit_switching_curve: non-increasing curve");
  fit.V_half = -intercept / fit.K;
  return fit;
}

void apply_drift(CrossbarArray& array, double elapsed_hours, const DriftModel& model,
                 Rng& rng) {
  if (elapsed_hours < 0.0) throw ValidationError("apply_drift: elapsed time must be >= 0");
  if (model.bound_uS < 0.0) throw ValidationError("apply_drift: bound must be >= 0");
  const double decades = elapsed_hours > 1e-3 ? std::log10(elapsed_hours) + 3.0 : 0.0;
  const double sigma = model.sigma_per_decade_uS * decades;
  for (int r = 0; r < array.rows(); ++r) {
    for (int c = 0; c < array.cols(); ++c) {
      MemristorCell& cell = array.cell(r, c);
      if (cell.target_uS == 0.0) continue;  // off cells do not drift
      const double delta =
          std::clamp(gaussian(rng, 0.0, sigma), -model.bound_uS, model.bound_uS);
      cell.conductance_uS = std::max(0.0, cell.programmed_uS + delta);
    }
  }
}

}  // namespace pbit
