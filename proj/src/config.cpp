#include "pbit/config.hpp"

#include <fstream>
#include <set>

#include "pbit/errors.hpp"

namespace pbit {

std::string to_string(ProblemKind kind) {
  return kind == ProblemKind::MaxCut ? "maxcut" : "coloring";
}

namespace {

void check_keys(const Json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ValidationError("config: " + where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key))
      throw ValidationError("config: unknown key \"" + key + "\" in " + where);
  }
}

template <typename T>
T get_or(const Json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("config: bad value type for \"") + key + "\"");
  }
}

MachineMode parse_mode(const std::string& s) {
  if (s == "hw") return MachineMode::HardwareFaithful;
  if (s == "ideal") return MachineMode::IdealSigmoid;
  throw ValidationError("config: machine.mode must be \"hw\" or \"ideal\"");
}

UpdateOrder parse_order(const std::string& s) {
  if (s == "sequential") return UpdateOrder::Sequential;
  if (s == "chromatic") return UpdateOrder::Chromatic;
  throw ValidationError("config: machine.update_order must be \"sequential\" or \"chromatic\"");
}

SmtjAssignment parse_assignment(const std::string& s) {
  if (s == "fixed") return SmtjAssignment::Fixed;
  if (s == "per_trial") return SmtjAssignment::PerTrial;
  if (s == "per_row") return SmtjAssignment::PerRow;
  throw ValidationError(
      "config: machine.smtj_assignment must be \"fixed\", \"per_trial\" or \"per_row\"");
}

}  // namespace

ExperimentConfig parse_experiment_config(const Json& j, const std::filesystem::path& base_dir) {
  check_keys(j, {"problem", "graph", "colors", "A", "G_scale_uS", "levels_uS", "quantize",
                 "schedule", "machine", "device", "device_spread", "programming",
                 "mac_noise_sigma_uA", "trials", "seed", "drift", "sweep"},
             "config");

  ExperimentConfig cfg;
  if (!j.contains("problem"))
    throw ValidationError("config: missing required key \"problem\"");
  const std::string problem = j.at("problem").get<std::string>();
  if (problem == "maxcut")
    cfg.problem = ProblemKind::MaxCut;
  else if (problem == "coloring")
    cfg.problem = ProblemKind::Coloring;
  else
    throw ValidationError("config: problem must be \"maxcut\" or \"coloring\"");

  if (!j.contains("graph")) throw ValidationError("config: missing required key \"graph\"");
  std::filesystem::path graph = j.at("graph").get<std::string>();
  cfg.graph_path = graph.is_absolute() ? graph : base_dir / graph;

  const bool coloring = cfg.problem == ProblemKind::Coloring;
  cfg.colors = get_or(j, "colors", 3);
  cfg.A = get_or(j, "A", 1.0);
  cfg.G_scale_uS = get_or(j, "G_scale_uS", coloring ? 70.0 : 33.0);
  cfg.levels_uS = get_or(j, "levels_uS",
                         coloring ? std::vector<double>{70.0, 140.0}
                                  : std::vector<double>{33.0, 66.0, 99.0});
  const std::string quantize = get_or<std::string>(j, "quantize", "exact");
  if (quantize == "exact")
    cfg.quantize = QuantizeMode::Exact;
  else if (quantize == "nearest")
    cfg.quantize = QuantizeMode::SnapToNearest;
  else
    throw ValidationError("config: quantize must be \"exact\" or \"nearest\"");

  const Json schedule = j.value("schedule", Json::object());
  check_keys(schedule, {"V_start_mV", "V_end_mV", "V_ref_mV", "updates_per_step",
                        "total_updates"},
             "schedule");
  cfg.schedule.v_start_mV = get_or(schedule, "V_start_mV", 35.0);
  cfg.schedule.v_end_mV = get_or(schedule, "V_end_mV", 250.0);
  cfg.schedule.v_ref_mV = get_or(schedule, "V_ref_mV", 250.0);
  cfg.schedule.updates_per_step = get_or(schedule, "updates_per_step", 50);
  cfg.schedule.total_updates = get_or(schedule, "total_updates", coloring ? 1500 : 7200);

  const Json machine = j.value("machine", Json::object());
  check_keys(machine, {"mode", "update_order", "smtj_assignment", "pulse_width_us",
                       "snapshot_stride"},
             "machine");
  cfg.machine.mode = parse_mode(get_or<std::string>(machine, "mode", "hw"));
  cfg.machine.order = parse_order(get_or<std::string>(machine, "update_order", "sequential"));
  cfg.machine.assignment =
      parse_assignment(get_or<std::string>(machine, "smtj_assignment", "per_trial"));
  cfg.machine.pulse_width_us = get_or(machine, "pulse_width_us", 50.0);
  cfg.machine.snapshot_stride = get_or(machine, "snapshot_stride", 50);

  const Json device = j.value("device", Json::object());
  check_keys(device, {"K_per_V", "V_half_mV", "R_P_ohm", "R_AP_ohm", "R_plus_ohm",
                      "V_compliance_mV", "rate_scale_per_s"},
             "device");
  cfg.device.K_per_V = get_or(device, "K_per_V", 58.9);
  cfg.device.V_half_mV = get_or(device, "V_half_mV", 575.0);
  cfg.device.R_P_ohm = get_or(device, "R_P_ohm", 6600.0);
  cfg.device.R_AP_ohm = get_or(device, "R_AP_ohm", 13200.0);
  cfg.device.R_plus_ohm = get_or(device, "R_plus_ohm", 1000.0);
  cfg.device.V_compliance_mV = get_or(device, "V_compliance_mV", 1200.0);
  cfg.device.rate_scale_per_s = get_or(device, "rate_scale_per_s", 1.0e7);

  if (j.contains("device_spread")) {
    const Json& spread = j.at("device_spread");
    check_keys(spread, {"K_rel_sigma", "V_half_sigma_mV", "rate_scale_rel_sigma"},
               "device_spread");
    ExperimentConfig::Spread s;
    s.K_rel_sigma = get_or(spread, "K_rel_sigma", 0.0);
    s.V_half_sigma_mV = get_or(spread, "V_half_sigma_mV", 0.0);
    s.rate_scale_rel_sigma = get_or(spread, "rate_scale_rel_sigma", 0.0);
    cfg.device_spread = s;
  }

  const Json programming = j.value("programming", Json::object());
  check_keys(programming, {"tolerance_uS", "max_pulses", "noise_sigma_uS", "max_step_uS",
                           "settle_check"},
             "programming");
  cfg.programming.tolerance_uS = get_or(programming, "tolerance_uS", 3.0);
  cfg.programming.max_pulses = get_or(programming, "max_pulses", 50);
  cfg.programming.noise_sigma_uS = get_or(programming, "noise_sigma_uS", 1.0);
  cfg.programming.max_step_uS = get_or(programming, "max_step_uS", 10.0);
  cfg.programming.settle_check = get_or(programming, "settle_check", true);

  cfg.mac_noise_sigma_uA = get_or(j, "mac_noise_sigma_uA", 0.0);
  cfg.trials = get_or(j, "trials", 10);
  cfg.seed = get_or<std::uint64_t>(j, "seed", 1);

  if (j.contains("drift")) {
    const Json& drift = j.at("drift");
    check_keys(drift, {"elapsed_hours", "sigma_per_decade_uS", "bound_uS"}, "drift");
    ExperimentConfig::Drift d;
    d.elapsed_hours = get_or(drift, "elapsed_hours", 720.0);
    d.sigma_per_decade_uS = get_or(drift, "sigma_per_decade_uS", 0.8);
    d.bound_uS = get_or(drift, "bound_uS", 15.0);
    cfg.drift = d;
  }

  if (j.contains("sweep")) {
    if (!j.at("sweep").is_object())
      throw ValidationError("config: sweep must be an object of parameter -> value list");
    cfg.sweep = j.at("sweep");
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config file " + path.string() + ": " + e.what());
  }
  return parse_experiment_config(j, path.parent_path());
}

void ExperimentConfig::validate() const {
  if (!std::filesystem::exists(graph_path))
    throw ValidationError("config: graph file does not exist: " + graph_path.string());
  if (problem == ProblemKind::Coloring && colors < 2)
    throw ValidationError("config: coloring needs at least 2 colors");
  if (A <= 0.0) throw ValidationError("config: A must be > 0");
  if (G_scale_uS <= 0.0) throw ValidationError("config: G_scale_uS must be > 0");
  if (trials < 1) throw ValidationError("config: trials must be >= 1");
  if (mac_noise_sigma_uA < 0.0)
    throw ValidationError("config: mac_noise_sigma_uA must be >= 0");
  anneal_schedule().validate();
  nominal_device().validate();
  programming_config().validate();
  if (machine.pulse_width_us <= 0.0)
    throw ValidationError("config: pulse_width_us must be > 0");
  if (machine.snapshot_stride < 1)
    throw ValidationError("config: snapshot_stride must be >= 1");
  if (drift && (drift->elapsed_hours < 0.0 || drift->bound_uS < 0.0 ||
                drift->sigma_per_decade_uS < 0.0))
    throw ValidationError("config: bad drift block");
}

Json ExperimentConfig::to_json() const {
  Json j;
  j["problem"] = to_string(problem);
  j["graph"] = std::filesystem::absolute(graph_path).lexically_normal().string();
  if (problem == ProblemKind::Coloring) j["colors"] = colors;
  j["A"] = A;
  j["G_scale_uS"] = G_scale_uS;
  j["levels_uS"] = levels_uS;
  j["quantize"] = quantize == QuantizeMode::Exact ? "exact" : "nearest";
  j["schedule"] = {{"V_start_mV", schedule.v_start_mV},
                   {"V_end_mV", schedule.v_end_mV},
                   {"V_ref_mV", schedule.v_ref_mV},
                   {"updates_per_step", schedule.updates_per_step},
                   {"total_updates", schedule.total_updates}};
  j["machine"] = {
      {"mode", machine.mode == MachineMode::HardwareFaithful ? "hw" : "ideal"},
      {"update_order",
       machine.order == UpdateOrder::Sequential ? "sequential" : "chromatic"},
      {"smtj_assignment", machine.assignment == SmtjAssignment::Fixed      ? "fixed"
                          : machine.assignment == SmtjAssignment::PerTrial ? "per_trial"
                                                                           : "per_row"},
      {"pulse_width_us", machine.pulse_width_us},
      {"snapshot_stride", machine.snapshot_stride}};
  j["device"] = {{"K_per_V", device.K_per_V},
                 {"V_half_mV", device.V_half_mV},
                 {"R_P_ohm", device.R_P_ohm},
                 {"R_AP_ohm", device.R_AP_ohm},
                 {"R_plus_ohm", device.R_plus_ohm},
                 {"V_compliance_mV", device.V_compliance_mV},
                 {"rate_scale_per_s", device.rate_scale_per_s}};
  if (device_spread)
    j["device_spread"] = {{"K_rel_sigma", device_spread->K_rel_sigma},
                          {"V_half_sigma_mV", device_spread->V_half_sigma_mV},
                          {"rate_scale_rel_sigma", device_spread->rate_scale_rel_sigma}};
  j["programming"] = {{"tolerance_uS", programming.tolerance_uS},
                      {"max_pulses", programming.max_pulses},
                      {"noise_sigma_uS", programming.noise_sigma_uS},
                      {"max_step_uS", programming.max_step_uS},
                      {"settle_check", programming.settle_check}};
  j["mac_noise_sigma_uA"] = mac_noise_sigma_uA;
  j["trials"] = trials;
  j["seed"] = seed;
  if (drift)
    j["drift"] = {{"elapsed_hours", drift->elapsed_hours},
                  {"sigma_per_decade_uS", drift->sigma_per_decade_uS},
                  {"bound_uS", drift->bound_uS}};
  if (!sweep.is_null() && !sweep.empty()) j["sweep"] = sweep;
  return j;
}

SmtjDevice ExperimentConfig::nominal_device() const {
  SmtjDevice d;
  d.K = device.K_per_V;
  d.V_half = device.V_half_mV * 1e-3;
  d.R_P = device.R_P_ohm;
  d.R_AP = device.R_AP_ohm;
  d.R_plus = device.R_plus_ohm;
  d.V_compliance = device.V_compliance_mV * 1e-3;
  d.rate_scale = device.rate_scale_per_s;
  return d;
}

ProgramVerifyConfig ExperimentConfig::programming_config() const {
  ProgramVerifyConfig p;
  p.tolerance_uS = programming.tolerance_uS;
  p.max_pulses = programming.max_pulses;
  p.per_pulse_noise_sigma_uS = programming.noise_sigma_uS;
  p.max_step_uS = programming.max_step_uS;
  p.settle_check = programming.settle_check;
  return p;
}

AnnealSchedule ExperimentConfig::anneal_schedule() const {
  AnnealSchedule s;
  s.V_start = schedule.v_start_mV * 1e-3;
  s.V_end = schedule.v_end_mV * 1e-3;
  s.V_ref = schedule.v_ref_mV * 1e-3;
  s.updates_per_step = schedule.updates_per_step;
  s.total_updates = schedule.total_updates;
  return s;
}

MachineConfig ExperimentConfig::machine_config() const {
  MachineConfig m;
  m.mode = machine.mode;
  m.order = machine.order;
  m.assignment = machine.assignment;
  m.pulse_width_s = machine.pulse_width_us * 1e-6;
  m.mac_noise_sigma_uA = mac_noise_sigma_uA;
  m.snapshot_stride = machine.snapshot_stride;
  return m;
}

DriftModel ExperimentConfig::drift_model() const {
  if (!drift) throw ValidationError("config: no drift block present");
  DriftModel d;
  d.sigma_per_decade_uS = drift->sigma_per_decade_uS;
  d.bound_uS = drift->bound_uS;
  return d;
}

}  // namespace pbit
