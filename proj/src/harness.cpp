#include "pbit/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

#include "pbit/errors.hpp"

namespace pbit {

namespace {

std::string fmt6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.5e", x);
  return buf;
}

IsingModel build_model(const ExperimentConfig& cfg, const WeightedGraph& graph) {
  return cfg.problem == ProblemKind::MaxCut
             ? map_maxcut(graph, cfg.A)
             : map_coloring(graph, cfg.colors, cfg.A);
}

struct TrialSeeds {
  std::uint64_t trial_seed;
  std::uint64_t programming;
  std::uint64_t devices;
  std::uint64_t drift;
  std::uint64_t anneal;
};

TrialSeeds trial_seeds(std::uint64_t campaign_seed, int trial) {
  TrialSeeds s{};
  s.trial_seed = derive_seed(campaign_seed, static_cast<std::uint64_t>(trial));
  s.programming = derive_seed(s.trial_seed, 1);
  s.devices = derive_seed(s.trial_seed, 2);
  s.drift = derive_seed(s.trial_seed, 3);
  s.anneal = derive_seed(s.trial_seed, 4);
  return s;
}

SmtjDevice draw_device(const SmtjDevice& nominal,
                       const std::optional<ExperimentConfig::Spread>& spread, Rng& rng) {
  if (!spread) return nominal;
  SmtjDevice d = nominal;
  d.K = nominal.K * std::max(0.1, 1.0 + gaussian(rng, 0.0, spread->K_rel_sigma));
  d.V_half = nominal.V_half + gaussian(rng, 0.0, spread->V_half_sigma_mV * 1e-3);
  d.rate_scale =
      nominal.rate_scale * std::max(0.1, 1.0 + gaussian(rng, 0.0, spread->rate_scale_rel_sigma));
  return d;
}

std::vector<SmtjDevice> draw_trial_devices(const ExperimentConfig& cfg, int rows,
                                           std::uint64_t device_seed) {
  const SmtjDevice nominal = cfg.nominal_device();
  Rng rng = make_rng(device_seed);
  switch (cfg.machine.assignment) {
    case SmtjAssignment::Fixed:
      return {nominal};
    case SmtjAssignment::PerTrial:
      return {draw_device(nominal, cfg.device_spread, rng)};
    case SmtjAssignment::PerRow: {
      std::vector<SmtjDevice> devices;
      devices.reserve(rows);
      for (int r = 0; r < rows; ++r)
        devices.push_back(draw_device(nominal, cfg.device_spread, rng));
      return devices;
    }
  }
  return {nominal};
}

struct ProgrammedArray {
  CrossbarArray array;
  ProgrammingReport report;
};

ProgrammedArray program_trial_array(const ExperimentConfig& cfg,
                                    const CrossbarLowering& lowering,
                                    std::uint64_t programming_seed) {
  const int rows = static_cast<int>(lowering.conductance_targets_uS.size());
  const int cols = static_cast<int>(lowering.conductance_targets_uS.front().size());
  CrossbarArray array(rows, cols, /*hardware_faithful=*/true);
  array.set_column_polarity(lowering.column_polarity);
  Rng rng = make_rng(programming_seed);
  ProgrammingReport report =
      program_and_verify(array, lowering.conductance_targets_uS, cfg.programming_config(), rng);
  return {std::move(array), std::move(report)};
}

TrialOutcome summarize_trial(const ExperimentConfig& cfg, const InstanceBundle& instance,
                             const RunTrace& trace, int trial, std::uint64_t trial_seed) {
  TrialOutcome outcome;
  outcome.trial = trial;
  outcome.trial_seed = trial_seed;
  outcome.final_energy = trace.final_energy;
  outcome.clamp_events = trace.clamp_events;
  outcome.optimum =
      std::abs(trace.final_energy - instance.oracle_min_energy) <= kGroundStateTolerance;
  for (const auto& u : trace.updates) {
    if (std::abs(u.energy - instance.oracle_min_energy) <= kGroundStateTolerance) {
      outcome.updates_to_optimum = u.iteration;
      break;
    }
  }
  if (cfg.problem == ProblemKind::MaxCut) {
    outcome.cut_weight = decode_cut(instance.graph, trace.final_state).cut_weight;
  } else {
    outcome.coloring_valid =
        decode_coloring(instance.graph, cfg.colors, trace.final_state).valid();
  }
  return outcome;
}

Json state_to_json(const SpinState& state) {
  Json a = Json::array();
  for (int v : state.values) a.push_back(v);
  return a;
}

Json trial_sidecar(const ExperimentConfig& cfg, const InstanceBundle& instance,
                   const TrialOutcome& outcome, const TrialSeeds& seeds,
                   const RunTrace& trace) {
  Json j;
  j["config"] = cfg.to_json();
  j["trial"] = outcome.trial;
  j["campaign_seed"] = cfg.seed;
  j["trial_seed"] = seeds.trial_seed;
  j["anneal_seed"] = seeds.anneal;
  j["final_state"] = state_to_json(trace.final_state);
  j["final_energy"] = trace.final_energy;
  j["oracle_min_energy"] = instance.oracle_min_energy;
  j["optimum"] = outcome.optimum;
  j["updates_to_optimum"] = outcome.updates_to_optimum;
  j["clamp_events"] = outcome.clamp_events;
  j["programming_pulses"] = outcome.programming_pulses;
  if (outcome.cut_weight) j["cut_weight"] = *outcome.cut_weight;
  if (outcome.coloring_valid) j["coloring_valid"] = *outcome.coloring_valid;
  Json snaps = Json::array();
  for (const auto& [iteration, state] : trace.snapshots)
    snaps.push_back({{"iteration", iteration}, {"state", state_to_json(state)}});
  j["snapshots"] = snaps;
  return j;
}

std::string trial_stem(int trial) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "trial_%03d", trial);
  return buf;
}

long median_successful_updates(const std::vector<TrialOutcome>& trials) {
  std::vector<long> v;
  for (const auto& t : trials)
    if (t.optimum && t.updates_to_optimum >= 0) v.push_back(t.updates_to_optimum);
  if (v.empty()) return -1;
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

struct TrialArtifacts {
  TrialOutcome outcome;
  RunTrace trace;
  TrialSeeds seeds;
};

TrialArtifacts run_single_trial(const ExperimentConfig& cfg, const InstanceBundle& instance,
                                int trial) {
  TrialArtifacts art;
  art.seeds = trial_seeds(cfg.seed, trial);

  ProgrammedArray programmed = program_trial_array(cfg, instance.lowering, art.seeds.programming);
  if (cfg.drift) {
    Rng drift_rng = make_rng(art.seeds.drift);
    apply_drift(programmed.array, cfg.drift->elapsed_hours, cfg.drift_model(), drift_rng);
  }
  auto devices =
      draw_trial_devices(cfg, programmed.array.rows(), art.seeds.devices);
  GibbsMachine machine(instance.model, instance.lowering, std::move(programmed.array),
                       std::move(devices), cfg.machine_config());
  art.trace = machine.run_annealing(cfg.anneal_schedule(), art.seeds.anneal);
  art.outcome = summarize_trial(cfg, instance, art.trace, trial, art.seeds.trial_seed);
  art.outcome.programming_pulses = programmed.report.total_pulses;
  art.outcome.programming_ok = programmed.report.ok();
  return art;
}

void write_trial_files(const ExperimentConfig& cfg, const InstanceBundle& instance,
                       const TrialArtifacts& art, const std::filesystem::path& out_dir) {
  const std::string stem = trial_stem(art.outcome.trial);
  write_trace_csv(art.trace, out_dir / (stem + ".trace.csv"));
  const Json sidecar = trial_sidecar(cfg, instance, art.outcome, art.seeds, art.trace);
  write_text_atomic(sidecar.dump(2) + "\n", out_dir / (stem + ".json"));
}

Json campaign_summary_json(const ExperimentConfig& cfg, const CampaignOutcome& outcome) {
  Json j;
  j["problem"] = to_string(cfg.problem);
  j["trials"] = static_cast<int>(outcome.trials.size());
  j["successes"] = outcome.successes;
  j["success_rate"] =
      outcome.trials.empty() ? 0.0
                             : static_cast<double>(outcome.successes) / outcome.trials.size();
  j["oracle_min_energy"] = outcome.oracle_min_energy;
  j["ground_state_count"] = outcome.ground_state_count;
  j["median_updates_to_optimum"] = outcome.median_updates_to_optimum;
  Json per = Json::array();
  for (const auto& t : outcome.trials) {
    Json row = {{"trial", t.trial},
                {"final_energy", t.final_energy},
                {"optimum", t.optimum},
                {"updates_to_optimum", t.updates_to_optimum},
                {"clamp_events", t.clamp_events},
                {"programming_pulses", t.programming_pulses}};
    if (t.cut_weight) row["cut_weight"] = *t.cut_weight;
    if (t.coloring_valid) row["coloring_valid"] = *t.coloring_valid;
    per.push_back(row);
  }
  j["per_trial"] = per;
  return j;
}

}  // namespace

InstanceBundle build_instance(const ExperimentConfig& cfg) {
  WeightedGraph graph = load_graph(cfg.graph_path);
  IsingModel model = build_model(cfg, graph);
  CrossbarLowering lowering = to_crossbar(model, cfg.levels_uS, cfg.G_scale_uS, cfg.quantize);

  double min_energy = 0.0;
  std::uint64_t count = 0;
  if (cfg.problem == ProblemKind::MaxCut) {
    const OracleResult r = exhaustive_ground_state(model);
    min_energy = r.min_energy;
    count = r.ground_state_count;
  } else if (const auto certified = coloring_optimum_energy(graph, cfg.colors, cfg.A)) {
    min_energy = *certified;
  } else if (model.size() <= kMaxExhaustiveSpins) {
    const OracleResult r = exhaustive_ground_state(model);
    min_energy = r.min_energy;
    count = r.ground_state_count;
  } else {
    throw CapacityError("campaign: coloring instance has no proper coloring and is too "
                        "large for exhaustive certification");
  }
  return InstanceBundle{std::move(graph), std::move(model), std::move(lowering), min_energy,
                        count};
}

CampaignOutcome cmd_run(const ExperimentConfig& cfg, const std::filesystem::path* out_dir) {
  const InstanceBundle instance = build_instance(cfg);
  if (out_dir) std::filesystem::create_directories(*out_dir);

  std::vector<std::future<TrialArtifacts>> futures;
  futures.reserve(cfg.trials);
  for (int t = 0; t < cfg.trials; ++t)
    futures.push_back(std::async(std::launch::async,
                                 [&cfg, &instance, t] { return run_single_trial(cfg, instance, t); }));

  CampaignOutcome outcome;
  outcome.oracle_min_energy = instance.oracle_min_energy;
  outcome.ground_state_count = instance.ground_state_count;
  for (auto& f : futures) {
    TrialArtifacts art = f.get();
    if (out_dir) write_trial_files(cfg, instance, art, *out_dir);
    outcome.successes += art.outcome.optimum;
    outcome.trials.push_back(std::move(art.outcome));
  }
  outcome.median_updates_to_optimum = median_successful_updates(outcome.trials);
  if (out_dir)
    write_text_atomic(campaign_summary_json(cfg, outcome).dump(2) + "\n",
                      *out_dir / "summary.json");
  return outcome;
}

MapReport cmd_map(const ExperimentConfig& cfg, const std::filesystem::path* out_dir) {
  const WeightedGraph graph = load_graph(cfg.graph_path);
  const IsingModel model = build_model(cfg, graph);
  const CrossbarLowering lowering =
      to_crossbar(model, cfg.levels_uS, cfg.G_scale_uS, cfg.quantize);
  MapReport report;
  report.n_spins = model.size();
  report.rows = static_cast<int>(lowering.conductance_targets_uS.size());
  report.cols = static_cast<int>(lowering.conductance_targets_uS.front().size());
  report.nonzero_couplings = model.nonzero_couplings();
  report.zero_coupling_fraction = lowering.zero_coupling_fraction;
  report.has_bias_column = lowering.bias_column.has_value();
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    save_conductance_csv(lowering.conductance_targets_uS, *out_dir / "conductance_map.csv");
  }
  return report;
}

OracleReport cmd_oracle(const ExperimentConfig& cfg) {
  const WeightedGraph graph = load_graph(cfg.graph_path);
  const IsingModel model = build_model(cfg, graph);
  OracleReport report;
  if (cfg.problem == ProblemKind::MaxCut) {
    const OracleResult r = exhaustive_ground_state(model);
    report.min_energy = r.min_energy;
    report.ground_state_count = r.ground_state_count;
    report.states_scanned = r.states_scanned;
    report.max_cut_weight = cut_weight_from_energy(graph, r.min_energy, cfg.A);
  } else {
    const ColoringWitness w = coloring_exists(graph, cfg.colors);
    report.colorable = w.colorable;
    if (w.colorable) {
      report.min_energy = -cfg.A * graph.n_vertices;
    } else if (model.size() <= kMaxExhaustiveSpins) {
      const OracleResult r = exhaustive_ground_state(model);
      report.min_energy = r.min_energy;
      report.ground_state_count = r.ground_state_count;
      report.states_scanned = r.states_scanned;
    }
  }
  return report;
}

SweepOutcome cmd_sweep(const ExperimentConfig& cfg, const std::filesystem::path* out_dir) {
  if (cfg.sweep.is_null() || cfg.sweep.empty())
    throw ValidationError("sweep: config has no sweep block (or it is empty)");
  std::vector<std::string> keys;
  std::vector<std::vector<Json>> values;
  for (const auto& [key, list] : cfg.sweep.items()) {
    if (!list.is_array() || list.empty())
      throw ValidationError("sweep: parameter \"" + key + "\" needs a nonempty value list");
    keys.push_back(key);
    values.emplace_back(list.begin(), list.end());
  }

  const Json base = [&] {
    Json b = cfg.to_json();
    b.erase("sweep");
    return b;
  }();

  auto apply_override = [](Json& doc, const std::string& dotted, const Json& value) {
    Json* node = &doc;
    std::stringstream ss(dotted);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
      if (!node->contains(parts[k]))
        throw ValidationError("sweep: unknown parameter path \"" + dotted + "\"");
      node = &(*node)[parts[k]];
    }
    if (parts.empty() || !node->contains(parts.back()))
      throw ValidationError("sweep: unknown parameter path \"" + dotted + "\"");
    (*node)[parts.back()] = value;
  };

  SweepOutcome outcome;
  std::vector<std::size_t> index(keys.size(), 0);
  while (true) {
    Json doc = base;
    Json overrides;
    std::string label;
    for (std::size_t k = 0; k < keys.size(); ++k) {
      apply_override(doc, keys[k], values[k][index[k]]);
      overrides[keys[k]] = values[k][index[k]];
      if (!label.empty()) label += ";";
      label += keys[k] + "=" + values[k][index[k]].dump();
    }
    const ExperimentConfig point_cfg = parse_experiment_config(doc, std::filesystem::path());
    const CampaignOutcome run = cmd_run(point_cfg, nullptr);

    SweepPoint point;
    point.label = label;
    point.overrides = overrides;
    point.trials = static_cast<int>(run.trials.size());
    point.successes = run.successes;
    point.success_rate = point.trials ? static_cast<double>(run.successes) / point.trials : 0.0;
    point.median_updates_to_optimum = run.median_updates_to_optimum;
    outcome.points.push_back(std::move(point));

    std::size_t k = 0;
    for (; k < keys.size(); ++k) {
      if (++index[k] < values[k].size()) break;
      index[k] = 0;
    }
    if (k == keys.size()) break;
  }

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    std::string csv = "point,overrides,trials,successes,success_rate,median_updates_to_optimum\n";
    Json rows = Json::array();
    for (std::size_t k = 0; k < outcome.points.size(); ++k) {
      const auto& p = outcome.points[k];
      csv += std::to_string(k) + ",\"" + p.label + "\"," + std::to_string(p.trials) + "," +
             std::to_string(p.successes) + "," + fmt6(p.success_rate) + "," +
             std::to_string(p.median_updates_to_optimum) + "\n";
      rows.push_back({{"point", k},
                      {"overrides", p.overrides},
                      {"trials", p.trials},
                      {"successes", p.successes},
                      {"success_rate", p.success_rate},
                      {"median_updates_to_optimum", p.median_updates_to_optimum}});
    }
    write_text_atomic(csv, *out_dir / "grid_summary.csv");
    write_text_atomic(rows.dump(2) + "\n", *out_dir / "grid_summary.json");
  }
  return outcome;
}

DriftRerunOutcome cmd_drift_rerun(const ExperimentConfig& cfg,
                                  const std::filesystem::path* out_dir) {
  if (!cfg.drift)
    throw ValidationError("drift-rerun: config needs a drift block");
  ExperimentConfig base = cfg;
  base.drift.reset();  // drift is applied here, not inside the trial runner
  const InstanceBundle instance = build_instance(base);
  if (out_dir) std::filesystem::create_directories(*out_dir);

  DriftRerunOutcome outcome;
  double delta_sum = 0.0;
  for (int t = 0; t < cfg.trials; ++t) {
    const TrialSeeds seeds = trial_seeds(cfg.seed, t);
    ProgrammedArray programmed = program_trial_array(cfg, instance.lowering, seeds.programming);
    auto devices = draw_trial_devices(cfg, programmed.array.rows(), seeds.devices);

    CrossbarArray aged_array = programmed.array;  // one programming, two runs
    Rng drift_rng = make_rng(seeds.drift);
    apply_drift(aged_array, cfg.drift->elapsed_hours, cfg.drift_model(), drift_rng);

    GibbsMachine fresh_machine(instance.model, instance.lowering, std::move(programmed.array),
                               devices, base.machine_config());
    MachineConfig aged_config = base.machine_config();
    aged_config.mode = MachineMode::IdealSigmoid;  // software sigmoid rerun
    GibbsMachine aged_machine(instance.model, instance.lowering, std::move(aged_array),
                              devices, aged_config);

    const RunTrace fresh_trace = fresh_machine.run_annealing(cfg.anneal_schedule(), seeds.anneal);
    const RunTrace aged_trace = aged_machine.run_annealing(cfg.anneal_schedule(), seeds.anneal);

    TrialOutcome fresh = summarize_trial(base, instance, fresh_trace, t, seeds.trial_seed);
    TrialOutcome aged = summarize_trial(base, instance, aged_trace, t, seeds.trial_seed);
    outcome.fresh_successes += fresh.optimum;
    outcome.aged_successes += aged.optimum;
    delta_sum += aged_trace.final_energy - fresh_trace.final_energy;

    if (out_dir) {
      const std::string stem = trial_stem(t);
      write_trace_csv(fresh_trace, *out_dir / (stem + ".fresh.trace.csv"));
      write_trace_csv(aged_trace, *out_dir / (stem + ".aged.trace.csv"));
    }
    outcome.fresh.push_back(std::move(fresh));
    outcome.aged.push_back(std::move(aged));
  }
  outcome.mean_final_cost_delta = cfg.trials ? delta_sum / cfg.trials : 0.0;

  if (out_dir) {
    Json j;
    j["trials"] = cfg.trials;
    j["fresh_successes"] = outcome.fresh_successes;
    j["aged_successes"] = outcome.aged_successes;
    j["mean_final_cost_delta"] = outcome.mean_final_cost_delta;
    Json per = Json::array();
    for (int t = 0; t < cfg.trials; ++t)
      per.push_back({{"trial", t},
                     {"fresh_final_energy", outcome.fresh[t].final_energy},
                     {"fresh_optimum", outcome.fresh[t].optimum},
                     {"aged_final_energy", outcome.aged[t].final_energy},
                     {"aged_optimum", outcome.aged[t].optimum}});
    j["per_trial"] = per;
    write_text_atomic(j.dump(2) + "\n", *out_dir / "drift_rerun.json");
  }
  return outcome;
}

SpinState replay_trial(const Json& sidecar) {
  if (!sidecar.contains("config") || !sidecar.contains("trial"))
    throw ValidationError("replay: sidecar lacks a config echo or trial index");
  const ExperimentConfig cfg =
      parse_experiment_config(sidecar.at("config"), std::filesystem::path());
  const InstanceBundle instance = build_instance(cfg);
  const TrialArtifacts art = run_single_trial(cfg, instance, sidecar.at("trial").get<int>());
  return art.trace.final_state;
}

void write_trace_csv(const RunTrace& trace, const std::filesystem::path& path) {
  std::string out = "iteration,v_read_mV,flipped_index,energy\n";
  out.reserve(out.size() + trace.updates.size() * 40);
  for (const auto& u : trace.updates) {
    out += std::to_string(u.iteration);
    out += ',';
    out += fmt6(u.v_read * 1e3);
    out += ',';
    out += std::to_string(u.site);
    out += ',';
    out += fmt6(u.energy);
    out += '\n';
  }
  write_text_atomic(out, path);
}

void write_text_atomic(const std::string& content, const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write file: " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace pbit
