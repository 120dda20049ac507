#include <doctest.h>

#include <cmath>
#include <vector>

#include "pbit/annealer.hpp"
#include "pbit/errors.hpp"
#include "pbit/oracle.hpp"
#include "test_util.hpp"

using namespace pbit;

namespace {

GibbsMachine ideal_machine(const IsingModel& model, double g_scale_uS,
                           MachineConfig config = {}) {
  config.mode = MachineMode::IdealSigmoid;
  const auto lowering = to_crossbar(model, {}, g_scale_uS);
  return GibbsMachine::with_exact_array(model, lowering, SmtjDevice{}, config);
}

GibbsMachine hw_machine(const IsingModel& model, double g_scale_uS,
                        MachineConfig config = {}) {
  const auto lowering = to_crossbar(model, {}, g_scale_uS);
  return GibbsMachine::with_exact_array(model, lowering, SmtjDevice{}, config);
}

// per-update empirical state distribution of a sequential single-site sampler
std::vector<double> sampled_distribution(const GibbsMachine& machine, double v_read,
                                         int burn_in, int samples, Rng& rng) {
  const int n = machine.model().size();
  SpinState state = random_state(n, machine.model().domain(), rng);
  std::vector<double> counts(std::size_t{1} << n, 0.0);
  std::uint64_t bits = state_to_bits(state);
  for (int t = 0; t < burn_in + samples; ++t) {
    const int site = t % n;
    machine.gibbs_step(state, site, v_read, rng);
    if (state.values[site] == spin_high(state.domain))
      bits |= std::uint64_t{1} << site;
    else
      bits &= ~(std::uint64_t{1} << site);
    if (t >= burn_in) counts[bits] += 1.0;
  }
  for (double& c : counts) c /= samples;
  return counts;
}

}  // namespace

TEST_CASE("effective beta is the read-voltage ratio") {
  CHECK(effective_beta(0.25, 0.25) == doctest::Approx(1.0));
  CHECK(effective_beta(0.035, 0.25) == doctest::Approx(0.14));
  CHECK_THROWS_AS(effective_beta(0.1, 0.0), ValidationError);
}

TEST_CASE("schedule validation and ramp shape") {
  AnnealSchedule s;  // 35 -> 250 mV, 7200 updates, 50 per step
  s.validate();
  CHECK(s.num_steps() == 144);
  CHECK(s.v_read_at(0) == doctest::Approx(0.035));
  CHECK(s.v_read_at(49) == doctest::Approx(0.035));
  CHECK(s.v_read_at(50) > 0.035);
  CHECK(s.v_read_at(7199) == doctest::Approx(0.25));
  double prev = 0.0;
  for (int t = 0; t < s.total_updates; ++t) {
    const double v = s.v_read_at(t);
    CHECK(v >= prev);
    if (t % s.updates_per_step != 0) CHECK(v == prev);
    prev = v;
  }

  AnnealSchedule flat = s;
  flat.V_end = flat.V_start;
  flat.validate();
  CHECK(flat.v_read_at(0) == flat.v_read_at(7199));

  AnnealSchedule bad = s;
  bad.V_start = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = s;
  bad.V_end = 0.9;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = s;
  bad.updates_per_step = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = s;
  bad.total_updates = 10;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("hardware chain equals the ideal sigmoid with a saturating pulse") {
  IsingModel model(2, SpinDomain::PlusMinusOne, {{0, 1, -1.0}}, {0, 0});
  const double g_scale = 33.0;
  auto machine = hw_machine(model, g_scale);
  const SmtjDevice dev;
  Rng rng = make_rng(404);
  for (int k = 0; k < 100; ++k) {
    const double f = 6.0 * uniform01(rng) - 3.0;
    const double v_read = 0.035 + 0.215 * uniform01(rng);
    const double i_mac_uA = v_read * g_scale * f;
    const double hw =
        smtj_ap_probability(dev, mac_to_vmtj(i_mac_uA, dev).v_mtj,
                            dev.saturation_pulse_width());
    const double ideal = logistic(machine.hardware_beta(v_read) * f);
    CHECK(std::abs(hw - ideal) < 1e-9);
  }
}

TEST_CASE("gibbs_step at zero field is a fair coin in both modes") {
  IsingModel model(1, SpinDomain::PlusMinusOne, {}, {0.0});
  for (MachineMode mode : {MachineMode::HardwareFaithful, MachineMode::IdealSigmoid}) {
    MachineConfig config;
    config.mode = mode;
    auto machine = hw_machine(model, 33.0, config);
    Rng rng = make_rng(17);
    int high = 0;
    const int n = 20000;
    SpinState s{{1}, SpinDomain::PlusMinusOne};
    for (int k = 0; k < n; ++k) {
      machine.gibbs_step(s, 0, 0.1, rng);
      high += s.values[0] == 1;
    }
    CHECK(std::abs(high / static_cast<double>(n) - 0.5) < 3.0 * std::sqrt(0.25 / n));
  }
}

TEST_CASE("a strongly biased single spin saturates high") {
  IsingModel model(1, SpinDomain::PlusMinusOne, {}, {2.0});
  auto machine = hw_machine(model, 33.0);
  Rng rng = make_rng(5);
  SpinState s{{-1}, SpinDomain::PlusMinusOne};
  int high = 0;
  for (int k = 0; k < 1000; ++k) {
    machine.gibbs_step(s, 0, 0.25, rng);
    high += s.values[0] == 1;
  }
  CHECK(high == 1000);  // beta_hw * f ~ 21, flip probability ~ 1 - 1e-9
}

TEST_CASE("ideal-mode sampler reproduces the Boltzmann distribution") {
  Rng seed_rng = make_rng(314);
  auto model = test::random_model(8, SpinDomain::PlusMinusOne, seed_rng,
                                  {.edge_probability = 0.4,
                                   .coupling_min = -1.0,
                                   .coupling_max = -0.25,
                                   .bias_min = 0.0,
                                   .bias_max = 0.3});
  auto machine = ideal_machine(model, 33.0);
  const double v_read = 0.05;
  Rng rng = make_rng(2718);
  const auto empirical = sampled_distribution(machine, v_read, 50000, 400000, rng);
  // the composed-chain slope has no domain factor 2, so the matching
  // Boltzmann temperature is beta_hw / 2 in the {-1,+1} domain
  const auto exact = exact_boltzmann(model, machine.hardware_beta(v_read) / 2.0);
  CHECK(test::total_variation(empirical, exact) < 0.03);
}

TEST_CASE("detailed balance of the single-site kernel on small models") {
  Rng rng = make_rng(161);
  for (int n = 2; n <= 6; ++n) {
    auto model = test::random_model(n, SpinDomain::PlusMinusOne, rng,
                                    {.edge_probability = 0.6,
                                     .coupling_min = -1.0,
                                     .coupling_max = 1.0,
                                     .bias_min = -0.5,
                                     .bias_max = 0.5});
    const double beta = 0.9;
    const auto pi = exact_boltzmann(model, beta);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
      const SpinState x = state_from_bits(bits, n, model.domain());
      for (int i = 0; i < n; ++i) {
        const std::uint64_t flipped = bits ^ (std::uint64_t{1} << i);
        const SpinState y = state_from_bits(flipped, n, model.domain());
        const double p_up = conditional_flip_probability(model, x, i, beta);
        const double k_xy = (flipped >> i) & 1 ? p_up : 1.0 - p_up;
        const double q_up = conditional_flip_probability(model, y, i, beta);
        const double k_yx = (bits >> i) & 1 ? q_up : 1.0 - q_up;
        CHECK(pi[bits] * k_xy == doctest::Approx(pi[flipped] * k_yx).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("run_annealing is byte-reproducible and keeps a consistent energy ledger") {
  Rng seed_rng = make_rng(55);
  auto graph = random_maxcut_instance(12, 20, 3, seed_rng);
  auto model = map_maxcut(graph, 1.0);
  const double levels[] = {33.0, 66.0, 99.0};
  const auto lowering = to_crossbar(model, levels, 33.0);
  MachineConfig config;
  config.snapshot_stride = 25;
  auto machine = GibbsMachine::with_exact_array(model, lowering, SmtjDevice{}, config);

  AnnealSchedule schedule;
  schedule.total_updates = 2000;
  const auto a = machine.run_annealing(schedule, 12345);
  const auto b = machine.run_annealing(schedule, 12345);

  REQUIRE(a.updates.size() == 2000);
  CHECK(a.final_state == b.final_state);
  CHECK(a.final_energy == b.final_energy);
  REQUIRE(a.updates.size() == b.updates.size());
  for (std::size_t k = 0; k < a.updates.size(); ++k) {
    CHECK(a.updates[k].energy == b.updates[k].energy);
    CHECK(a.updates[k].site == b.updates[k].site);
    CHECK(a.updates[k].v_read == b.updates[k].v_read);
  }

  // monotone schedule in the trace, stepping only at updates_per_step boundaries
  for (std::size_t k = 1; k < a.updates.size(); ++k) {
    CHECK(a.updates[k].v_read >= a.updates[k - 1].v_read);
    if (a.updates[k].iteration % schedule.updates_per_step != 0)
      CHECK(a.updates[k].v_read == a.updates[k - 1].v_read);
  }

  // snapshot energies recompute exactly
  REQUIRE(!a.snapshots.empty());
  for (const auto& [iteration, state] : a.snapshots)
    CHECK(std::abs(energy(model, state) - a.updates[iteration].energy) < 1e-9);
  CHECK(energy(model, a.final_state) == doctest::Approx(a.final_energy).epsilon(1e-12));

  const auto c = machine.run_annealing(schedule, 54321);
  CHECK(c.updates.size() == a.updates.size());
}

TEST_CASE("annealing solves a small weighted cut instance") {
  Rng seed_rng = make_rng(77);
  auto graph = random_maxcut_instance(12, 20, 3, seed_rng);
  auto model = map_maxcut(graph, 1.0);
  const auto oracle = exhaustive_ground_state(model);
  const double levels[] = {33.0, 66.0, 99.0};
  auto machine =
      GibbsMachine::with_exact_array(model, to_crossbar(model, levels, 33.0), SmtjDevice{}, {});
  AnnealSchedule schedule;
  schedule.total_updates = 3000;
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto trace = machine.run_annealing(schedule, derive_seed(9000, seed));
    hits += std::abs(trace.final_energy - oracle.min_energy) <= 1e-9;
  }
  CHECK(hits >= 4);
}

TEST_CASE("clamp events are counted when the compliance voltage is low") {
  IsingModel model(2, SpinDomain::PlusMinusOne, {{0, 1, -3.0}}, {0, 0});
  SmtjDevice dev;
  dev.V_compliance = 0.60;  // barely above V_half
  const auto lowering = to_crossbar(model, {}, 33.0);
  auto machine = GibbsMachine::with_exact_array(model, lowering, dev, {});
  AnnealSchedule schedule;
  schedule.total_updates = 200;
  const auto trace = machine.run_annealing(schedule, 7);
  CHECK(trace.clamp_events > 0);
}

TEST_CASE("chromatic sweep of a disconnected model is independent coin flips") {
  IsingModel model(6, SpinDomain::PlusMinusOne, {}, std::vector<double>(6, 0.0));
  auto machine = ideal_machine(model, 33.0);
  const auto classes = conflict_coloring(model);
  REQUIRE(classes.size() == 1);
  REQUIRE(classes.front().size() == 6);
  Rng rng = make_rng(31);
  SpinState s{std::vector<int>(6, -1), SpinDomain::PlusMinusOne};
  std::vector<int> highs(6, 0);
  const int sweeps = 20000;
  for (int k = 0; k < sweeps; ++k) {
    machine.chromatic_sweep(s, classes, 0.1, rng);
    for (int i = 0; i < 6; ++i) highs[i] += s.values[i] == 1;
  }
  for (int i = 0; i < 6; ++i)
    CHECK(std::abs(highs[i] / static_cast<double>(sweeps) - 0.5) <
          4.0 * std::sqrt(0.25 / sweeps));
}

TEST_CASE("chromatic sweep matches the Boltzmann distribution on a chain") {
  std::vector<Coupling> chain;
  for (int i = 0; i < 5; ++i) chain.push_back({i, i + 1, -0.8});
  IsingModel model(6, SpinDomain::PlusMinusOne, chain, std::vector<double>(6, 0.0));
  auto machine = ideal_machine(model, 33.0);
  const auto classes = conflict_coloring(model);
  REQUIRE(classes.size() == 2);  // bipartite chain
  validate_color_classes(model, classes);

  const double v_read = 0.05;
  Rng rng = make_rng(2222);
  SpinState s = random_state(6, SpinDomain::PlusMinusOne, rng);
  std::vector<double> counts(64, 0.0);
  const int burn_in = 20000, sweeps = 400000;
  for (int k = 0; k < burn_in + sweeps; ++k) {
    machine.chromatic_sweep(s, classes, v_read, rng);
    if (k >= burn_in) counts[state_to_bits(s)] += 1.0;
  }
  for (double& c : counts) c /= sweeps;
  const auto exact = exact_boltzmann(model, machine.hardware_beta(v_read) / 2.0);
  CHECK(test::total_variation(counts, exact) < 0.02);
}

TEST_CASE("invalid class partitions are rejected before any update") {
  IsingModel model(4, SpinDomain::PlusMinusOne,
                   {{0, 1, -1.0}, {1, 2, -1.0}, {2, 3, -1.0}}, {0, 0, 0, 0});
  auto machine = ideal_machine(model, 33.0);
  Rng rng = make_rng(4);
  SpinState s{{1, -1, 1, -1}, SpinDomain::PlusMinusOne};
  const SpinState before = s;
  CHECK_THROWS_AS(machine.chromatic_sweep(s, {{0, 1}, {2, 3}}, 0.1, rng), ValidationError);
  CHECK(s == before);
}

TEST_CASE("chromatic runs are reproducible through run_annealing") {
  Rng seed_rng = make_rng(88);
  auto graph = random_colorable_instance(6, 8, 3, seed_rng);
  auto model = map_coloring(graph, 3, 1.0);
  const double levels[] = {70.0, 140.0};
  MachineConfig config;
  config.order = UpdateOrder::Chromatic;
  config.mode = MachineMode::IdealSigmoid;
  auto machine =
      GibbsMachine::with_exact_array(model, to_crossbar(model, levels, 70.0), SmtjDevice{}, config);
  AnnealSchedule schedule;
  schedule.total_updates = 900;
  const auto a = machine.run_annealing(schedule, 99);
  const auto b = machine.run_annealing(schedule, 99);
  CHECK(a.final_state == b.final_state);
  REQUIRE(a.updates.size() == 900);
  // every sweep touches each spin exactly once
  std::vector<int> touched(model.size(), 0);
  for (std::size_t k = 0; k < static_cast<std::size_t>(model.size()); ++k)
    ++touched[a.updates[k].site];
  for (int count : touched) CHECK(count == 1);
  for (const auto& [iteration, state] : a.snapshots)
    CHECK(std::abs(energy(model, state) - a.updates[iteration].energy) < 1e-9);
}
