#include <doctest.h>

#include <cmath>
#include <numeric>

#include "pbit/errors.hpp"
#include "pbit/ising.hpp"
#include "test_util.hpp"

using namespace pbit;

TEST_CASE("spin domain values") {
  CHECK(spin_high(SpinDomain::PlusMinusOne) == 1);
  CHECK(spin_low(SpinDomain::PlusMinusOne) == -1);
  CHECK(spin_high(SpinDomain::ZeroOne) == 1);
  CHECK(spin_low(SpinDomain::ZeroOne) == 0);
  CHECK(is_legal_spin(SpinDomain::PlusMinusOne, -1));
  CHECK_FALSE(is_legal_spin(SpinDomain::PlusMinusOne, 0));
  CHECK_FALSE(is_legal_spin(SpinDomain::ZeroOne, -1));
}

TEST_CASE("model construction rejects bad couplings") {
  CHECK_THROWS_AS(IsingModel(0, SpinDomain::PlusMinusOne, {}, {}), ValidationError);
  CHECK_THROWS_AS(IsingModel(2, SpinDomain::PlusMinusOne, {{0, 0, 1.0}}, {0, 0}),
                  ValidationError);
  CHECK_THROWS_AS(IsingModel(2, SpinDomain::PlusMinusOne, {{0, 2, 1.0}}, {0, 0}),
                  ValidationError);
  CHECK_THROWS_AS(
      IsingModel(2, SpinDomain::PlusMinusOne, {{0, 1, 1.0}, {1, 0, 2.0}}, {0, 0}),
      ValidationError);
  CHECK_THROWS_AS(IsingModel(2, SpinDomain::PlusMinusOne, {}, {0.0}), ValidationError);
}

TEST_CASE("couplings are stored symmetrically with zero diagonal") {
  IsingModel m(3, SpinDomain::PlusMinusOne, {{2, 0, -1.5}}, {0, 0, 0});
  CHECK(m.coupling(0, 2) == m.coupling(2, 0));
  CHECK(m.coupling(0, 2) == -1.5);
  CHECK(m.coupling(0, 0) == 0.0);
  CHECK(m.coupling(0, 1) == 0.0);
}

TEST_CASE("energy of a single antiferromagnetic pair") {
  IsingModel m(2, SpinDomain::PlusMinusOne, {{0, 1, -1.0}}, {0, 0});
  CHECK(energy(m, {{1, 1}, SpinDomain::PlusMinusOne}) == doctest::Approx(1.0));
  CHECK(energy(m, {{1, -1}, SpinDomain::PlusMinusOne}) == doctest::Approx(-1.0));
}

TEST_CASE("zero model has zero energy everywhere") {
  IsingModel m(4, SpinDomain::ZeroOne, {}, {0, 0, 0, 0});
  Rng rng = make_rng(7);
  for (int k = 0; k < 8; ++k)
    CHECK(energy(m, random_state(4, SpinDomain::ZeroOne, rng)) == 0.0);
}

TEST_CASE("energy rejects mismatched states") {
  IsingModel m(2, SpinDomain::PlusMinusOne, {}, {0, 0});
  CHECK_THROWS_AS(energy(m, {{1, 1}, SpinDomain::ZeroOne}), ValidationError);
  CHECK_THROWS_AS(energy(m, {{1, 1, 1}, SpinDomain::PlusMinusOne}), ValidationError);
  CHECK_THROWS_AS(energy(m, {{1, 2}, SpinDomain::PlusMinusOne}), ValidationError);
}

TEST_CASE("local field: bias only") {
  IsingModel m(3, SpinDomain::PlusMinusOne, {}, {0.5, 0.5, 0.5});
  Rng rng = make_rng(1);
  for (int k = 0; k < 4; ++k) {
    auto s = random_state(3, SpinDomain::PlusMinusOne, rng);
    CHECK(local_field(m, s, 1) == doctest::Approx(0.5));
  }
}

TEST_CASE("local field: symmetric neighbors cancel") {
  IsingModel m(3, SpinDomain::PlusMinusOne, {{0, 1, 1.0}, {0, 2, 1.0}}, {0, 0, 0});
  SpinState s{{1, 1, -1}, SpinDomain::PlusMinusOne};
  CHECK(local_field(m, s, 0) == doctest::Approx(0.0));
  CHECK_THROWS_AS(local_field(m, s, 3), ValidationError);
  CHECK_THROWS_AS(local_field(m, s, -1), ValidationError);
}

TEST_CASE("flip identity: dH = (s_old - s_new) f_i in both domains") {
  Rng rng = make_rng(42);
  for (SpinDomain domain : {SpinDomain::PlusMinusOne, SpinDomain::ZeroOne}) {
    auto model = test::random_model(8, domain, rng,
                                    {.edge_probability = 0.5,
                                     .coupling_min = -1.0,
                                     .coupling_max = 1.0,
                                     .bias_min = -0.5,
                                     .bias_max = 0.5});
    for (std::uint64_t bits = 0; bits < 256; ++bits) {
      SpinState s = state_from_bits(bits, 8, domain);
      const double e0 = energy(model, s);
      for (int i = 0; i < 8; ++i) {
        SpinState flipped = s;
        const int old_value = s.values[i];
        const int new_value =
            old_value == spin_high(domain) ? spin_low(domain) : spin_high(domain);
        flipped.values[i] = new_value;
        const double dh = energy(model, flipped) - e0;
        const double f = local_field(model, s, i);
        CHECK(dh == doctest::Approx((old_value - new_value) * f).epsilon(1e-12));
        if (domain == SpinDomain::PlusMinusOne)
          CHECK(dh == doctest::Approx(2.0 * old_value * f).epsilon(1e-12));
        else if (old_value == 0)
          CHECK(dh == doctest::Approx(-f).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("flip identity holds exhaustively up to 10 spins") {
  Rng rng = make_rng(9);
  auto model = test::random_model(10, SpinDomain::PlusMinusOne, rng,
                                  {.edge_probability = 0.3});
  for (std::uint64_t bits = 0; bits < (1u << 10); ++bits) {
    SpinState s = state_from_bits(bits, 10, SpinDomain::PlusMinusOne);
    const double e0 = energy(model, s);
    for (int i = 0; i < 10; ++i) {
      SpinState flipped = s;
      flipped.values[i] = -flipped.values[i];
      CHECK(energy(model, flipped) - e0 ==
            doctest::Approx(2.0 * s.values[i] * local_field(model, s, i)).epsilon(1e-12));
    }
  }
}

TEST_CASE("conditional flip probability at zero field and zero beta") {
  IsingModel m(2, SpinDomain::PlusMinusOne, {{0, 1, 1.0}}, {0, 0});
  SpinState aligned{{1, -1}, SpinDomain::PlusMinusOne};
  // f_0 = J s_1 = -1, but beta = 0 washes it out
  CHECK(conditional_flip_probability(m, aligned, 0, 0.0) == doctest::Approx(0.5));
  IsingModel free(1, SpinDomain::PlusMinusOne, {}, {0.0});
  CHECK(conditional_flip_probability(free, {{1}, SpinDomain::PlusMinusOne}, 0, 3.7) ==
        doctest::Approx(0.5));
  CHECK_THROWS_AS(conditional_flip_probability(m, aligned, 0, -1.0), ValidationError);
}

TEST_CASE("conditional flip probability equals the exact Boltzmann ratio") {
  Rng rng = make_rng(123);
  for (SpinDomain domain : {SpinDomain::PlusMinusOne, SpinDomain::ZeroOne}) {
    for (int n = 2; n <= 6; ++n) {
      auto model = test::random_model(n, domain, rng,
                                      {.edge_probability = 0.6,
                                       .coupling_min = -1.0,
                                       .coupling_max = 1.0,
                                       .bias_min = -0.4,
                                       .bias_max = 0.4});
      const double beta = 0.8;
      const auto p = exact_boltzmann(model, beta);
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
        SpinState s = state_from_bits(bits, n, domain);
        for (int i = 0; i < n; ++i) {
          const std::uint64_t hi = bits | (std::uint64_t{1} << i);
          const std::uint64_t lo = bits & ~(std::uint64_t{1} << i);
          const double ratio = p[hi] / (p[hi] + p[lo]);
          CHECK(conditional_flip_probability(model, s, i, beta) ==
                doctest::Approx(ratio).epsilon(1e-10));
        }
      }
    }
  }
}

TEST_CASE("exact_boltzmann: uniform at beta = 0") {
  Rng rng = make_rng(5);
  auto model = test::random_model(6, SpinDomain::PlusMinusOne, rng);
  const auto p = exact_boltzmann(model, 0.0);
  for (double v : p) CHECK(v == doctest::Approx(1.0 / 64).epsilon(1e-12));
}

TEST_CASE("exact_boltzmann: one biased spin") {
  IsingModel m(1, SpinDomain::PlusMinusOne, {}, {1.0});
  const auto p = exact_boltzmann(m, 1.0);
  // closed-form two-state partition function: P(+1) = sigma(2)
  CHECK(p[1] == doctest::Approx(0.8807970779778823).epsilon(1e-12));
  CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exact_boltzmann: ferromagnetic pair concentrates at large beta") {
  IsingModel m(2, SpinDomain::PlusMinusOne, {{0, 1, 1.0}}, {0, 0});
  const auto p = exact_boltzmann(m, 20.0);
  CHECK(p[0b00] + p[0b11] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p[0b01] < 1e-15);
  CHECK(p[0b10] < 1e-15);
}

TEST_CASE("exact_boltzmann: normalization and capacity guard") {
  Rng rng = make_rng(17);
  auto model = test::random_model(10, SpinDomain::ZeroOne, rng,
                                  {.edge_probability = 0.3, .bias_min = -1, .bias_max = 1});
  const auto p = exact_boltzmann(model, 1.3);
  CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  auto big = test::random_model(21, SpinDomain::PlusMinusOne, rng,
                                {.edge_probability = 0.05});
  CHECK_THROWS_AS(exact_boltzmann(big, 1.0), CapacityError);
}

TEST_CASE("boltzmann weights are invariant under constant energy shifts") {
  std::vector<double> energies{0.0, 1.5, -2.0, 3.25};
  auto p = boltzmann_from_energies(energies, 0.7);
  for (double& e : energies) e += 1000.0;
  auto q = boltzmann_from_energies(energies, 0.7);
  for (std::size_t k = 0; k < p.size(); ++k)
    CHECK(p[k] == doctest::Approx(q[k]).epsilon(1e-12));
}

TEST_CASE("energy is invariant under consistent relabeling") {
  Rng rng = make_rng(31);
  auto model = test::random_model(7, SpinDomain::PlusMinusOne, rng,
                                  {.edge_probability = 0.5, .bias_min = -1, .bias_max = 1});
  // swap labels 2 <-> 5 everywhere
  auto relabel = [](int i) { return i == 2 ? 5 : (i == 5 ? 2 : i); };
  std::vector<Coupling> couplings;
  for (const auto& c : model.couplings())
    couplings.push_back({relabel(c.i), relabel(c.j), c.value});
  std::vector<double> biases(7);
  for (int i = 0; i < 7; ++i) biases[relabel(i)] = model.biases()[i];
  IsingModel permuted(7, SpinDomain::PlusMinusOne, couplings, biases);
  for (std::uint64_t bits = 0; bits < 128; ++bits) {
    SpinState s = state_from_bits(bits, 7, SpinDomain::PlusMinusOne);
    SpinState sp = s;
    for (int i = 0; i < 7; ++i) sp.values[relabel(i)] = s.values[i];
    CHECK(energy(model, s) == doctest::Approx(energy(permuted, sp)).epsilon(1e-12));
  }
}

TEST_CASE("single-site Gibbs chain reproduces exact marginals") {
  Rng rng = make_rng(2024);
  auto model = test::random_model(8, SpinDomain::PlusMinusOne, rng,
                                  {.edge_probability = 0.4,
                                   .coupling_min = -0.6,
                                   .coupling_max = 0.6,
                                   .bias_min = -0.3,
                                   .bias_max = 0.3});
  const double beta = 1.0;
  const auto p = exact_boltzmann(model, beta);
  std::vector<double> exact_marginal(8, 0.0);
  for (std::uint64_t bits = 0; bits < 256; ++bits)
    for (int i = 0; i < 8; ++i)
      if (bits & (1u << i)) exact_marginal[i] += p[bits];

  SpinState s = random_state(8, SpinDomain::PlusMinusOne, rng);
  std::vector<double> high_counts(8, 0.0);
  const int burn_in = 20000, samples = 300000;
  for (int t = 0; t < burn_in + samples; ++t) {
    const int i = t % 8;
    const double prob = conditional_flip_probability(model, s, i, beta);
    s.values[i] = uniform01(rng) < prob ? 1 : -1;
    if (t >= burn_in)
      for (int k = 0; k < 8; ++k) high_counts[k] += s.values[k] == 1;
  }
  for (int i = 0; i < 8; ++i)
    CHECK(high_counts[i] / samples == doctest::Approx(exact_marginal[i]).epsilon(0.03));
}

TEST_CASE("logistic is stable at extreme arguments") {
  CHECK(logistic(0.0) == doctest::Approx(0.5));
  CHECK(logistic(-800.0) == 0.0);
  CHECK(logistic(800.0) == 1.0);
  CHECK(logistic(2.0) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-15));
}

TEST_CASE("state/bits round trip") {
  Rng rng = make_rng(3);
  for (int k = 0; k < 16; ++k) {
    auto s = random_state(11, SpinDomain::ZeroOne, rng);
    CHECK(state_from_bits(state_to_bits(s), 11, SpinDomain::ZeroOne) == s);
  }
}
