#include "pbit/ising.hpp"

#include <algorithm>
#include <cmath>

#include "pbit/errors.hpp"

namespace pbit {

int spin_high(SpinDomain) { return 1; }

int spin_low(SpinDomain domain) {
  return domain == SpinDomain::PlusMinusOne ? -1 : 0;
}

bool is_legal_spin(SpinDomain domain, int value) {
  return value == spin_high(domain) || value == spin_low(domain);
}

std::string to_string(SpinDomain domain) {
  return domain == SpinDomain::PlusMinusOne ? "pm1" : "01";
}

IsingModel::IsingModel(int n, SpinDomain domain, std::vector<Coupling> couplings,
                       std::vector<double> biases)
    : n_(n), domain_(domain), couplings_(std::move(couplings)), biases_(std::move(biases)) {
  if (n_ < 1) throw ValidationError("IsingModel: spin count must be >= 1");
  if (static_cast<int>(biases_.size()) != n_)
    throw ValidationError("IsingModel: bias vector has " + std::to_string(biases_.size()) +
                          " entries, expected " + std::to_string(n_));
  for (auto& c : couplings_) {
    if (c.i == c.j)
      throw ValidationError("IsingModel: diagonal coupling J_ii must be zero (site " +
                            std::to_string(c.i) + ")");
    if (c.i > c.j) std::swap(c.i, c.j);
    if (c.i < 0 || c.j >= n_)
      throw ValidationError("IsingModel: coupling (" + std::to_string(c.i) + "," +
                            std::to_string(c.j) + ") out of range");
  }
  std::sort(couplings_.begin(), couplings_.end(),
            [](const Coupling& a, const Coupling& b) {
              return a.i != b.i ? a.i < b.i : a.j < b.j;
            });
  for (std::size_t k = 1; k < couplings_.size(); ++k) {
    if (couplings_[k].i == couplings_[k - 1].i && couplings_[k].j == couplings_[k - 1].j)
      throw ValidationError("IsingModel: duplicate coupling (" +
                            std::to_string(couplings_[k].i) + "," +
                            std::to_string(couplings_[k].j) + ")");
  }
  adjacency_.resize(n_);
  for (const auto& c : couplings_) {
    adjacency_[c.i].emplace_back(c.j, c.value);
    adjacency_[c.j].emplace_back(c.i, c.value);
  }
}

const std::vector<std::pair<int, double>>& IsingModel::neighbors(int i) const {
  if (i < 0 || i >= n_)
    throw ValidationError("IsingModel: site index " + std::to_string(i) + " out of range");
  return adjacency_[i];
}

double IsingModel::coupling(int i, int j) const {
  for (const auto& [k, v] : neighbors(i))
    if (k == j) return v;
  return 0.0;
}

int IsingModel::nonzero_couplings() const {
  int count = 0;
  for (const auto& c : couplings_)
    if (c.value != 0.0) ++count;
  return count;
}

SpinState random_state(int n, SpinDomain domain, Rng& rng) {
  SpinState state{std::vector<int>(n), domain};
  for (int i = 0; i < n; ++i)
    state.values[i] = (rng() & 1u) ? spin_high(domain) : spin_low(domain);
  return state;
}

SpinState state_from_bits(std::uint64_t bits, int n, SpinDomain domain) {
  SpinState state{std::vector<int>(n), domain};
  for (int i = 0; i < n; ++i)
    state.values[i] = (bits >> i) & 1u ? spin_high(domain) : spin_low(domain);
  return state;
}

std::uint64_t state_to_bits(const SpinState& state) {
  std::uint64_t bits = 0;
  for (int i = 0; i < state.size(); ++i)
    if (state.values[i] == spin_high(state.domain)) bits |= 1ULL << i;
  return bits;
}

namespace {

void check_compatible(const IsingModel& model, const SpinState& state) {
  if (state.domain != model.domain())
    throw ValidationError("spin state domain does not match the model domain");
  if (state.size() != model.size())
    throw ValidationError("spin state has " + std::to_string(state.size()) +
                          " entries, model expects " + std::to_string(model.size()));
  for (int v : state.values)
    if (!is_legal_spin(state.domain, v))
      throw ValidationError("illegal spin value " + std::to_string(v) + " for domain " +
                            to_string(state.domain));
}

}  // namespace

double energy(const IsingModel& model, const SpinState& state) {
  check_compatible(model, state);
  double h = 0.0;
  for (const auto& c : model.couplings())
    h -= c.value * state.values[c.i] * state.values[c.j];
  const auto& biases = model.biases();
  for (int i = 0; i < model.size(); ++i)
    h -= biases[i] * state.values[i];
  return h;
}

double local_field(const IsingModel& model, const SpinState& state, int i) {
  check_compatible(model, state);
  if (i < 0 || i >= model.size())
    throw ValidationError("local_field: site index " + std::to_string(i) + " out of range");
  double f = model.biases()[i];
  for (const auto& [j, value] : model.neighbors(i))
    f += value * state.values[j];
  return f;
}

double conditional_flip_probability(const IsingModel& model, const SpinState& state,
                                    int i, double beta) {
  if (beta < 0.0) throw ValidationError("conditional_flip_probability: beta must be >= 0");
  const double factor = model.domain() == SpinDomain::PlusMinusOne ? 2.0 : 1.0;
  return logistic(factor * beta * local_field(model, state, i));
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<double> boltzmann_from_energies(const std::vector<double>& energies,
                                            double beta) {
  if (beta < 0.0) throw ValidationError("boltzmann_from_energies: beta must be >= 0");
  if (energies.empty()) throw ValidationError("boltzmann_from_energies: empty energy table");
  const double e_min = *std::min_element(energies.begin(), energies.end());
  std::vector<double> p(energies.size());
  double z = 0.0;
  for (std::size_t k = 0; k < energies.size(); ++k) {
    p[k] = std::exp(-beta * (energies[k] - e_min));
    z += p[k];
  }
  for (double& v : p) v /= z;
  return p;
}

std::vector<double> exact_boltzmann(const IsingModel& model, double beta) {
  const int n = model.size();
  if (n > kMaxExactBoltzmannSpins)
    throw CapacityError("exact_boltzmann: " + std::to_string(n) + " spins exceed the 2^" +
                        std::to_string(kMaxExactBoltzmannSpins) + " enumeration cap");
  const std::uint64_t total = 1ULL << n;
  std::vector<double> energies(total);
  SpinState state{std::vector<int>(n), model.domain()};
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    for (int i = 0; i < n; ++i)
      state.values[i] = (bits >> i) & 1u ? spin_high(model.domain()) : spin_low(model.domain());
    energies[bits] = energy(model, state);
  }
  return boltzmann_from_energies(energies, beta);
}

}  // namespace pbit
