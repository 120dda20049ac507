#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pbit/rng.hpp"

namespace pbit {

/// Value convention for binary spins: {-1,+1} or {0,1}.
enum class SpinDomain { PlusMinusOne, ZeroOne };

int spin_high(SpinDomain domain);
int spin_low(SpinDomain domain);
bool is_legal_spin(SpinDomain domain, int value);
std::string to_string(SpinDomain domain);

/// One symmetric coupling J_ij, stored once with i < j.
struct Coupling {
  int i = 0;
  int j = 0;
  double value = 0.0;
};

/// Sparse symmetric spin model with energy
///   H = -sum_{i<j} J_ij s_i s_j - sum_i h_i s_i.
/// Couplings are an upper-triangle coordinate list plus a per-site adjacency
/// table for O(degree) local-field queries. Zero diagonal and symmetry hold
/// by construction.
class IsingModel {
 public:
  IsingModel(int n, SpinDomain domain, std::vector<Coupling> couplings,
             std::vector<double> biases);

  int size() const { return n_; }
  SpinDomain domain() const { return domain_; }
  const std::vector<Coupling>& couplings() const { return couplings_; }
  const std::vector<double>& biases() const { return biases_; }
  const std::vector<std::pair<int, double>>& neighbors(int i) const;

  /// J_ij, 0 when the pair is not coupled.
  double coupling(int i, int j) const;

  /// Number of stored couplings with a nonzero value.
  int nonzero_couplings() const;

 private:
  int n_;
  SpinDomain domain_;
  std::vector<Coupling> couplings_;
  std::vector<double> biases_;
  std::vector<std::vector<std::pair<int, double>>> adjacency_;
};

/// A concrete assignment of all spins.
struct SpinState {
  std::vector<int> values;
  SpinDomain domain = SpinDomain::PlusMinusOne;

  int size() const { return static_cast<int>(values.size()); }
  bool operator==(const SpinState&) const = default;
};

SpinState random_state(int n, SpinDomain domain, Rng& rng);

/// Bit i of `bits` set means s_i = spin_high. This indexing convention is
/// shared by exact_boltzmann tables and the exhaustive enumerators.
SpinState state_from_bits(std::uint64_t bits, int n, SpinDomain domain);
std::uint64_t state_to_bits(const SpinState& state);

double energy(const IsingModel& model, const SpinState& state);

/// Local effective field f_i = sum_j J_ij s_j + h_i.
double local_field(const IsingModel& model, const SpinState& state, int i);

/// Probability that a single-site Gibbs update sets spin i to its high value,
/// conditioned on all other spins: sigma(2 beta f_i) in the {-1,+1} domain and
/// sigma(beta f_i) in {0,1}. The domain factor is the single-flip energy
/// difference: flipping spin i changes H by (s_old - s_new) * f_i.
double conditional_flip_probability(const IsingModel& model, const SpinState& state,
                                    int i, double beta);

/// Numerically stable logistic function 1 / (1 + exp(-x)).
double logistic(double x);

inline constexpr int kMaxExactBoltzmannSpins = 20;

/// Normalized Boltzmann weights exp(-beta * E_k) for a table of energies.
/// Stable under a constant shift of all energies.
std::vector<double> boltzmann_from_energies(const std::vector<double>& energies,
                                            double beta);

/// Exact distribution over all 2^n states, indexed by state bits.
/// Refuses n > kMaxExactBoltzmannSpins.
std::vector<double> exact_boltzmann(const IsingModel& model, double beta);

}  // namespace pbit
