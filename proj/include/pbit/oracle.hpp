#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pbit/ising.hpp"
#include "pbit/mapping.hpp"

namespace pbit {

inline constexpr int kMaxExhaustiveSpins = 28;
inline constexpr double kGroundStateTolerance = 1e-9;

struct OracleResult {
  double min_energy = 0.0;
  std::vector<SpinState> ground_states;  // all minimizers, possibly truncated
  std::uint64_t ground_state_count = 0;  // full count within tolerance
  std::uint64_t states_scanned = 0;
  bool truncated = false;
};

/// Scans all 2^n states in Gray-code order with incremental single-flip
/// energy updates; returns the global minimum and every state attaining it
/// within kGroundStateTolerance (recomputed from scratch before returning).
OracleResult exhaustive_ground_state(const IsingModel& model,
                                     int max_spins = kMaxExhaustiveSpins,
                                     std::size_t max_stored_states = std::size_t{1} << 20);

struct MaxcutBruteResult {
  double max_cut_weight = 0.0;
  std::vector<int> side;
};

/// Direct enumeration over partitions counting cut edges; independent of any
/// Hamiltonian encoding.
MaxcutBruteResult maxcut_brute(const WeightedGraph& graph);

struct ColoringWitness {
  bool colorable = false;
  std::vector<int> colors;  // proper coloring when colorable
};

/// Backtracking search for a proper coloring with at most `colors` colors.
ColoringWitness coloring_exists(const WeightedGraph& graph, int colors);

/// Certified minimum energy of map_coloring(graph, colors, A). The per-vertex
/// penalty block is minimized exactly by one-hot rows (value -A) and the edge
/// terms vanish only on proper colorings, so a colorable graph has minimum
/// -A * n_vertices. Returns nullopt when no proper coloring exists.
std::optional<double> coloring_optimum_energy(const WeightedGraph& graph, int colors,
                                              double A);

}  // namespace pbit
