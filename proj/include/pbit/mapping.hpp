#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pbit/ising.hpp"

namespace pbit {

struct GraphEdge {
  int u = 0;
  int v = 0;
  double weight = 1.0;
};

/// Undirected simple graph with strictly positive edge weights.
struct WeightedGraph {
  int n_vertices = 0;
  std::vector<GraphEdge> edges;

  void validate() const;
  double total_weight() const;
};

/// Plain-text graph format: first line "n m", then m lines "u v w"
/// (0-based vertex ids, real weight).
WeightedGraph load_graph(const std::filesystem::path& path);
void save_graph(const WeightedGraph& graph, const std::filesystem::path& path);

/// Weighted MAX-CUT as a {-1,+1} model: J_uv = -A W_uv on edges, h = 0.
IsingModel map_maxcut(const WeightedGraph& graph, double A);

/// One-hot graph coloring as a {0,1} model over n*C spins: J = -2A between
/// distinct colors of one vertex and between equal colors of adjacent
/// vertices, h_i = A everywhere (squared one-hot penalty, constant dropped).
IsingModel map_coloring(const WeightedGraph& graph, int colors, double A);

/// Spin index of (vertex, color) in the coloring model.
inline int coloring_spin_index(int vertex, int color, int colors) {
  return vertex * colors + color;
}

enum class QuantizeMode { Exact, SnapToNearest };

struct CrossbarLowering {
  std::vector<std::vector<double>> conductance_targets_uS;  // rows x cols
  std::vector<int> column_polarity;                         // +1 / -1 per column
  double G_scale_uS = 0.0;                                  // uS per unit |J|
  std::optional<int> bias_column;
  double zero_coupling_fraction = 0.0;  // zero unordered spin pairs / all pairs
};

/// Lower |J| and |h| to per-cell conductance targets. Every column of (J | h)
/// must be sign-uniform because the hardware encodes coefficient signs in the
/// per-column drive polarity; mixed-sign models are rejected (differential
/// two-cell encoding is out of scope). With a non-empty level list, magnitudes
/// must land on allowed levels (QuantizeMode::Exact) or are snapped to the
/// nearest one; an empty list keeps exact continuous targets.
CrossbarLowering to_crossbar(const IsingModel& model, std::span<const double> levels_uS,
                             double G_scale_uS, QuantizeMode mode = QuantizeMode::Exact);

struct CutResult {
  std::vector<int> side;  // 0 for +1 spins, 1 for -1 spins
  double cut_weight = 0.0;
};
CutResult decode_cut(const WeightedGraph& graph, const SpinState& state);

/// Cut weight implied by a map_maxcut energy: (sum_W - H/A) / 2.
double cut_weight_from_energy(const WeightedGraph& graph, double energy, double A);

struct ColoringResult {
  std::vector<int> color_of;  // -1 where the vertex is not one-hot
  std::vector<int> one_hot_violations;
  std::vector<std::pair<int, int>> adjacency_violations;

  bool valid() const { return one_hot_violations.empty() && adjacency_violations.empty(); }
};
ColoringResult decode_coloring(const WeightedGraph& graph, int colors, const SpinState& state);

/// Greedy coloring of the nonzero-J conflict graph; the returned classes
/// partition the spin indices and contain no coupled pair.
std::vector<std::vector<int>> conflict_coloring(const IsingModel& model);

/// Throws unless the classes partition [0, n) with no coupled pair inside any class.
void validate_color_classes(const IsingModel& model,
                            const std::vector<std::vector<int>>& classes);

/// Connected random graph with integer weights in {1..weight_levels}.
WeightedGraph random_maxcut_instance(int n_vertices, int n_edges, int weight_levels, Rng& rng);

/// Connected random unit-weight graph that is C-colorable by construction.
WeightedGraph random_colorable_instance(int n_vertices, int n_edges, int colors, Rng& rng);

/// Dense conductance map, 6-significant-digit scientific notation.
void save_conductance_csv(const std::vector<std::vector<double>>& matrix_uS,
                          const std::filesystem::path& path);
std::vector<std::vector<double>> load_conductance_csv(const std::filesystem::path& path);

}  // namespace pbit
