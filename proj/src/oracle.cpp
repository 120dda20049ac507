#include "pbit/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "pbit/errors.hpp"

namespace pbit {

OracleResult exhaustive_ground_state(const IsingModel& model, int max_spins,
                                     std::size_t max_stored_states) {
  const int n = model.size();
  max_spins = std::min(max_spins, 62);
  if (n > max_spins)
    throw CapacityError("exhaustive_ground_state: " + std::to_string(n) +
                        " spins exceed the 2^" + std::to_string(max_spins) +
                        " enumeration cap");

  const int high = spin_high(model.domain());
  const int low = spin_low(model.domain());
  SpinState state{std::vector<int>(n, low), model.domain()};
  double e = energy(model, state);
  const double tol = kGroundStateTolerance;

  double best = e;
  std::vector<std::uint64_t> best_bits{0};
  std::uint64_t best_count = 1;
  bool truncated = false;

  const std::uint64_t total = std::uint64_t{1} << n;
  std::uint64_t bits = 0;
  for (std::uint64_t k = 1; k < total; ++k) {
    const int site = std::countr_zero(k);
    const int old_value = state.values[site];
    const int new_value = old_value == high ? low : high;
    double f = model.biases()[site];
    for (const auto& [j, value] : model.neighbors(site)) f += value * state.values[j];
    e += (old_value - new_value) * f;
    state.values[site] = new_value;
    bits ^= std::uint64_t{1} << site;

    if (e < best - tol) {
      best = e;
      best_bits.assign(1, bits);
      best_count = 1;
      truncated = false;
    } else if (e <= best + tol) {
      if (e < best) best = e;
      ++best_count;
      if (best_bits.size() < max_stored_states)
        best_bits.push_back(bits);
      else
        truncated = true;
    }
  }

  // Recompute stored minimizers from scratch; incremental float drift over up
  // to 2^28 updates must not leak into the reported set.
  OracleResult result;
  result.states_scanned = total;
  result.ground_state_count = best_count;
  result.truncated = truncated;
  double exact_best = best;
  std::vector<std::pair<std::uint64_t, double>> checked;
  checked.reserve(best_bits.size());
  for (std::uint64_t b : best_bits) {
    const SpinState s = state_from_bits(b, n, model.domain());
    const double exact = energy(model, s);
    exact_best = std::min(exact_best, exact);
    checked.emplace_back(b, exact);
  }
  result.min_energy = exact_best;
  for (const auto& [b, exact] : checked)
    if (exact <= exact_best + tol)
      result.ground_states.push_back(state_from_bits(b, n, model.domain()));
  return result;
}

MaxcutBruteResult maxcut_brute(const WeightedGraph& graph) {
  graph.validate();
  const int n = graph.n_vertices;
  if (n > kMaxExhaustiveSpins)
    throw CapacityError("maxcut_brute: " + std::to_string(n) + " vertices exceed the 2^" +
                        std::to_string(kMaxExhaustiveSpins) + " enumeration cap");

  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const auto& e : graph.edges) {
    adj[e.u].emplace_back(e.v, e.weight);
    adj[e.v].emplace_back(e.u, e.weight);
  }

  // Vertex 0 stays on side 0; enumerate the rest in Gray-code order with
  // incremental cut updates.
  std::vector<int> side(n, 0);
  double cut = 0.0;
  MaxcutBruteResult result;
  result.max_cut_weight = 0.0;
  result.side = side;
  if (n == 1) return result;

  const std::uint64_t total = std::uint64_t{1} << (n - 1);
  for (std::uint64_t k = 1; k < total; ++k) {
    const int v = std::countr_zero(k) + 1;
    for (const auto& [u, w] : adj[v]) cut += side[u] == side[v] ? w : -w;
    side[v] ^= 1;
    if (cut > result.max_cut_weight) {
      result.max_cut_weight = cut;
      result.side = side;
    }
  }
  return result;
}

namespace {

bool color_backtrack(const std::vector<std::vector<int>>& adj, const std::vector<int>& order,
                     std::vector<int>& colors, int colors_allowed, std::size_t pos) {
  if (pos == order.size()) return true;
  const int v = order[pos];
  for (int c = 0; c < colors_allowed; ++c) {
    bool clash = false;
    for (int u : adj[v])
      if (colors[u] == c) {
        clash = true;
        break;
      }
    if (clash) continue;
    colors[v] = c;
    if (color_backtrack(adj, order, colors, colors_allowed, pos + 1)) return true;
    colors[v] = -1;
  }
  return false;
}

}  // namespace

ColoringWitness coloring_exists(const WeightedGraph& graph, int colors) {
  graph.validate();
  if (graph.n_vertices > kMaxExhaustiveSpins)
    throw CapacityError("coloring_exists: vertex count exceeds the search cap");
  if (colors < 1 || colors > 4)
    throw CapacityError("coloring_exists: supports 1..4 colors");

  std::vector<std::vector<int>> adj(graph.n_vertices);
  for (const auto& e : graph.edges) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  std::vector<int> order(graph.n_vertices);
  for (int v = 0; v < graph.n_vertices; ++v) order[v] = v;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return adj[a].size() > adj[b].size(); });

  ColoringWitness w;
  w.colors.assign(graph.n_vertices, -1);
  w.colorable = color_backtrack(adj, order, w.colors, colors, 0);
  if (!w.colorable) w.colors.clear();
  return w;
}

std::optional<double> coloring_optimum_energy(const WeightedGraph& graph, int colors,
                                              double A) {
  if (A <= 0.0) throw ValidationError("coloring_optimum_energy: A must be > 0");
  const ColoringWitness w = coloring_exists(graph, colors);
  if (!w.colorable) return std::nullopt;
  return -A * graph.n_vertices;
}

}  // namespace pbit
