#include "pbit/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "pbit/errors.hpp"

namespace pbit {

void WeightedGraph::validate() const {
  if (n_vertices < 1) throw ValidationError("graph: vertex count must be >= 1");
  std::set<std::pair<int, int>> seen;
  for (const auto& e : edges) {
    if (e.u < 0 || e.u >= n_vertices || e.v < 0 || e.v >= n_vertices)
      throw ValidationError("graph: edge (" + std::to_string(e.u) + "," +
                            std::to_string(e.v) + ") out of range");
    if (e.u == e.v)
      throw ValidationError("graph: self-loop at vertex " + std::to_string(e.u));
    if (e.weight <= 0.0)
      throw ValidationError("graph: edge (" + std::to_string(e.u) + "," +
                            std::to_string(e.v) + ") has nonpositive weight");
    auto key = std::minmax(e.u, e.v);
    if (!seen.insert({key.first, key.second}).second)
      throw ValidationError("graph: duplicate edge (" + std::to_string(e.u) + "," +
                            std::to_string(e.v) + ")");
  }
}

double WeightedGraph::total_weight() const {
  double w = 0.0;
  for (const auto& e : edges) w += e.weight;
  return w;
}

WeightedGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open graph file: " + path.string());
  WeightedGraph g;
  int m = 0;
  if (!(in >> g.n_vertices >> m))
    throw ValidationError("graph file " + path.string() + ": bad header, expected \"n m\"");
  g.edges.reserve(m);
  for (int k = 0; k < m; ++k) {
    GraphEdge e;
    if (!(in >> e.u >> e.v >> e.weight))
      throw ValidationError("graph file " + path.string() + ": bad edge line " +
                            std::to_string(k + 1));
    g.edges.push_back(e);
  }
  g.validate();
  return g;
}

void save_graph(const WeightedGraph& graph, const std::filesystem::path& path) {
  graph.validate();
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write graph file: " + path.string());
  out << graph.n_vertices << ' ' << graph.edges.size() << '\n';
  char buf[64];
  for (const auto& e : graph.edges) {
    std::snprintf(buf, sizeof buf, "%.17g", e.weight);
    out << e.u << ' ' << e.v << ' ' << buf << '\n';
  }
}

IsingModel map_maxcut(const WeightedGraph& graph, double A) {
  graph.validate();
  if (A <= 0.0) throw ValidationError("map_maxcut: scale factor A must be > 0");
  if (graph.edges.empty()) throw ValidationError("map_maxcut: graph has no edges");
  std::vector<Coupling> couplings;
  couplings.reserve(graph.edges.size());
  for (const auto& e : graph.edges)
    couplings.push_back({e.u, e.v, -A * e.weight});
  return IsingModel(graph.n_vertices, SpinDomain::PlusMinusOne, std::move(couplings),
                    std::vector<double>(graph.n_vertices, 0.0));
}

IsingModel map_coloring(const WeightedGraph& graph, int colors, double A) {
  graph.validate();
  if (colors < 2) throw ValidationError("map_coloring: need at least 2 colors");
  if (A <= 0.0) throw ValidationError("map_coloring: scale factor A must be > 0");
  const int n_spins = graph.n_vertices * colors;
  std::vector<Coupling> couplings;
  for (int v = 0; v < graph.n_vertices; ++v)
    for (int k = 0; k < colors; ++k)
      for (int c = k + 1; c < colors; ++c)
        couplings.push_back({coloring_spin_index(v, k, colors),
                             coloring_spin_index(v, c, colors), -2.0 * A});
  for (const auto& e : graph.edges)
    for (int k = 0; k < colors; ++k)
      couplings.push_back({coloring_spin_index(e.u, k, colors),
                           coloring_spin_index(e.v, k, colors), -2.0 * A});
  return IsingModel(n_spins, SpinDomain::ZeroOne, std::move(couplings),
                    std::vector<double>(n_spins, A));
}

namespace {

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

double quantize_level(double value_uS, std::span<const double> levels, QuantizeMode mode,
                      bool& ok) {
  ok = true;
  if (value_uS == 0.0) return 0.0;
  if (levels.empty()) return value_uS;  // continuous targets
  double best = levels[0];
  for (double l : levels)
    if (std::abs(l - value_uS) < std::abs(best - value_uS)) best = l;
  if (mode == QuantizeMode::Exact &&
      std::abs(best - value_uS) > 1e-6 * std::max(1.0, std::abs(best)))
    ok = false;
  return best;
}

}  // namespace

CrossbarLowering to_crossbar(const IsingModel& model, std::span<const double> levels_uS,
                             double G_scale_uS, QuantizeMode mode) {
  if (G_scale_uS <= 0.0) throw ValidationError("to_crossbar: G_scale must be > 0");
  for (double l : levels_uS)
    if (l <= 0.0) throw ValidationError("to_crossbar: conductance levels must be > 0");

  const int n = model.size();
  // Per-column sign uniformity: the drive polarity carries the coefficient
  // sign, so a column mixing signs cannot be encoded.
  std::vector<int> polarity;
  for (int j = 0; j < n; ++j) {
    int sign = 0;
    for (const auto& [i, value] : model.neighbors(j)) {
      (void)i;
      if (value == 0.0) continue;
      const int s = sign_of(value);
      if (sign == 0) sign = s;
      if (sign != s)
        throw ValidationError(
            "to_crossbar: column " + std::to_string(j) +
            " mixes coupling signs; single-polarity column drive needs sign-uniform "
            "columns (differential encoding is not supported)");
    }
    polarity.push_back(sign == 0 ? 1 : sign);
  }

  int bias_sign = 0;
  for (double h : model.biases()) {
    if (h == 0.0) continue;
    const int s = sign_of(h);
    if (bias_sign == 0) bias_sign = s;
    if (bias_sign != s)
      throw ValidationError("to_crossbar: bias vector mixes signs; the bias column is "
                            "driven with a single polarity");
  }
  const bool has_bias = bias_sign != 0;

  CrossbarLowering low;
  low.G_scale_uS = G_scale_uS;
  low.column_polarity = polarity;
  if (has_bias) {
    low.column_polarity.push_back(bias_sign);
    low.bias_column = n;
  }

  const int cols = n + (has_bias ? 1 : 0);
  low.conductance_targets_uS.assign(n, std::vector<double>(cols, 0.0));
  std::vector<std::string> offenders;
  auto place = [&](int r, int c, double magnitude) {
    bool ok = true;
    const double g = quantize_level(magnitude * G_scale_uS, levels_uS, mode, ok);
    if (!ok) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "(%d,%d)=%.6g uS", r, c, magnitude * G_scale_uS);
      offenders.emplace_back(buf);
    }
    low.conductance_targets_uS[r][c] = g;
  };
  for (const auto& c : model.couplings()) {
    if (c.value == 0.0) continue;
    place(c.i, c.j, std::abs(c.value));
    place(c.j, c.i, std::abs(c.value));
  }
  if (has_bias)
    for (int i = 0; i < n; ++i)
      if (model.biases()[i] != 0.0) place(i, n, std::abs(model.biases()[i]));
  if (!offenders.empty()) {
    std::string msg = "to_crossbar: magnitudes not on an allowed conductance level:";
    for (const auto& s : offenders) msg += " " + s;
    throw ValidationError(msg);
  }

  if (n >= 2) {
    const double pairs = 0.5 * n * (n - 1);
    low.zero_coupling_fraction = 1.0 - model.nonzero_couplings() / pairs;
  }
  return low;
}

CutResult decode_cut(const WeightedGraph& graph, const SpinState& state) {
  if (state.domain != SpinDomain::PlusMinusOne)
    throw ValidationError("decode_cut: expected a {-1,+1} state");
  if (state.size() != graph.n_vertices)
    throw ValidationError("decode_cut: state length does not match the vertex count");
  CutResult r;
  r.side.resize(graph.n_vertices);
  for (int v = 0; v < graph.n_vertices; ++v) r.side[v] = state.values[v] == 1 ? 0 : 1;
  for (const auto& e : graph.edges)
    if (r.side[e.u] != r.side[e.v]) r.cut_weight += e.weight;
  return r;
}

double cut_weight_from_energy(const WeightedGraph& graph, double energy, double A) {
  if (A <= 0.0) throw ValidationError("cut_weight_from_energy: A must be > 0");
  return 0.5 * (graph.total_weight() - energy / A);
}

ColoringResult decode_coloring(const WeightedGraph& graph, int colors, const SpinState& state) {
  if (state.domain != SpinDomain::ZeroOne)
    throw ValidationError("decode_coloring: expected a {0,1} state");
  if (state.size() != graph.n_vertices * colors)
    throw ValidationError("decode_coloring: state length must be n_vertices * colors");
  ColoringResult r;
  r.color_of.assign(graph.n_vertices, -1);
  for (int v = 0; v < graph.n_vertices; ++v) {
    int active = 0, color = -1;
    for (int k = 0; k < colors; ++k)
      if (state.values[coloring_spin_index(v, k, colors)] == 1) {
        ++active;
        color = k;
      }
    if (active == 1)
      r.color_of[v] = color;
    else
      r.one_hot_violations.push_back(v);
  }
  for (const auto& e : graph.edges)
    for (int k = 0; k < colors; ++k)
      if (state.values[coloring_spin_index(e.u, k, colors)] == 1 &&
          state.values[coloring_spin_index(e.v, k, colors)] == 1) {
        r.adjacency_violations.emplace_back(e.u, e.v);
        break;
      }
  return r;
}

std::vector<std::vector<int>> conflict_coloring(const IsingModel& model) {
  const int n = model.size();
  std::vector<int> color(n, -1);
  int n_classes = 0;
  for (int i = 0; i < n; ++i) {
    std::set<int> used;
    for (const auto& [j, value] : model.neighbors(i))
      if (value != 0.0 && color[j] >= 0) used.insert(color[j]);
    int c = 0;
    while (used.count(c)) ++c;
    color[i] = c;
    n_classes = std::max(n_classes, c + 1);
  }
  std::vector<std::vector<int>> classes(n_classes);
  for (int i = 0; i < n; ++i) classes[color[i]].push_back(i);
  return classes;
}

void validate_color_classes(const IsingModel& model,
                            const std::vector<std::vector<int>>& classes) {
  const int n = model.size();
  std::vector<int> owner(n, -1);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (int i : classes[c]) {
      if (i < 0 || i >= n)
        throw ValidationError("color classes: index " + std::to_string(i) + " out of range");
      if (owner[i] != -1)
        throw ValidationError("color classes: index " + std::to_string(i) +
                              " appears more than once");
      owner[i] = static_cast<int>(c);
    }
  }
  for (int i = 0; i < n; ++i)
    if (owner[i] == -1)
      throw ValidationError("color classes: index " + std::to_string(i) + " is missing");
  for (int i = 0; i < n; ++i)
    for (const auto& [j, value] : model.neighbors(i))
      if (value != 0.0 && owner[i] == owner[j])
        throw ValidationError("color classes: coupled spins " + std::to_string(i) + " and " +
                              std::to_string(j) + " share class " + std::to_string(owner[i]));
}

namespace {

bool has_edge(const std::set<std::pair<int, int>>& seen, int u, int v) {
  auto key = std::minmax(u, v);
  return seen.count({key.first, key.second}) > 0;
}

void add_edge(WeightedGraph& g, std::set<std::pair<int, int>>& seen, int u, int v, double w) {
  auto key = std::minmax(u, v);
  seen.insert({key.first, key.second});
  g.edges.push_back({key.first, key.second, w});
}

}  // namespace

WeightedGraph random_maxcut_instance(int n_vertices, int n_edges, int weight_levels, Rng& rng) {
  if (n_vertices < 2 || weight_levels < 1)
    throw ValidationError("random_maxcut_instance: bad parameters");
  const int max_edges = n_vertices * (n_vertices - 1) / 2;
  if (n_edges < n_vertices - 1 || n_edges > max_edges)
    throw ValidationError("random_maxcut_instance: edge count out of range");
  WeightedGraph g;
  g.n_vertices = n_vertices;
  std::set<std::pair<int, int>> seen;
  auto weight = [&] {
    return 1.0 + static_cast<double>(std::uniform_int_distribution<int>(0, weight_levels - 1)(rng));
  };
  // random spanning tree first, then extra edges
  for (int v = 1; v < n_vertices; ++v) {
    int u = std::uniform_int_distribution<int>(0, v - 1)(rng);
    add_edge(g, seen, u, v, weight());
  }
  while (static_cast<int>(g.edges.size()) < n_edges) {
    int u = std::uniform_int_distribution<int>(0, n_vertices - 1)(rng);
    int v = std::uniform_int_distribution<int>(0, n_vertices - 1)(rng);
    if (u == v || has_edge(seen, u, v)) continue;
    add_edge(g, seen, u, v, weight());
  }
  std::sort(g.edges.begin(), g.edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  g.validate();
  return g;
}

WeightedGraph random_colorable_instance(int n_vertices, int n_edges, int colors, Rng& rng) {
  if (n_vertices < 2 || colors < 2)
    throw ValidationError("random_colorable_instance: bad parameters");
  // hidden color classes; edges only cross classes, so the result is C-colorable
  std::vector<int> klass(n_vertices);
  for (int v = 0; v < n_vertices; ++v) klass[v] = v % colors;
  std::shuffle(klass.begin(), klass.end(), rng);

  WeightedGraph g;
  g.n_vertices = n_vertices;
  std::set<std::pair<int, int>> seen;
  for (int v = 1; v < n_vertices; ++v) {
    std::vector<int> candidates;
    for (int u = 0; u < v; ++u)
      if (klass[u] != klass[v]) candidates.push_back(u);
    if (candidates.empty()) {  // every earlier vertex shares v's class; move v
      klass[v] = (klass[v] + 1) % colors;
      for (int u = 0; u < v; ++u)
        if (klass[u] != klass[v]) candidates.push_back(u);
    }
    const int u =
        candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
    add_edge(g, seen, u, v, 1.0);
  }
  int attempts = 0;
  while (static_cast<int>(g.edges.size()) < n_edges && attempts < 100000) {
    ++attempts;
    int u = std::uniform_int_distribution<int>(0, n_vertices - 1)(rng);
    int v = std::uniform_int_distribution<int>(0, n_vertices - 1)(rng);
    if (u == v || klass[u] == klass[v] || has_edge(seen, u, v)) continue;
    add_edge(g, seen, u, v, 1.0);
  }
  if (static_cast<int>(g.edges.size()) < n_edges)
    throw ValidationError("random_colorable_instance: cannot place that many cross-class edges");
  std::sort(g.edges.begin(), g.edges.end(), [](const GraphEdge& a, const GraphEdge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  g.validate();
  return g;
}

void save_conductance_csv(const std::vector<std::vector<double>>& matrix_uS,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write conductance CSV: " + path.string());
  char buf[32];
  for (const auto& row : matrix_uS) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.5e", row[j]);
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
}

std::vector<std::vector<double>> load_conductance_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open conductance CSV: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ValidationError("conductance CSV " + path.string() + ": ragged rows");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace pbit
