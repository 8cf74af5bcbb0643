#include "dra/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "dra/rng.hpp"

namespace dra {

Graph Graph::from_edges(int n, std::vector<std::pair<int, int>> edges) {
  if (n < 1) throw std::invalid_argument("Graph: need at least one vertex");
  for (auto& e : edges) {
    if (e.first == e.second) throw std::invalid_argument("Graph: self-loop");
    if (e.first < 0 || e.second < 0 || e.first >= n || e.second >= n)
      throw std::invalid_argument("Graph: edge index out of range");
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  Graph g;
  g.n = n;
  g.edges = std::move(edges);
  return g;
}

std::vector<int> Graph::degrees() const {
  std::vector<int> deg(n, 0);
  for (const auto& [i, j] : edges) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

namespace {

std::vector<std::vector<int>> adjacency(const Graph& g) {
  std::vector<std::vector<int>> adj(g.n);
  for (const auto& [i, j] : g.edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  return adj;
}

// Component label per vertex, labels 0..k-1 in discovery order.
std::vector<int> components(const Graph& g) {
  auto adj = adjacency(g);
  std::vector<int> comp(g.n, -1);
  int label = 0;
  for (int s = 0; s < g.n; ++s) {
    if (comp[s] >= 0) continue;
    std::queue<int> q;
    q.push(s);
    comp[s] = label;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int v : adj[u]) {
        if (comp[v] < 0) {
          comp[v] = label;
          q.push(v);
        }
      }
    }
    ++label;
  }
  return comp;
}

Graph sample_gnp(int n, double p, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.next_double() < p) edges.emplace_back(i, j);
  return Graph::from_edges(n, std::move(edges));
}

}  // namespace

bool is_connected(const Graph& g) {
  if (g.n < 1) throw std::invalid_argument("is_connected: empty graph");
  const auto comp = components(g);
  return *std::max_element(comp.begin(), comp.end()) == 0;
}

Mat laplacian(const Graph& g) {
  Mat l(g.n, g.n);
  const auto deg = g.degrees();
  for (int i = 0; i < g.n; ++i) l(i, i) = static_cast<double>(deg[i]);
  for (const auto& [i, j] : g.edges) {
    l(i, j) = -1.0;
    l(j, i) = -1.0;
  }
  return l;
}

void apply_laplacian(const Graph& g, std::span<const double> x, int m, std::span<double> y) {
  if (x.size() != static_cast<size_t>(g.n) * m || y.size() != x.size())
    throw std::invalid_argument("apply_laplacian: size mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  // Fixed edge order keeps reductions bitwise reproducible.
  for (const auto& [i, j] : g.edges) {
    for (int k = 0; k < m; ++k) {
      const double diff = x[static_cast<size_t>(i) * m + k] - x[static_cast<size_t>(j) * m + k];
      y[static_cast<size_t>(i) * m + k] += diff;
      y[static_cast<size_t>(j) * m + k] -= diff;
    }
  }
}

namespace {

SpectralExtremes extremes_power_iteration(const Graph& g) {
  const int n = g.n;
  Vec v(n), w(n);
  SplitMix64 rng(0x5EEDBA5Eu);
  auto remove_mean = [&](Vec& u) {
    const double mean = std::accumulate(u.begin(), u.end(), 0.0) / n;
    for (double& e : u) e -= mean;
  };
  auto normalize = [&](Vec& u) {
    const double nrm = norm2(u);
    if (nrm == 0.0) throw std::runtime_error("eigen_extremes: degenerate iterate");
    for (double& e : u) e /= nrm;
  };

  // lambda_max by power iteration on L (all eigenvalues are >= 0).
  for (double& e : v) e = rng.uniform(-1.0, 1.0);
  remove_mean(v);
  normalize(v);
  double lmax = 0.0;
  for (int it = 0; it < 20000; ++it) {
    apply_laplacian(g, v, 1, w);
    const double rq = dot(v, w);
    std::swap(v, w);
    remove_mean(v);
    normalize(v);
    if (it > 4 && std::abs(rq - lmax) <= 1e-8 * std::max(1.0, std::abs(rq))) {
      lmax = rq;
      break;
    }
    lmax = rq;
  }

  // lambda2 from the shifted operator lmax*I - L restricted to 1-perp, whose
  // top eigenvalue is lmax - lambda2.
  const double shift = lmax * (1.0 + 1e-6) + 1e-12;
  for (double& e : v) e = rng.uniform(-1.0, 1.0);
  remove_mean(v);
  normalize(v);
  double top = 0.0;
  for (int it = 0; it < 200000; ++it) {
    apply_laplacian(g, v, 1, w);
    for (int i = 0; i < n; ++i) w[i] = shift * v[i] - w[i];
    const double rq = dot(v, w);
    std::swap(v, w);
    remove_mean(v);
    normalize(v);
    if (it > 4 && std::abs(rq - top) <= 1e-10 * std::max(1.0, std::abs(rq))) {
      top = rq;
      break;
    }
    top = rq;
  }
  const double l2 = shift - top;
  if (l2 <= 1e-8 * std::max(1.0, lmax))
    throw std::invalid_argument("eigen_extremes: graph is disconnected (repeated zero eigenvalue)");
  return {l2, lmax};
}

}  // namespace

SpectralExtremes eigen_extremes(const Mat& laplacian) {
  Vec eig = symmetric_eigenvalues(laplacian);
  if (eig.size() < 2) throw std::invalid_argument("eigen_extremes: need at least two vertices");
  const double lmax = eig.back();
  const double zero_tol = 1e-9 * std::max(1.0, lmax);
  if (eig[1] <= zero_tol)
    throw std::invalid_argument("eigen_extremes: graph is disconnected (repeated zero eigenvalue)");
  return {eig[1], lmax};
}

SpectralExtremes eigen_extremes(const Graph& g) {
  if (g.n > 400) return extremes_power_iteration(g);
  return eigen_extremes(laplacian(g));
}

Graph ring_with_chords(int n, const std::vector<std::pair<int, int>>& chords) {
  if (n < 3) throw std::invalid_argument("ring_with_chords: need n >= 3");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(n + chords.size());
  for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  for (const auto& c : chords) edges.push_back(c);
  return Graph::from_edges(n, std::move(edges));  // validates chord indices
}

Graph random_connected_graph(int n, double p, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("random_connected_graph: need n >= 2");
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("random_connected_graph: need 0 < p <= 1");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Graph g = sample_gnp(n, p, attempt == 0 ? seed : SplitMix64::derive(seed, attempt));
    if (is_connected(g)) return g;
  }
  throw std::runtime_error("random_connected_graph: no connected sample in 1000 attempts (p too small)");
}

Graph random_graph_bridged(int n, double p, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("random_graph_bridged: need n >= 2");
  if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("random_graph_bridged: need 0 < p <= 1");
  Graph g = sample_gnp(n, p, seed);
  const auto comp = components(g);
  const int k = *std::max_element(comp.begin(), comp.end()) + 1;
  if (k == 1) return g;

  std::vector<std::vector<int>> members(k);
  for (int v = 0; v < n; ++v) members[comp[v]].push_back(v);
  int largest = 0;
  for (int c = 1; c < k; ++c)
    if (members[c].size() > members[largest].size()) largest = c;

  SplitMix64 rng(SplitMix64::derive(seed, 0xB71D6Eu));
  auto edges = g.edges;
  for (int c = 0; c < k; ++c) {
    if (c == largest) continue;
    const auto& from = members[c];
    const auto& to = members[largest];
    const int u = from[rng.uniform_int(0, static_cast<int>(from.size()) - 1)];
    const int v = to[rng.uniform_int(0, static_cast<int>(to.size()) - 1)];
    edges.emplace_back(u, v);
  }
  return Graph::from_edges(n, std::move(edges));
}

}  // namespace dra
