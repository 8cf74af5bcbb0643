#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dra/linalg.hpp"

namespace dra {

// Undirected information-sharing graph over agents 0..n-1. Edges are stored
// normalized (i < j, sorted, unique); no self-loops.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  static Graph from_edges(int n, std::vector<std::pair<int, int>> edges);

  std::vector<int> degrees() const;
};

bool is_connected(const Graph& g);

// Dense Laplacian L = Deg - A. Row sums are exactly zero (integer arithmetic
// before the cast to double).
Mat laplacian(const Graph& g);

struct SpectralExtremes {
  double lambda2;     // smallest nonzero eigenvalue (algebraic connectivity)
  double lambda_max;  // largest eigenvalue
};

// Extreme nonzero Laplacian eigenvalues. Dense eigensolve for small graphs;
// for large n (> 400) power iteration on L gives lambda_max and deflated
// power iteration on (lambda_max I - L) gives lambda2, tolerance 1e-8.
// Throws if the graph is disconnected (zero eigenvalue repeats).
SpectralExtremes eigen_extremes(const Graph& g);
SpectralExtremes eigen_extremes(const Mat& laplacian);

// y = (L (x) I_m) x applied blockwise from the edge list; the Kronecker
// product is never materialized. x and y are n*m flat, row-major per agent.
void apply_laplacian(const Graph& g, std::span<const double> x, int m, std::span<double> y);

// Cycle 0-1-...-(n-1)-0 plus chord edges. n >= 3.
Graph ring_with_chords(int n, const std::vector<std::pair<int, int>>& chords);

// Erdos-Renyi G(n, p) from the seeded generator, resampled with derived seeds
// until connected. Throws after 1000 unsuccessful samples (p too small for n).
Graph random_connected_graph(int n, double p, std::uint64_t seed);

// Single G(n, p) sample made connected by bridging every component to the
// largest one with seeded random edges. Intended for sparse regimes where
// resampling cannot produce a connected draw.
Graph random_graph_bridged(int n, double p, std::uint64_t seed);

}  // namespace dra
