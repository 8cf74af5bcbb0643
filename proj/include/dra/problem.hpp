#pragma once

#include <string>
#include <vector>

#include "dra/convex_set.hpp"
#include "dra/graph.hpp"
#include "dra/objective.hpp"

namespace dra {

// One agent's private data: local cost, local resource, local feasibility set.
struct AgentSpec {
  int id = 0;
  Objective objective;
  Vec resource;            // d_i, length m
  ConvexSet feasible_set;  // Omega_i

  AgentSpec(int id_, Objective obj, Vec d, ConvexSet set)
      : id(id_), objective(std::move(obj)), resource(std::move(d)), feasible_set(std::move(set)) {}
};

struct ProblemInstance {
  int m = 1;                     // allocation dimension
  std::vector<AgentSpec> agents; // row order defines graph vertex order
  Graph graph;

  int n() const { return static_cast<int>(agents.size()); }

  // Row index of the agent with external id; -1 if absent.
  int row_of(int id) const;
};

// Sum of all local resources (the network-wide resource total).
Vec total_resource(const ProblemInstance& p);

// Structural checks: consistent dimensions, unique ids, graph size and
// connectivity. Violations are returned, not thrown.
std::vector<std::string> validate(const ProblemInstance& p);

}  // namespace dra
