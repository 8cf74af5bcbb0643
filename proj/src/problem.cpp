#include "dra/problem.hpp"

#include <set>

namespace dra {

int ProblemInstance::row_of(int id) const {
  for (int i = 0; i < n(); ++i)
    if (agents[i].id == id) return i;
  return -1;
}

Vec total_resource(const ProblemInstance& p) {
  Vec total(p.m, 0.0);
  for (const auto& a : p.agents)
    for (int k = 0; k < p.m; ++k) total[k] += a.resource[k];
  return total;
}

std::vector<std::string> validate(const ProblemInstance& p) {
  std::vector<std::string> violations;
  if (p.m <= 0) violations.push_back("allocation dimension m must be positive");
  if (p.agents.empty()) violations.push_back("problem has no agents");

  std::set<int> ids;
  for (const auto& a : p.agents) {
    if (!ids.insert(a.id).second)
      violations.push_back("duplicate agent id " + std::to_string(a.id));
    if (a.objective.dim() != p.m)
      violations.push_back("agent " + std::to_string(a.id) + ": objective dimension " +
                           std::to_string(a.objective.dim()) + " != m");
    if (static_cast<int>(a.resource.size()) != p.m)
      violations.push_back("agent " + std::to_string(a.id) + ": resource dimension mismatch");
    if (a.feasible_set.dim() != p.m)
      violations.push_back("agent " + std::to_string(a.id) + ": feasible set dimension mismatch");
    if (a.feasible_set.kind() == ConvexSet::Kind::Polyhedron &&
        !a.feasible_set.contains(a.feasible_set.interior_point(), 0.0))
      violations.push_back("agent " + std::to_string(a.id) + ": polyhedron witness infeasible");
  }

  if (p.graph.n != p.n()) {
    violations.push_back("graph has " + std::to_string(p.graph.n) + " vertices for " +
                         std::to_string(p.n()) + " agents");
  } else if (p.n() >= 1 && !is_connected(p.graph)) {
    violations.push_back("information-sharing graph is not connected");
  }
  return violations;
}

}  // namespace dra
