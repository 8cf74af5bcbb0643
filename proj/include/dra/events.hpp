#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dra/graph.hpp"
#include "dra/problem.hpp"

namespace dra {

// Recipe for building a graph: explicit edges, a ring with chords, or a
// seeded random graph. Random graphs connect either by resampling (the
// default) or by bridging components, for sparse regimes where a connected
// sample is effectively unreachable.
struct GraphSpec {
  enum class Type { Edges, RingChords, Random };
  enum class Connect { Resample, Bridge };

  Type type = Type::Edges;
  int n = 0;
  std::vector<std::pair<int, int>> edges;   // Edges: explicit list (vertex indices)
  std::vector<std::pair<int, int>> chords;  // RingChords
  double p = 0.0;                           // Random
  std::uint64_t seed = 0;                   // Random
  Connect connect = Connect::Resample;      // Random

  static GraphSpec explicit_edges(int n, std::vector<std::pair<int, int>> edges);
  static GraphSpec ring_chords(int n, std::vector<std::pair<int, int>> chords);
  static GraphSpec random(int n, double p, std::uint64_t seed, Connect connect = Connect::Resample);

  Graph materialize() const;
};

// A timed reconfiguration. Agents are addressed by external id; graph
// payloads are positional over the agent order current at apply time.
struct Event {
  enum class Kind { SetResource, SetObjective, SetFeasibleSet, AgentJoin, AgentLeave, ReplaceGraph };

  double t = 0.0;
  Kind kind = Kind::SetResource;

  int agent_id = 0;                              // all agent-scoped kinds
  Vec resource;                                  // SetResource
  std::optional<Objective> objective;            // SetObjective
  std::optional<ConvexSet> set;                  // SetFeasibleSet
  std::optional<AgentSpec> join_agent;           // AgentJoin
  std::vector<std::pair<int, int>> join_edges;   // AgentJoin, pairs of agent ids
  Vec join_x0;                                   // AgentJoin initial allocation (projected); empty = origin
  std::optional<GraphSpec> graph;                // ReplaceGraph

  static Event set_resource(double t, int agent_id, Vec d);
  static Event set_objective(double t, int agent_id, Objective obj);
  static Event set_feasible_set(double t, int agent_id, ConvexSet set);
  static Event agent_join(double t, AgentSpec agent, std::vector<std::pair<int, int>> edges, Vec x0 = {});
  static Event agent_leave(double t, int agent_id);
  static Event replace_graph(double t, GraphSpec g);
};

}  // namespace dra
