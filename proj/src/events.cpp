#include "dra/events.hpp"

#include <stdexcept>

namespace dra {

GraphSpec GraphSpec::explicit_edges(int n, std::vector<std::pair<int, int>> edges) {
  GraphSpec g;
  g.type = Type::Edges;
  g.n = n;
  g.edges = std::move(edges);
  return g;
}

GraphSpec GraphSpec::ring_chords(int n, std::vector<std::pair<int, int>> chords) {
  GraphSpec g;
  g.type = Type::RingChords;
  g.n = n;
  g.chords = std::move(chords);
  return g;
}

GraphSpec GraphSpec::random(int n, double p, std::uint64_t seed, Connect connect) {
  GraphSpec g;
  g.type = Type::Random;
  g.n = n;
  g.p = p;
  g.seed = seed;
  g.connect = connect;
  return g;
}

Graph GraphSpec::materialize() const {
  switch (type) {
    case Type::Edges:
      return Graph::from_edges(n, edges);
    case Type::RingChords:
      return ring_with_chords(n, chords);
    case Type::Random:
      return connect == Connect::Resample ? random_connected_graph(n, p, seed)
                                          : random_graph_bridged(n, p, seed);
  }
  throw std::logic_error("GraphSpec: unknown type");
}

Event Event::set_resource(double t, int agent_id, Vec d) {
  Event e;
  e.t = t;
  e.kind = Kind::SetResource;
  e.agent_id = agent_id;
  e.resource = std::move(d);
  return e;
}

Event Event::set_objective(double t, int agent_id, Objective obj) {
  Event e;
  e.t = t;
  e.kind = Kind::SetObjective;
  e.agent_id = agent_id;
  e.objective = std::move(obj);
  return e;
}

Event Event::set_feasible_set(double t, int agent_id, ConvexSet set) {
  Event e;
  e.t = t;
  e.kind = Kind::SetFeasibleSet;
  e.agent_id = agent_id;
  e.set = std::move(set);
  return e;
}

Event Event::agent_join(double t, AgentSpec agent, std::vector<std::pair<int, int>> edges, Vec x0) {
  Event e;
  e.t = t;
  e.kind = Kind::AgentJoin;
  e.agent_id = agent.id;
  e.join_agent = std::move(agent);
  e.join_edges = std::move(edges);
  e.join_x0 = std::move(x0);
  return e;
}

Event Event::agent_leave(double t, int agent_id) {
  Event e;
  e.t = t;
  e.kind = Kind::AgentLeave;
  e.agent_id = agent_id;
  return e;
}

Event Event::replace_graph(double t, GraphSpec g) {
  Event e;
  e.t = t;
  e.kind = Kind::ReplaceGraph;
  e.graph = std::move(g);
  return e;
}

}  // namespace dra
