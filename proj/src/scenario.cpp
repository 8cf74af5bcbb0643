#include "dra/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "dra/rng.hpp"

namespace dra {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("scenario: " + path + ": " + what);
}

const json& need(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing");
  return *it;
}

double as_double(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  fail(path, "expected a number (or \"inf\"/\"-inf\")");
}

int as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

Vec as_vec(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  Vec out;
  out.reserve(v.size());
  for (size_t i = 0; i < v.size(); ++i) out.push_back(as_double(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

json bound_to_json(double x) {
  if (std::isinf(x)) return x > 0 ? json("inf") : json("-inf");
  return json(x);
}

json vec_to_json(const Vec& v, bool bounds = false) {
  json arr = json::array();
  for (double x : v) arr.push_back(bounds ? bound_to_json(x) : json(x));
  return arr;
}

std::vector<std::pair<int, int>> as_pairs(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of index pairs");
  std::vector<std::pair<int, int>> out;
  for (size_t i = 0; i < v.size(); ++i) {
    const auto& e = v[i];
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!e.is_array() || e.size() != 2) fail(p, "expected a pair");
    out.emplace_back(as_int(e[0], p), as_int(e[1], p));
  }
  return out;
}

json pairs_to_json(const std::vector<std::pair<int, int>>& pairs) {
  json arr = json::array();
  for (const auto& [a, b] : pairs) arr.push_back(json::array({a, b}));
  return arr;
}

// ---- objectives ----

Objective parse_objective(const json& v, int m, const std::string& path) {
  const std::string variant = need(v, "variant", path).get<std::string>();
  if (variant == "quadratic_scalar") {
    if (m != 1) fail(path, "quadratic_scalar requires m = 1");
    return Objective::quadratic_scalar(as_double(need(v, "a", path), path + ".a"),
                                       as_double(need(v, "b", path), path + ".b"),
                                       as_double(need(v, "c", path), path + ".c"));
  }
  if (variant == "coupled_quadratic_2d") {
    if (m != 2) fail(path, "coupled_quadratic_2d requires m = 2");
    return Objective::coupled_quadratic_2d(as_double(need(v, "a1", path), path + ".a1"),
                                           as_double(need(v, "a2", path), path + ".a2"));
  }
  fail(path + ".variant", "unknown objective variant '" + variant + "'");
}

json objective_to_json(const Objective& o) {
  switch (o.kind()) {
    case Objective::Kind::QuadraticScalar:
      return {{"variant", "quadratic_scalar"}, {"a", o.quad_a()}, {"b", o.quad_b()}, {"c", o.quad_c()}};
    case Objective::Kind::CoupledQuadratic2D:
      return {{"variant", "coupled_quadratic_2d"}, {"a1", o.coupled_a1()}, {"a2", o.coupled_a2()}};
    case Objective::Kind::Custom:
      throw std::invalid_argument("scenario: custom objectives cannot be serialized");
  }
  throw std::logic_error("objective_to_json: unknown kind");
}

// ---- sets ----

ConvexSet parse_set(const json& v, int m, const std::string& path) {
  const std::string variant = need(v, "variant", path).get<std::string>();
  if (variant == "full_space") return ConvexSet::full_space(m);
  if (variant == "box") {
    Vec lo = as_vec(need(v, "lo", path), path + ".lo");
    Vec hi = as_vec(need(v, "hi", path), path + ".hi");
    if (static_cast<int>(lo.size()) != m || static_cast<int>(hi.size()) != m)
      fail(path, "box bounds must have length m");
    return ConvexSet::box(std::move(lo), std::move(hi));
  }
  if (variant == "ball") {
    Vec c = as_vec(need(v, "center", path), path + ".center");
    if (static_cast<int>(c.size()) != m) fail(path + ".center", "must have length m");
    return ConvexSet::ball(std::move(c), as_double(need(v, "radius", path), path + ".radius"));
  }
  if (variant == "polyhedron") {
    const json& hs = need(v, "halfspaces", path);
    if (!hs.is_array() || hs.empty()) fail(path + ".halfspaces", "expected a nonempty array");
    std::vector<Halfspace> halfspaces;
    for (size_t i = 0; i < hs.size(); ++i) {
      const std::string p = path + ".halfspaces[" + std::to_string(i) + "]";
      Vec a = as_vec(need(hs[i], "a", p), p + ".a");
      if (static_cast<int>(a.size()) != m) fail(p + ".a", "must have length m");
      halfspaces.push_back({std::move(a), as_double(need(hs[i], "b", p), p + ".b")});
    }
    Vec interior = as_vec(need(v, "interior", path), path + ".interior");
    if (static_cast<int>(interior.size()) != m) fail(path + ".interior", "must have length m");
    return ConvexSet::polyhedron(std::move(halfspaces), std::move(interior));
  }
  fail(path + ".variant", "unknown set variant '" + variant + "'");
}

json set_to_json(const ConvexSet& s) {
  switch (s.kind()) {
    case ConvexSet::Kind::FullSpace:
      return {{"variant", "full_space"}};
    case ConvexSet::Kind::Box:
      return {{"variant", "box"}, {"lo", vec_to_json(s.lower(), true)}, {"hi", vec_to_json(s.upper(), true)}};
    case ConvexSet::Kind::Ball:
      return {{"variant", "ball"}, {"center", vec_to_json(s.center())}, {"radius", s.radius()}};
    case ConvexSet::Kind::Polyhedron: {
      json hs = json::array();
      for (const auto& h : s.halfspaces()) hs.push_back({{"a", vec_to_json(h.a)}, {"b", h.b}});
      return {{"variant", "polyhedron"}, {"halfspaces", hs}, {"interior", vec_to_json(s.interior_point())}};
    }
  }
  throw std::logic_error("set_to_json: unknown kind");
}

// ---- graphs ----

GraphSpec parse_graph_spec(const json& v, int n, const std::string& path) {
  const std::string type = need(v, "type", path).get<std::string>();
  if (type == "edges") return GraphSpec::explicit_edges(n, as_pairs(need(v, "edges", path), path + ".edges"));
  if (type == "ring_chords") {
    std::vector<std::pair<int, int>> chords;
    if (v.contains("chords")) chords = as_pairs(v["chords"], path + ".chords");
    return GraphSpec::ring_chords(n, std::move(chords));
  }
  if (type == "random") {
    const double p = as_double(need(v, "p", path), path + ".p");
    const auto seed = static_cast<std::uint64_t>(need(v, "seed", path).get<std::uint64_t>());
    GraphSpec::Connect connect = GraphSpec::Connect::Resample;
    if (v.contains("connect")) {
      const std::string c = v["connect"].get<std::string>();
      if (c == "bridge")
        connect = GraphSpec::Connect::Bridge;
      else if (c != "resample")
        fail(path + ".connect", "expected 'resample' or 'bridge'");
    }
    return GraphSpec::random(n, p, seed, connect);
  }
  fail(path + ".type", "unknown graph type '" + type + "'");
}

json graph_spec_to_json(const GraphSpec& g) {
  switch (g.type) {
    case GraphSpec::Type::Edges:
      return {{"type", "edges"}, {"edges", pairs_to_json(g.edges)}};
    case GraphSpec::Type::RingChords:
      return {{"type", "ring_chords"}, {"chords", pairs_to_json(g.chords)}};
    case GraphSpec::Type::Random:
      return {{"type", "random"},
              {"p", g.p},
              {"seed", g.seed},
              {"connect", g.connect == GraphSpec::Connect::Bridge ? "bridge" : "resample"}};
  }
  throw std::logic_error("graph_spec_to_json: unknown type");
}

// ---- events ----

Event parse_event(const json& v, int m, const std::string& path) {
  const double t = as_double(need(v, "t", path), path + ".t");
  const std::string kind = need(v, "kind", path).get<std::string>();
  if (kind == "set_resource") {
    Vec d = as_vec(need(v, "d", path), path + ".d");
    if (static_cast<int>(d.size()) != m) fail(path + ".d", "must have length m");
    return Event::set_resource(t, as_int(need(v, "id", path), path + ".id"), std::move(d));
  }
  if (kind == "set_objective")
    return Event::set_objective(t, as_int(need(v, "id", path), path + ".id"),
                                parse_objective(need(v, "objective", path), m, path + ".objective"));
  if (kind == "set_feasible_set")
    return Event::set_feasible_set(t, as_int(need(v, "id", path), path + ".id"),
                                   parse_set(need(v, "set", path), m, path + ".set"));
  if (kind == "agent_leave") return Event::agent_leave(t, as_int(need(v, "id", path), path + ".id"));
  if (kind == "agent_join") {
    const json& a = need(v, "agent", path);
    const std::string ap = path + ".agent";
    Vec d = as_vec(need(a, "d", ap), ap + ".d");
    if (static_cast<int>(d.size()) != m) fail(ap + ".d", "must have length m");
    AgentSpec agent(as_int(need(a, "id", ap), ap + ".id"),
                    parse_objective(need(a, "objective", ap), m, ap + ".objective"), std::move(d),
                    parse_set(need(a, "set", ap), m, ap + ".set"));
    Vec x0;
    if (v.contains("x0")) {
      x0 = as_vec(v["x0"], path + ".x0");
      if (static_cast<int>(x0.size()) != m) fail(path + ".x0", "must have length m");
    }
    return Event::agent_join(t, std::move(agent), as_pairs(need(v, "edges", path), path + ".edges"),
                             std::move(x0));
  }
  if (kind == "replace_graph") {
    const json& g = need(v, "graph", path);
    const int n = as_int(need(g, "n", path + ".graph"), path + ".graph.n");
    return Event::replace_graph(t, parse_graph_spec(g, n, path + ".graph"));
  }
  fail(path + ".kind", "unknown event kind '" + kind + "'");
}

json agent_to_json(const AgentSpec& a) {
  return {{"id", a.id},
          {"objective", objective_to_json(a.objective)},
          {"d", vec_to_json(a.resource)},
          {"set", set_to_json(a.feasible_set)}};
}

json event_to_json(const Event& e) {
  json v;
  v["t"] = e.t;
  switch (e.kind) {
    case Event::Kind::SetResource:
      v["kind"] = "set_resource";
      v["id"] = e.agent_id;
      v["d"] = vec_to_json(e.resource);
      break;
    case Event::Kind::SetObjective:
      v["kind"] = "set_objective";
      v["id"] = e.agent_id;
      v["objective"] = objective_to_json(*e.objective);
      break;
    case Event::Kind::SetFeasibleSet:
      v["kind"] = "set_feasible_set";
      v["id"] = e.agent_id;
      v["set"] = set_to_json(*e.set);
      break;
    case Event::Kind::AgentLeave:
      v["kind"] = "agent_leave";
      v["id"] = e.agent_id;
      break;
    case Event::Kind::AgentJoin:
      v["kind"] = "agent_join";
      v["agent"] = agent_to_json(*e.join_agent);
      v["edges"] = pairs_to_json(e.join_edges);
      if (!e.join_x0.empty()) v["x0"] = vec_to_json(e.join_x0);
      break;
    case Event::Kind::ReplaceGraph: {
      json g = graph_spec_to_json(*e.graph);
      g["n"] = e.graph->n;
      v["kind"] = "replace_graph";
      v["graph"] = g;
      break;
    }
  }
  return v;
}

}  // namespace

namespace {
Scenario parse_scenario_checked(const json& root);
}

Scenario parse_scenario(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("scenario: JSON syntax error: ") + e.what());
  }
  try {
    return parse_scenario_checked(root);
  } catch (const json::exception& e) {
    // Wrong JSON types surface from the library; keep the error contract.
    throw std::invalid_argument(std::string("scenario: ") + e.what());
  }
}

namespace {

Scenario parse_scenario_checked(const json& root) {
  Scenario s;
  const json& prob = need(root, "problem", "$");
  s.problem.m = as_int(need(prob, "m", "$.problem"), "$.problem.m");
  if (s.problem.m <= 0) fail("$.problem.m", "must be positive");

  const json& agents = need(prob, "agents", "$.problem");
  if (!agents.is_array() || agents.empty()) fail("$.problem.agents", "expected a nonempty array");
  for (size_t i = 0; i < agents.size(); ++i) {
    const std::string path = "$.problem.agents[" + std::to_string(i) + "]";
    const json& a = agents[i];
    Vec d = as_vec(need(a, "d", path), path + ".d");
    if (static_cast<int>(d.size()) != s.problem.m) fail(path + ".d", "must have length m");
    s.problem.agents.emplace_back(as_int(need(a, "id", path), path + ".id"),
                                  parse_objective(need(a, "objective", path), s.problem.m, path + ".objective"),
                                  std::move(d),
                                  parse_set(need(a, "set", path), s.problem.m, path + ".set"));
  }

  const int n = s.problem.n();
  GraphSpec gspec = parse_graph_spec(need(prob, "graph", "$.problem"), n, "$.problem.graph");
  try {
    s.problem.graph = gspec.materialize();
  } catch (const std::exception& e) {
    fail("$.problem.graph", e.what());
  }

  const json& integ = need(root, "integrator", "$");
  s.integrator.dt = as_double(need(integ, "dt", "$.integrator"), "$.integrator.dt");
  s.integrator.duration = as_double(need(integ, "duration", "$.integrator"), "$.integrator.duration");
  const std::string alg = need(integ, "algorithm", "$.integrator").get<std::string>();
  if (alg == "projected")
    s.integrator.alg = Algorithm::Projected;
  else if (alg == "diff_projected")
    s.integrator.alg = Algorithm::DiffProjected;
  else
    fail("$.integrator.algorithm", "expected 'projected' or 'diff_projected'");
  s.integrator.sample_every = integ.contains("sample_every")
                                  ? as_int(integ["sample_every"], "$.integrator.sample_every")
                                  : 100;
  if (!(s.integrator.dt > 0.0)) fail("$.integrator.dt", "must be positive");
  if (s.integrator.duration < 0.0) fail("$.integrator.duration", "must be nonnegative");
  if (s.integrator.sample_every < 1) fail("$.integrator.sample_every", "must be >= 1");

  s.seed = root.contains("seed") ? root["seed"].get<std::uint64_t>() : 0;

  s.init = InitPolicy::random(s.seed);
  if (root.contains("init")) {
    const json& init = root["init"];
    const std::string policy = need(init, "policy", "$.init").get<std::string>();
    if (policy == "zeros")
      s.init = InitPolicy::zeros();
    else if (policy == "random")
      s.init = InitPolicy::random(s.seed);
    else if (policy == "given") {
      Vec x0 = as_vec(need(init, "X0", "$.init"), "$.init.X0");
      if (x0.size() != static_cast<size_t>(n) * s.problem.m) fail("$.init.X0", "must have length n*m");
      s.init = InitPolicy::given(std::move(x0));
    } else {
      fail("$.init.policy", "expected 'zeros', 'random' or 'given'");
    }
  }

  if (root.contains("outputs")) {
    const json& out = root["outputs"];
    if (out.contains("metrics") && !out["metrics"].is_null())
      s.outputs.metrics_path = out["metrics"].get<std::string>();
    if (out.contains("trajectory") && !out["trajectory"].is_null())
      s.outputs.trajectory_path = out["trajectory"].get<std::string>();
    if (out.contains("oracle_check")) s.outputs.oracle_check = out["oracle_check"].get<bool>();
    if (out.contains("oracle_tol")) s.outputs.oracle_tol = as_double(out["oracle_tol"], "$.outputs.oracle_tol");
  }

  if (root.contains("timeline")) {
    const json& tl = root["timeline"];
    if (!tl.is_array()) fail("$.timeline", "expected an array");
    for (size_t i = 0; i < tl.size(); ++i)
      s.timeline.push_back(parse_event(tl[i], s.problem.m, "$.timeline[" + std::to_string(i) + "]"));
  }

  // Timeline validation: sorted, inside [0, duration], ids resolvable at
  // event time (dry replay over the id set).
  std::set<int> ids;
  for (const auto& a : s.problem.agents) ids.insert(a.id);
  double prev_t = 0.0;
  for (size_t i = 0; i < s.timeline.size(); ++i) {
    const auto& e = s.timeline[i];
    const std::string path = "$.timeline[" + std::to_string(i) + "]";
    if (e.t < 0.0 || e.t > s.integrator.duration) fail(path + ".t", "outside [0, duration]");
    if (e.t < prev_t) fail(path + ".t", "events must be sorted by time");
    prev_t = e.t;
    switch (e.kind) {
      case Event::Kind::SetResource:
      case Event::Kind::SetObjective:
      case Event::Kind::SetFeasibleSet:
        if (!ids.count(e.agent_id)) fail(path + ".id", "unknown agent id at event time");
        break;
      case Event::Kind::AgentLeave:
        if (!ids.erase(e.agent_id)) fail(path + ".id", "unknown agent id at event time");
        break;
      case Event::Kind::AgentJoin:
        if (ids.count(e.agent_id)) fail(path + ".agent.id", "agent id already present at event time");
        ids.insert(e.agent_id);
        for (const auto& [a, b] : e.join_edges)
          if (!ids.count(a) || !ids.count(b)) fail(path + ".edges", "edge references unknown agent id");
        break;
      case Event::Kind::ReplaceGraph:
        if (e.graph->n != static_cast<int>(ids.size()))
          fail(path + ".graph.n", "vertex count differs from agent count at event time");
        break;
    }
  }

  const auto violations = validate(s.problem);
  if (!violations.empty()) fail("$.problem", violations.front());
  return s;
}

}  // namespace

std::string serialize_scenario(const Scenario& s) {
  json root;
  root["problem"]["m"] = s.problem.m;
  json agents = json::array();
  for (const auto& a : s.problem.agents) agents.push_back(agent_to_json(a));
  root["problem"]["agents"] = agents;
  json graph = {{"type", "edges"}, {"edges", pairs_to_json(s.problem.graph.edges)}};
  root["problem"]["graph"] = graph;

  json tl = json::array();
  for (const auto& e : s.timeline) tl.push_back(event_to_json(e));
  root["timeline"] = tl;

  root["integrator"] = {
      {"dt", s.integrator.dt},
      {"duration", s.integrator.duration},
      {"algorithm", s.integrator.alg == Algorithm::Projected ? "projected" : "diff_projected"},
      {"sample_every", s.integrator.sample_every}};
  root["seed"] = s.seed;

  json init;
  switch (s.init.kind) {
    case InitPolicy::Kind::Zeros:
      init = {{"policy", "zeros"}};
      break;
    case InitPolicy::Kind::Random:
      init = {{"policy", "random"}};
      break;
    case InitPolicy::Kind::Given:
      init = {{"policy", "given"}, {"X0", vec_to_json(s.init.x0)}};
      break;
  }
  root["init"] = init;

  root["outputs"] = {{"metrics", s.outputs.metrics_path},
                     {"trajectory", s.outputs.trajectory_path},
                     {"oracle_check", s.outputs.oracle_check},
                     {"oracle_tol", s.outputs.oracle_tol}};
  return root.dump(2);
}

// ---- builtins ----

Scenario builtin_example1() {
  Scenario s;
  s.problem.m = 2;
  s.seed = 1;

  const ConvexSet ball = ConvexSet::ball({2.0, 3.0}, 5.0);
  const ConvexSet poly = ConvexSet::polyhedron(
      {{{-1.0, 0.0}, 0.0}, {{0.0, -1.0}, 0.0}, {{1.0, 2.0}, 4.0}}, {0.5, 0.5});
  const ConvexSet box3 = ConvexSet::box({4.0, 2.0}, {6.0, 5.0});
  const ConvexSet box4 = ConvexSet::box({0.0, 0.0}, {15.0, 20.0});

  s.problem.agents.emplace_back(1, Objective::coupled_quadratic_2d(8.0, 2.0), Vec{8.0, 2.0}, ball);
  s.problem.agents.emplace_back(2, Objective::coupled_quadratic_2d(4.0, 7.0), Vec{3.0, 4.0}, poly);
  s.problem.agents.emplace_back(3, Objective::coupled_quadratic_2d(0.13, 8.0), Vec{3.0, 8.0}, box3);
  s.problem.agents.emplace_back(4, Objective::coupled_quadratic_2d(4.0, 20.0), Vec{10.0, 2.0}, box4);
  s.problem.graph = ring_with_chords(4, {});

  s.timeline.push_back(Event::set_objective(600.0, 1, Objective::coupled_quadratic_2d(0.1, 0.3)));
  s.timeline.push_back(Event::set_objective(600.0, 2, Objective::coupled_quadratic_2d(-17.0, 15.0)));
  s.timeline.push_back(Event::set_resource(600.0, 3, {-5.0, 12.0}));
  s.timeline.push_back(Event::set_resource(600.0, 4, {1.0, 15.0}));

  s.timeline.push_back(Event::set_resource(1200.0, 1, {12.0, -3.0}));
  s.timeline.push_back(Event::set_resource(1200.0, 2, {0.0, 7.0}));
  s.timeline.push_back(Event::set_objective(1200.0, 3, Objective::coupled_quadratic_2d(3.0, 0.7)));
  s.timeline.push_back(Event::set_objective(1200.0, 4, Objective::coupled_quadratic_2d(5.0, 17.0)));

  s.integrator = {0.01, 1800.0, Algorithm::Projected, 100};
  s.init = InitPolicy::random(s.seed);
  return s;
}

namespace {

// k distinct values sampled from `pool` by partial Fisher-Yates, returned sorted.
std::vector<int> sample_distinct(std::vector<int> pool, int k, SplitMix64& rng) {
  for (int i = 0; i < k; ++i) {
    const int j = rng.uniform_int(i, static_cast<int>(pool.size()) - 1);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

Scenario builtin_dispatch(std::uint64_t seed) {
  constexpr int kGenerators = 54;
  SplitMix64 rng(seed);
  Scenario s;
  s.problem.m = 1;
  s.seed = seed;

  struct GenData {
    double a, b, c, lo, hi, d;
  };
  std::vector<GenData> gen(kGenerators);
  for (auto& g : gen) {
    g.a = rng.uniform(0.0024, 0.0679);
    g.b = rng.uniform(8.3391, 37.6968);
    g.c = rng.uniform(6.78, 74.33);
    g.lo = rng.uniform(5.0, 150.0);
    g.hi = rng.uniform(150.0, 400.0);
    while (g.hi - g.lo < 1.0) g.hi = rng.uniform(150.0, 400.0);
    g.d = rng.uniform(0.0, 300.0);
  }

  const auto aggregate_ok = [&]() {
    double lo = 0, hi = 0, d = 0;
    for (const auto& g : gen) {
      lo += g.lo;
      hi += g.hi;
      d += g.d;
    }
    return lo < d && d < hi;
  };
  if (!aggregate_ok()) {
    // Very unlikely for these ranges; recenter loads to the capacity midpoint.
    double lo = 0, hi = 0, d = 0;
    for (const auto& g : gen) { lo += g.lo; hi += g.hi; d += g.d; }
    const double scale = 0.5 * (lo + hi) / d;
    for (auto& g : gen) g.d *= scale;
  }

  for (int i = 0; i < kGenerators; ++i) {
    s.problem.agents.emplace_back(i + 1, Objective::quadratic_scalar(gen[i].a, gen[i].b, gen[i].c),
                                  Vec{gen[i].d}, ConvexSet::box({gen[i].lo}, {gen[i].hi}));
  }
  // Ring over generators 1..54 plus the five published chords (1-based ids).
  s.problem.graph = ring_with_chords(
      kGenerators, {{0, 3}, {14, 24}, {24, 34}, {34, 44}, {44, 49}});

  std::vector<int> all_ids(kGenerators);
  for (int i = 0; i < kGenerators; ++i) all_ids[i] = i + 1;

  // t=100: 18 buses change load by -20..+20%.
  for (int id : sample_distinct(all_ids, 18, rng)) {
    auto& g = gen[id - 1];
    g.d *= 1.0 + rng.uniform(-0.2, 0.2);
    s.timeline.push_back(Event::set_resource(100.0, id, {g.d}));
  }

  // t=200: 18 generators scale lower bounds by -50..+50%, a disjoint 18 scale
  // upper bounds by -20..+20%; bounds are kept at least 0.5 apart.
  {
    auto chosen = sample_distinct(all_ids, 36, rng);
    for (int k = 0; k < 36; ++k) {
      const int id = chosen[k];
      auto& g = gen[id - 1];
      if (k < 18) {
        g.lo = std::min(g.lo * (1.0 + rng.uniform(-0.5, 0.5)), g.hi - 0.5);
      } else {
        g.hi = std::max(g.hi * (1.0 + rng.uniform(-0.2, 0.2)), g.lo + 0.5);
      }
      s.timeline.push_back(Event::set_feasible_set(200.0, id, ConvexSet::box({g.lo}, {g.hi})));
    }
  }

  // t=300: 18 generators raise a_i by 0..50%, a disjoint 18 cut b_i by 0..50%.
  {
    auto chosen = sample_distinct(all_ids, 36, rng);
    for (int k = 0; k < 36; ++k) {
      const int id = chosen[k];
      auto& g = gen[id - 1];
      if (k < 18)
        g.a *= 1.0 + rng.uniform(0.0, 0.5);
      else
        g.b *= 1.0 + rng.uniform(-0.5, 0.0);
      s.timeline.push_back(Event::set_objective(300.0, id, Objective::quadratic_scalar(g.a, g.b, g.c)));
    }
  }

  // t=400: generators 2 and 3 leave with their edges.
  s.timeline.push_back(Event::agent_leave(400.0, 2));
  s.timeline.push_back(Event::agent_leave(400.0, 3));

  // t=500: generator 3 rejoins with regenerated data and edge (3,4).
  {
    GenData g;
    g.a = rng.uniform(0.0024, 0.0679);
    g.b = rng.uniform(8.3391, 37.6968);
    g.c = rng.uniform(6.78, 74.33);
    g.lo = rng.uniform(5.0, 150.0);
    g.hi = rng.uniform(150.0, 400.0);
    while (g.hi - g.lo < 1.0) g.hi = rng.uniform(150.0, 400.0);
    g.d = rng.uniform(0.0, 300.0);
    const double x0 = rng.uniform(g.lo, g.hi);
    AgentSpec agent(3, Objective::quadratic_scalar(g.a, g.b, g.c), Vec{g.d},
                    ConvexSet::box({g.lo}, {g.hi}));
    s.timeline.push_back(Event::agent_join(500.0, std::move(agent), {{3, 4}}, {x0}));
  }

  s.integrator = {0.01, 600.0, Algorithm::DiffProjected, 100};
  s.init = InitPolicy::random(seed);
  return s;
}

namespace {

// Documented 96-point daily demand shape in [0, 1]: overnight trough, a
// morning ramp peaking around sample 38 (09:30) and a higher evening peak
// around sample 78 (19:30).
double daily_curve(int k) {
  const double morning = std::exp(-std::pow((k - 38.0) / 11.0, 2.0));
  const double evening = std::exp(-std::pow((k - 78.0) / 9.0, 2.0));
  const double v = 0.30 + 0.45 * morning + 0.62 * evening;
  return std::min(v, 1.0);
}

}  // namespace

Scenario builtin_scale(int n, int periods, std::uint64_t seed) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("builtin_scale: n must be even and >= 2");
  if (periods < 1) throw std::invalid_argument("builtin_scale: periods must be >= 1");
  constexpr double kPeriod = 80.0;

  SplitMix64 rng(seed);
  Scenario s;
  s.problem.m = 1;
  s.seed = seed;

  struct AreaData {
    double a, b, lo, hi;  // nominal values
  };
  const int half = n / 2;
  std::vector<AreaData> nominal(n);
  double sum_lo = 0.0, sum_hi = 0.0;
  for (int i = 0; i < n; ++i) {
    auto& g = nominal[i];
    if (i < half) {  // fuel group
      g.a = rng.uniform(3.0, 7.0);
      g.b = rng.uniform(5.0, 9.0);
      g.lo = rng.uniform(2.0, 6.0);
      g.hi = rng.uniform(15.0, 23.0);
    } else {  // renewable group
      g.a = rng.uniform(0.5, 2.0);
      g.b = rng.uniform(0.5, 4.0);
      g.lo = rng.uniform(0.0, 1.0);
      g.hi = rng.uniform(1.5, 7.0);
    }
    sum_lo += g.lo;
    sum_hi += g.hi;
  }

  const auto period_total = [&](int j) {
    const double frac = 0.12 + 0.76 * daily_curve(j % 96);
    return sum_lo + frac * (sum_hi - sum_lo);
  };

  // Per-area load weights are drawn once (+-10% around equal share) and held
  // for the whole day; period-to-period load changes come from the curve.
  std::vector<double> weight(n);
  double weight_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    weight[i] = 1.0 + rng.uniform(-0.1, 0.1);
    weight_sum += weight[i];
  }
  const auto area_load = [&](int j, int i) { return period_total(j) * weight[i] / weight_sum; };

  // Initial problem: period-0 loads, placeholder ring replaced at t = 0.
  std::vector<double> load(n);
  for (int i = 0; i < n; ++i) load[i] = area_load(0, i);
  for (int i = 0; i < n; ++i) {
    s.problem.agents.emplace_back(i + 1, Objective::quadratic_scalar(nominal[i].a, nominal[i].b, 0.0),
                                  Vec{load[i]}, ConvexSet::box({nominal[i].lo}, {nominal[i].hi}));
  }
  s.problem.graph = ring_with_chords(n, {});

  std::vector<int> renewable_ids(half);
  for (int i = 0; i < half; ++i) renewable_ids[i] = half + i + 1;
  const int perturb_count = std::max(1, half / 10);

  std::vector<double> cur_lo(n), cur_hi(n);
  for (int i = 0; i < n; ++i) {
    cur_lo[i] = nominal[i].lo;
    cur_hi[i] = nominal[i].hi;
  }

  for (int j = 0; j < periods; ++j) {
    const double t = kPeriod * j;

    // Fresh sparse communication graph; p below the connectivity threshold,
    // so the sample is bridged rather than resampled.
    const double p = rng.uniform(0.0015, 0.005);
    s.timeline.push_back(
        Event::replace_graph(t, GraphSpec::random(n, p, SplitMix64::derive(seed, 1000 + j),
                                                  GraphSpec::Connect::Bridge)));

    // Loads follow the daily curve through the fixed per-area weights.
    if (j > 0) {
      double agg = 0.0;
      for (int i = 0; i < n; ++i) {
        load[i] = area_load(j, i);
        agg += load[i];
      }
      double lo_now = 0.0, hi_now = 0.0;
      for (int i = 0; i < n; ++i) {
        lo_now += cur_lo[i];
        hi_now += cur_hi[i];
      }
      if (!(lo_now < agg && agg < hi_now))
        throw std::logic_error("builtin_scale: generated loads infeasible for aggregate capacity");
      for (int i = 0; i < n; ++i) s.timeline.push_back(Event::set_resource(t, i + 1, {load[i]}));
    }

    // 10% of the renewable group re-draws costs and capacities within +-20%
    // of nominal.
    for (int id : sample_distinct(renewable_ids, perturb_count, rng)) {
      const auto& nom = nominal[id - 1];
      const double a = nom.a * (1.0 + rng.uniform(-0.2, 0.2));
      const double b = nom.b * (1.0 + rng.uniform(-0.2, 0.2));
      double lo = nom.lo * (1.0 + rng.uniform(-0.2, 0.2));
      double hi = nom.hi * (1.0 + rng.uniform(-0.2, 0.2));
      if (lo > hi - 1e-6) lo = hi - 1e-6;
      cur_lo[id - 1] = lo;
      cur_hi[id - 1] = hi;
      s.timeline.push_back(Event::set_objective(t, id, Objective::quadratic_scalar(a, b, 0.0)));
      s.timeline.push_back(Event::set_feasible_set(t, id, ConvexSet::box({lo}, {hi})));
    }
  }

  s.integrator = {0.01, kPeriod * periods, Algorithm::DiffProjected, 1000};
  s.init = InitPolicy::random(seed);
  return s;
}

// ---- CSV ----

namespace {

std::string fmt12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::string metrics_csv_header() {
  return "t,balance_gap,consensus_error,optimality_residual,kkt_residual,objective,max_infeasibility\n";
}

std::string metrics_csv_row(const MetricsRecord& r) {
  return fmt12(r.t) + "," + fmt12(r.balance_gap) + "," + fmt12(r.consensus_error) + "," +
         fmt12(r.optimality_residual) + "," + fmt12(r.kkt_residual) + "," + fmt12(r.objective) + "," +
         fmt12(r.max_infeasibility) + "\n";
}

std::string trajectory_csv_header(const ProblemInstance& p) {
  std::string h = "t";
  for (const auto& a : p.agents)
    for (int k = 0; k < p.m; ++k) h += ",x_" + std::to_string(a.id) + "_" + std::to_string(k);
  return h + "\n";
}

std::string trajectory_csv_row(double t, const NetworkState& s) {
  std::string row = fmt12(t);
  for (double v : s.x) row += "," + fmt12(v);
  return row + "\n";
}

}  // namespace dra
