#include "dra/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dra/rng.hpp"
#include "dra/verification.hpp"

namespace dra {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr double kStateCap = 1e12;

void check_state_shape(const ProblemInstance& p, const NetworkState& s, const char* what) {
  if (s.n != p.n() || s.m != p.m)
    throw std::invalid_argument(std::string(what) + ": state shape does not match problem");
}

void require_feasible(const ProblemInstance& p, const NetworkState& s, const char* what) {
  for (int i = 0; i < s.n; ++i) {
    if (!p.agents[i].feasible_set.contains(s.x_row(i), kFeasTol))
      throw std::domain_error(std::string(what) + ": agent " + std::to_string(p.agents[i].id) +
                              " allocation is outside its feasible set");
  }
}

// Shared multiplier/integral dynamics:
//   dlam = -(L)Lambda - (L)Z + (D - X),  dz = (L)Lambda, both blockwise.
void consensus_part(const ProblemInstance& p, const NetworkState& s, StateDerivative& out) {
  const int m = s.m;
  std::fill(out.dlam.begin(), out.dlam.end(), 0.0);
  std::fill(out.dz.begin(), out.dz.end(), 0.0);
  for (const auto& [i, j] : p.graph.edges) {
    const size_t ri = static_cast<size_t>(i) * m;
    const size_t rj = static_cast<size_t>(j) * m;
    for (int k = 0; k < m; ++k) {
      const double dl = s.lam[ri + k] - s.lam[rj + k];
      const double dzv = s.z[ri + k] - s.z[rj + k];
      out.dz[ri + k] += dl;
      out.dz[rj + k] -= dl;
      out.dlam[ri + k] -= dl + dzv;
      out.dlam[rj + k] += dl + dzv;
    }
  }
  for (int i = 0; i < s.n; ++i) {
    const size_t r = static_cast<size_t>(i) * m;
    const Vec& d = p.agents[i].resource;
    for (int k = 0; k < m; ++k) out.dlam[r + k] += d[k] - s.x[r + k];
  }
}

void prepare(const ProblemInstance& p, const NetworkState& s, StateDerivative& out, Workspace& w,
             const char* what) {
  check_state_shape(p, s, what);
  require_feasible(p, s, what);
  out.resize(s.x.size());
  w.grad.resize(p.m);
  w.dir.resize(p.m);
  w.arg.resize(p.m);
  w.proj.resize(p.m);
}

}  // namespace

void field_projected(const ProblemInstance& p, const NetworkState& s, StateDerivative& out,
                     Workspace& w) {
  prepare(p, s, out, w, "field_projected");
  consensus_part(p, s, out);
  const int m = s.m;
  for (int i = 0; i < s.n; ++i) {
    const auto& agent = p.agents[i];
    const auto x = s.x_row(i);
    const auto lam = s.lam_row(i);
    agent.objective.gradient_into(x, w.grad);
    const size_t r = static_cast<size_t>(i) * m;
    if (agent.feasible_set.kind() == ConvexSet::Kind::FullSpace) {
      // Identity projection: evaluate lam - grad directly so that the two
      // algorithms coincide bitwise on unconstrained agents.
      for (int k = 0; k < m; ++k) out.dx[r + k] = lam[k] - w.grad[k];
    } else {
      for (int k = 0; k < m; ++k) w.arg[k] = x[k] - w.grad[k] + lam[k];
      agent.feasible_set.project_into(w.arg, w.proj);
      for (int k = 0; k < m; ++k) out.dx[r + k] = w.proj[k] - x[k];
    }
  }
}

void field_diff_projected(const ProblemInstance& p, const NetworkState& s, StateDerivative& out,
                          Workspace& w) {
  prepare(p, s, out, w, "field_diff_projected");
  consensus_part(p, s, out);
  const int m = s.m;
  for (int i = 0; i < s.n; ++i) {
    const auto& agent = p.agents[i];
    const auto x = s.x_row(i);
    const auto lam = s.lam_row(i);
    agent.objective.gradient_into(x, w.grad);
    for (int k = 0; k < m; ++k) w.dir[k] = lam[k] - w.grad[k];
    const size_t r = static_cast<size_t>(i) * m;
    if (agent.feasible_set.kind() == ConvexSet::Kind::FullSpace) {
      for (int k = 0; k < m; ++k) out.dx[r + k] = w.dir[k];
    } else {
      agent.feasible_set.tangent_project_into(x, w.dir, w.proj);
      for (int k = 0; k < m; ++k) out.dx[r + k] = w.proj[k];
    }
  }
}

void compute_field(const ProblemInstance& p, const NetworkState& s, Algorithm alg,
                   StateDerivative& out, Workspace& w) {
  if (alg == Algorithm::Projected)
    field_projected(p, s, out, w);
  else
    field_diff_projected(p, s, out, w);
}

void step_inplace(const ProblemInstance& p, NetworkState& s, double dt, Algorithm alg, Workspace& w) {
  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  compute_field(p, s, alg, w.deriv, w);
  const size_t len = s.x.size();
  for (size_t k = 0; k < len; ++k) {
    s.x[k] += dt * w.deriv.dx[k];
    s.lam[k] += dt * w.deriv.dlam[k];
    s.z[k] += dt * w.deriv.dz[k];
  }
  // Feasibility safeguard against discretization drift; a no-op at fixed points.
  for (int i = 0; i < s.n; ++i) {
    const auto& set = p.agents[i].feasible_set;
    if (set.kind() == ConvexSet::Kind::FullSpace) continue;
    auto row = s.x_row(i);
    set.project_into(row, w.proj);
    std::copy(w.proj.begin(), w.proj.end(), row.begin());
  }
  for (size_t k = 0; k < len; ++k) {
    const double worst = std::max({std::abs(s.x[k]), std::abs(s.lam[k]), std::abs(s.z[k])});
    if (!(worst <= kStateCap))
      throw std::runtime_error("dynamics diverged: state exceeded 1e12 (dt=" + std::to_string(dt) +
                               " may be too large)");
  }
  s.t += dt;
}

NetworkState step(const ProblemInstance& p, const NetworkState& s, double dt, Algorithm alg) {
  NetworkState next = s;
  Workspace w;
  step_inplace(p, next, dt, alg, w);
  return next;
}

NetworkState initialize(const ProblemInstance& p, const InitPolicy& policy) {
  NetworkState s(p.n(), p.m);
  const int m = p.m;
  switch (policy.kind) {
    case InitPolicy::Kind::Zeros:
      break;  // x stays at the origin before projection
    case InitPolicy::Kind::Random: {
      // Seeded draw per agent inside a set-scaled box, then one-step local
      // projection; draws happen in row order, m values per agent.
      SplitMix64 rng(policy.seed);
      for (int i = 0; i < p.n(); ++i) {
        const auto& set = p.agents[i].feasible_set;
        auto row = s.x_row(i);
        switch (set.kind()) {
          case ConvexSet::Kind::Box:
            for (int k = 0; k < m; ++k) {
              const double lo = std::isfinite(set.lower()[k]) ? set.lower()[k] : -1.0;
              const double hi = std::isfinite(set.upper()[k]) ? set.upper()[k] : 1.0;
              row[k] = rng.uniform(std::min(lo, hi), std::max(lo, hi));
            }
            break;
          case ConvexSet::Kind::Ball:
            for (int k = 0; k < m; ++k)
              row[k] = set.center()[k] + set.radius() * rng.uniform(-1.0, 1.0);
            break;
          case ConvexSet::Kind::Polyhedron:
            for (int k = 0; k < m; ++k)
              row[k] = set.interior_point()[k] + rng.uniform(-1.0, 1.0);
            break;
          case ConvexSet::Kind::FullSpace:
            for (int k = 0; k < m; ++k) row[k] = rng.uniform(-1.0, 1.0);
            break;
        }
      }
      break;
    }
    case InitPolicy::Kind::Given:
      if (policy.x0.size() != s.x.size())
        throw std::invalid_argument("initialize: given X0 has wrong size");
      s.x = policy.x0;
      break;
  }
  Vec proj(m);
  for (int i = 0; i < p.n(); ++i) {
    auto row = s.x_row(i);
    p.agents[i].feasible_set.project_into(row, proj);
    std::copy(proj.begin(), proj.end(), row.begin());
  }
  return s;
}

namespace {

void erase_row(Vec& v, int row, int m) {
  v.erase(v.begin() + static_cast<size_t>(row) * m, v.begin() + static_cast<size_t>(row + 1) * m);
}

Graph drop_vertex(const Graph& g, int row) {
  std::vector<std::pair<int, int>> edges;
  edges.reserve(g.edges.size());
  for (const auto& [i, j] : g.edges) {
    if (i == row || j == row) continue;
    edges.emplace_back(i > row ? i - 1 : i, j > row ? j - 1 : j);
  }
  return Graph::from_edges(g.n - 1, std::move(edges));
}

}  // namespace

void apply_event(ProblemInstance& p, NetworkState& s, const Event& e) {
  check_state_shape(p, s, "apply_event");
  const auto locate = [&](int id) {
    const int row = p.row_of(id);
    if (row < 0) throw std::invalid_argument("apply_event: unknown agent id " + std::to_string(id));
    return row;
  };

  switch (e.kind) {
    case Event::Kind::SetResource: {
      const int row = locate(e.agent_id);
      if (static_cast<int>(e.resource.size()) != p.m)
        throw std::invalid_argument("apply_event: resource dimension mismatch");
      p.agents[row].resource = e.resource;
      return;  // state untouched
    }
    case Event::Kind::SetObjective: {
      const int row = locate(e.agent_id);
      if (!e.objective || e.objective->dim() != p.m)
        throw std::invalid_argument("apply_event: objective missing or dimension mismatch");
      p.agents[row].objective = *e.objective;
      return;
    }
    case Event::Kind::SetFeasibleSet: {
      const int row = locate(e.agent_id);
      if (!e.set || e.set->dim() != p.m)
        throw std::invalid_argument("apply_event: set missing or dimension mismatch");
      p.agents[row].feasible_set = *e.set;
      auto xrow = s.x_row(row);
      Vec proj = p.agents[row].feasible_set.project(xrow);
      std::copy(proj.begin(), proj.end(), xrow.begin());
      return;
    }
    case Event::Kind::AgentLeave: {
      const int row = locate(e.agent_id);
      if (p.n() <= 1) throw std::invalid_argument("apply_event: cannot remove the last agent");
      Graph g = drop_vertex(p.graph, row);
      if (!is_connected(g))
        throw std::invalid_argument("apply_event: graph disconnected after agent " +
                                    std::to_string(e.agent_id) + " leaves");
      p.graph = std::move(g);
      p.agents.erase(p.agents.begin() + row);
      erase_row(s.x, row, s.m);
      erase_row(s.lam, row, s.m);
      erase_row(s.z, row, s.m);
      s.n -= 1;
      return;
    }
    case Event::Kind::AgentJoin: {
      if (!e.join_agent) throw std::invalid_argument("apply_event: join payload missing");
      if (p.row_of(e.join_agent->id) >= 0)
        throw std::invalid_argument("apply_event: agent id " + std::to_string(e.join_agent->id) +
                                    " already present");
      if (e.join_agent->objective.dim() != p.m ||
          static_cast<int>(e.join_agent->resource.size()) != p.m ||
          e.join_agent->feasible_set.dim() != p.m)
        throw std::invalid_argument("apply_event: joining agent dimension mismatch");
      ProblemInstance next = p;
      next.agents.push_back(*e.join_agent);
      const int new_row = next.n() - 1;
      auto edges = next.graph.edges;
      for (const auto& [ida, idb] : e.join_edges) {
        const int ra = next.row_of(ida);
        const int rb = next.row_of(idb);
        if (ra < 0 || rb < 0)
          throw std::invalid_argument("apply_event: join edge references unknown agent id");
        edges.emplace_back(ra, rb);
      }
      Graph g = Graph::from_edges(next.n(), std::move(edges));
      if (!is_connected(g)) throw std::invalid_argument("apply_event: graph disconnected after join");
      next.graph = std::move(g);

      Vec x0 = e.join_x0.empty() ? Vec(p.m, 0.0) : e.join_x0;
      if (static_cast<int>(x0.size()) != p.m)
        throw std::invalid_argument("apply_event: join x0 dimension mismatch");
      Vec xproj = next.agents[new_row].feasible_set.project(x0);

      p = std::move(next);
      s.x.insert(s.x.end(), xproj.begin(), xproj.end());
      s.lam.insert(s.lam.end(), p.m, 0.0);
      s.z.insert(s.z.end(), p.m, 0.0);
      s.n += 1;
      return;
    }
    case Event::Kind::ReplaceGraph: {
      if (!e.graph) throw std::invalid_argument("apply_event: graph payload missing");
      Graph g = e.graph->materialize();
      if (g.n != p.n())
        throw std::invalid_argument("apply_event: replacement graph has wrong vertex count");
      if (!is_connected(g)) throw std::invalid_argument("apply_event: replacement graph disconnected");
      p.graph = std::move(g);
      return;
    }
  }
}

std::pair<ProblemInstance, NetworkState> simulate(ProblemInstance p, NetworkState s,
                                                  std::vector<Event> timeline,
                                                  const SimulateConfig& cfg,
                                                  const MetricsSink& sink,
                                                  const SegmentHook& segment_hook,
                                                  const StateSink& state_sink) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("simulate: dt must be positive");
  if (cfg.duration < 0.0) throw std::invalid_argument("simulate: negative duration");
  if (cfg.sample_every < 1) throw std::invalid_argument("simulate: sample_every must be >= 1");
  for (size_t i = 0; i < timeline.size(); ++i) {
    if (timeline[i].t < 0.0 || timeline[i].t > cfg.duration)
      throw std::invalid_argument("simulate: event time outside [0, duration]");
    if (i > 0 && timeline[i].t < timeline[i - 1].t)
      throw std::invalid_argument("simulate: events not sorted by time");
  }
  check_state_shape(p, s, "simulate");

  Workspace w;
  const auto emit = [&](double t) {
    if (sink) {
      MetricsRecord rec = metrics(p, s, cfg.alg);
      rec.t = t;
      sink(rec);
    }
    if (state_sink) state_sink(t, s);
  };

  // Everything due at or before `when` fires as one batch, bracketed by a
  // pre and a post record.
  size_t ev = 0;
  const auto fire_due = [&](double when, double tol) {
    if (ev >= timeline.size() || timeline[ev].t > when + tol) return false;
    emit(when);
    if (segment_hook) segment_hook(p, s);
    while (ev < timeline.size() && timeline[ev].t <= when + tol) {
      apply_event(p, s, timeline[ev]);
      ++ev;
    }
    emit(when);
    return true;
  };

  const long long nsteps = std::llround(cfg.duration / cfg.dt);

  // Events scheduled at t = 0 fire before any stepping.
  if (!fire_due(0.0, 0.0)) emit(0.0);

  for (long long k = 1; k <= nsteps; ++k) {
    step_inplace(p, s, cfg.dt, cfg.alg, w);
    const double t = static_cast<double>(k) * cfg.dt;
    s.t = t;  // keep time free of accumulation drift for event matching
    const bool fired = fire_due(t, 1e-9 * std::max(1.0, t));
    if (!fired && (k % cfg.sample_every == 0 || k == nsteps)) emit(t);
  }
  if (segment_hook) segment_hook(p, s);
  return {std::move(p), std::move(s)};
}

}  // namespace dra
