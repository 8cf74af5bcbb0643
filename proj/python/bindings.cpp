#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dra/scenario.hpp"
#include "dra/verification.hpp"

namespace py = pybind11;
using namespace dra;

namespace {

py::array_t<double> state_matrix(const Vec& flat, int n, int m) {
  py::array_t<double> arr({n, m});
  std::copy(flat.begin(), flat.end(), arr.mutable_data());
  return arr;
}

Vec flatten(py::array_t<double, py::array::c_style | py::array::forcecast> arr) {
  return Vec(arr.data(), arr.data() + arr.size());
}

Objective make_custom(int dim, py::function value, py::function gradient, double modulus,
                      double gradient_lipschitz) {
  auto value_fn = [value](std::span<const double> x) {
    return value(py::cast(Vec(x.begin(), x.end()))).cast<double>();
  };
  auto grad_fn = [gradient](std::span<const double> x) {
    return gradient(py::cast(Vec(x.begin(), x.end()))).cast<Vec>();
  };
  return Objective::custom(dim, value_fn, grad_fn, modulus, gradient_lipschitz);
}

InitPolicy policy_from(const std::string& name, std::uint64_t seed, py::object x0) {
  if (name == "zeros") return InitPolicy::zeros();
  if (name == "random") return InitPolicy::random(seed);
  if (name == "given") {
    if (x0.is_none()) throw std::invalid_argument("policy 'given' needs x0");
    return InitPolicy::given(flatten(x0.cast<py::array_t<double>>()));
  }
  throw std::invalid_argument("unknown init policy '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Distributed resource allocation dynamics: projected algorithms, "
            "verification oracle, and scenario runner";

  py::class_<ConvexSet>(m, "ConvexSet")
      .def_static("full_space", &ConvexSet::full_space, py::arg("dim"))
      .def_static("box", &ConvexSet::box, py::arg("lo"), py::arg("hi"))
      .def_static("ball", &ConvexSet::ball, py::arg("center"), py::arg("radius"))
      .def_static(
          "polyhedron",
          [](const std::vector<std::pair<Vec, double>>& halfspaces, Vec interior) {
            std::vector<Halfspace> hs;
            for (const auto& [a, b] : halfspaces) hs.push_back({a, b});
            return ConvexSet::polyhedron(std::move(hs), std::move(interior));
          },
          py::arg("halfspaces"), py::arg("interior"))
      .def_property_readonly("dim", &ConvexSet::dim)
      .def("contains",
           [](const ConvexSet& s, const Vec& x, double tol) { return s.contains(x, tol); },
           py::arg("x"), py::arg("tol") = 0.0)
      .def("project", [](const ConvexSet& s, const Vec& x) { return s.project(x); }, py::arg("x"))
      .def("tangent_project",
           [](const ConvexSet& s, const Vec& x, const Vec& v) { return s.tangent_project(x, v); },
           py::arg("x"), py::arg("v"))
      .def("normal_residual",
           [](const ConvexSet& s, const Vec& x, const Vec& v) { return s.normal_residual(x, v); },
           py::arg("x"), py::arg("v"))
      .def("distance", [](const ConvexSet& s, const Vec& x) { return s.distance(x); }, py::arg("x"));

  py::class_<Graph>(m, "Graph")
      .def_static("from_edges", &Graph::from_edges, py::arg("n"), py::arg("edges"))
      .def_readonly("n", &Graph::n)
      .def_readonly("edges", &Graph::edges);
  m.def("is_connected", &is_connected);
  m.def("ring_with_chords", &ring_with_chords, py::arg("n"),
        py::arg("chords") = std::vector<std::pair<int, int>>{});
  m.def("random_connected_graph", &random_connected_graph, py::arg("n"), py::arg("p"), py::arg("seed"));
  m.def("random_graph_bridged", &random_graph_bridged, py::arg("n"), py::arg("p"), py::arg("seed"));
  m.def("laplacian", [](const Graph& g) {
    const Mat l = laplacian(g);
    py::array_t<double> arr({g.n, g.n});
    std::copy(l.data().begin(), l.data().end(), arr.mutable_data());
    return arr;
  });
  m.def("eigen_extremes", [](const Graph& g) {
    const auto e = eigen_extremes(g);
    return py::make_tuple(e.lambda2, e.lambda_max);
  });

  py::class_<Objective>(m, "Objective")
      .def_static("quadratic_scalar", &Objective::quadratic_scalar, py::arg("a"), py::arg("b"),
                  py::arg("c"))
      .def_static("coupled_quadratic_2d", &Objective::coupled_quadratic_2d, py::arg("a1"),
                  py::arg("a2"))
      .def_static("custom", &make_custom, py::arg("dim"), py::arg("value"), py::arg("gradient"),
                  py::arg("modulus"), py::arg("gradient_lipschitz"))
      .def_property_readonly("dim", &Objective::dim)
      .def("value", [](const Objective& o, const Vec& x) { return o.value(x); }, py::arg("x"))
      .def("gradient", [](const Objective& o, const Vec& x) { return o.gradient(x); }, py::arg("x"))
      .def("strong_convexity_modulus", &Objective::strong_convexity_modulus)
      .def("gradient_lipschitz", &Objective::gradient_lipschitz);

  py::class_<AgentSpec>(m, "AgentSpec")
      .def(py::init<int, Objective, Vec, ConvexSet>(), py::arg("id"), py::arg("objective"),
           py::arg("d"), py::arg("set"))
      .def_readonly("id", &AgentSpec::id)
      .def_readonly("d", &AgentSpec::resource);

  py::class_<ProblemInstance>(m, "ProblemInstance")
      .def(py::init([](int m_, std::vector<AgentSpec> agents, Graph g) {
             ProblemInstance p;
             p.m = m_;
             p.agents = std::move(agents);
             p.graph = std::move(g);
             return p;
           }),
           py::arg("m"), py::arg("agents"), py::arg("graph"))
      .def_readonly("m", &ProblemInstance::m)
      .def_property_readonly("n", &ProblemInstance::n)
      .def_readonly("graph", &ProblemInstance::graph);
  m.def("total_resource", &total_resource);
  m.def("validate", &validate);

  py::enum_<Algorithm>(m, "Algorithm")
      .value("PROJECTED", Algorithm::Projected)
      .value("DIFF_PROJECTED", Algorithm::DiffProjected);

  py::class_<NetworkState>(m, "NetworkState")
      .def_readonly("n", &NetworkState::n)
      .def_readonly("m", &NetworkState::m)
      .def_readonly("t", &NetworkState::t)
      .def_property_readonly("x", [](const NetworkState& s) { return state_matrix(s.x, s.n, s.m); })
      .def_property_readonly("lam",
                             [](const NetworkState& s) { return state_matrix(s.lam, s.n, s.m); })
      .def_property_readonly("z", [](const NetworkState& s) { return state_matrix(s.z, s.n, s.m); });

  m.def(
      "initialize",
      [](const ProblemInstance& p, const std::string& policy, std::uint64_t seed, py::object x0) {
        return initialize(p, policy_from(policy, seed, x0));
      },
      py::arg("problem"), py::arg("policy") = "zeros", py::arg("seed") = 0,
      py::arg("x0") = py::none());
  m.def("step", &step, py::arg("problem"), py::arg("state"), py::arg("dt"), py::arg("alg"));

  py::class_<MetricsRecord>(m, "MetricsRecord")
      .def_readonly("t", &MetricsRecord::t)
      .def_readonly("balance_gap", &MetricsRecord::balance_gap)
      .def_readonly("consensus_error", &MetricsRecord::consensus_error)
      .def_readonly("optimality_residual", &MetricsRecord::optimality_residual)
      .def_readonly("kkt_residual", &MetricsRecord::kkt_residual)
      .def_readonly("objective", &MetricsRecord::objective)
      .def_readonly("max_infeasibility", &MetricsRecord::max_infeasibility)
      .def("__repr__", [](const MetricsRecord& r) {
        return "MetricsRecord(t=" + std::to_string(r.t) +
               ", balance_gap=" + std::to_string(r.balance_gap) +
               ", kkt_residual=" + std::to_string(r.kkt_residual) + ")";
      });

  m.def("metrics", &metrics, py::arg("problem"), py::arg("state"), py::arg("alg"));
  m.def(
      "kkt_residual",
      [](const ProblemInstance& p, py::array_t<double> x, const Vec& lam) {
        return kkt_residual(p, flatten(x), lam);
      },
      py::arg("problem"), py::arg("x"), py::arg("lambda_bar"));

  py::class_<OracleSolution>(m, "OracleSolution")
      .def_readonly("lambda_star", &OracleSolution::lambda_star)
      .def_readonly("dual_gap_estimate", &OracleSolution::dual_gap_estimate)
      .def_property_readonly("x_star", [](const OracleSolution& s) { return s.x_star; });
  m.def("oracle_solve", &oracle_solve, py::arg("problem"), py::arg("tol") = 1e-8);

  m.def("rate_bound", &rate_bound, py::arg("mu_min"), py::arg("lip_max"), py::arg("lambda2"),
        py::arg("lambda_max"));
  m.def("transformed_deviation", &transformed_deviation, py::arg("state"), py::arg("reference"));

  py::class_<SimulateConfig>(m, "SimulateConfig")
      .def(py::init([](double dt, double duration, Algorithm alg, int sample_every) {
             return SimulateConfig{dt, duration, alg, sample_every};
           }),
           py::arg("dt") = 0.01, py::arg("duration") = 0.0,
           py::arg("alg") = Algorithm::Projected, py::arg("sample_every") = 100)
      .def_readwrite("dt", &SimulateConfig::dt)
      .def_readwrite("duration", &SimulateConfig::duration)
      .def_readwrite("alg", &SimulateConfig::alg)
      .def_readwrite("sample_every", &SimulateConfig::sample_every);

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("problem", &Scenario::problem)
      .def_readonly("seed", &Scenario::seed)
      .def_readwrite("integrator", &Scenario::integrator)
      .def_property_readonly("num_events", [](const Scenario& s) { return s.timeline.size(); });

  m.def("builtin_example1", &builtin_example1);
  m.def("builtin_dispatch", &builtin_dispatch, py::arg("seed"));
  m.def("builtin_scale", &builtin_scale, py::arg("n") = 1000, py::arg("periods") = 4, py::arg("seed") = 1);
  m.def("parse_scenario", &parse_scenario, py::arg("json_text"));
  m.def("serialize_scenario", &serialize_scenario, py::arg("scenario"));

  m.def(
      "simulate",
      [](const ProblemInstance& p, const NetworkState& s0, const SimulateConfig& cfg) {
        std::vector<MetricsRecord> records;
        auto [pf, sf] = simulate(p, s0, {}, cfg, [&](const MetricsRecord& r) { records.push_back(r); });
        return py::make_tuple(sf, records);
      },
      py::arg("problem"), py::arg("state"), py::arg("cfg"),
      "Integrate without events; returns (final_state, metrics_records)");

  m.def(
      "run_scenario",
      [](const Scenario& sc) {
        std::vector<MetricsRecord> records;
        NetworkState s0 = initialize(sc.problem, sc.init);
        auto [pf, sf] = simulate(sc.problem, s0, sc.timeline, sc.integrator,
                                 [&](const MetricsRecord& r) { records.push_back(r); });
        return py::make_tuple(sf, records);
      },
      py::arg("scenario"), "Initialize and integrate a scenario; returns (final_state, metrics_records)");
}
