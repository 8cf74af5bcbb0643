#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dra/dynamics.hpp"
#include "dra/events.hpp"
#include "dra/problem.hpp"

namespace dra {

struct OutputSpec {
  std::string metrics_path;              // empty = caller decides
  std::string trajectory_path;           // empty = no trajectory
  bool oracle_check = false;
  double oracle_tol = 1e-3;
};

// A complete experiment: problem, reconfiguration timeline, integrator
// settings, seed, and output routing. Serializable to the documented JSON
// schema (docs/scenario_schema.json).
struct Scenario {
  ProblemInstance problem;
  std::vector<Event> timeline;
  SimulateConfig integrator;
  std::uint64_t seed = 0;
  InitPolicy init = InitPolicy::random(0);
  OutputSpec outputs;
};

// Parses and validates a scenario document; throws std::invalid_argument with
// a field-path diagnostic on schema violations, unsorted events, events
// outside [0, duration], or a disconnected initial graph.
Scenario parse_scenario(const std::string& json_text);

// Canonical JSON form; parse_scenario(serialize_scenario(s)) is structurally
// identical to s.
std::string serialize_scenario(const Scenario& s);

// The 4-agent, m = 2 reference scenario: coupled quadratic costs, one ball,
// one polyhedron and two box sets on a ring, with parameter switches at
// t = 600 and t = 1200 over a duration of 1800.
Scenario builtin_example1();

// 54-generator single-dimension dispatch on a ring with five chords. Seeded
// coefficient draws inside the documented ranges; timeline of load, capacity
// and cost changes plus a leave (ids 2, 3) and a rejoin (id 3) at t = 100..500.
Scenario builtin_dispatch(std::uint64_t seed);

// Two-group network of n control areas (n even, default 1000) over `periods`
// periods of 80 time units. Each period starts by swapping in a fresh sparse
// random graph and re-drawing loads from a 96-point daily curve; 10% of the
// renewable group perturbs costs and capacities within +-20% of nominal.
Scenario builtin_scale(int n, int periods, std::uint64_t seed);

// Appends metric rows to a CSV stream. Header row required; 12 significant
// digit floats.
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRecord& rec);

std::string trajectory_csv_header(const ProblemInstance& p);
std::string trajectory_csv_row(double t, const NetworkState& s);

}  // namespace dra
