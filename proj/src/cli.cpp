#include "dra/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "dra/scenario.hpp"
#include "dra/verification.hpp"

namespace dra {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Distributed resource-allocation dynamics simulator"};
  app.name("dra-sim");

  std::string scenario_path, builtin_name, alg_name, metrics_out, trajectory_out, dump_path;
  double dt = -1.0, duration = -1.0, oracle_tol = -1.0;
  std::int64_t seed = -1;
  int sample_every = -1, scale_n = 1000, scale_periods = 4;
  bool oracle_check = false;

  app.add_option("--scenario", scenario_path, "Scenario JSON file");
  app.add_option("--builtin", builtin_name, "Builtin scenario: example1 | dispatch | scale");
  app.add_option("--alg", alg_name, "Algorithm: projected | diff-projected");
  app.add_option("--dt", dt, "Integrator step override");
  app.add_option("--duration", duration, "Duration override");
  app.add_option("--seed", seed, "Seed override");
  app.add_option("--metrics-out", metrics_out, "Metrics CSV path");
  app.add_option("--trajectory-out", trajectory_out, "Trajectory CSV path");
  app.add_option("--sample-every", sample_every, "Emit a metrics row every k steps");
  app.add_flag("--oracle-check", oracle_check, "Verify each segment against the centralized oracle");
  app.add_option("--oracle-tol", oracle_tol, "Oracle agreement tolerance (default 1e-3)");
  app.add_option("--n", scale_n, "Agent count for --builtin scale");
  app.add_option("--periods", scale_periods, "Period count for --builtin scale");
  app.add_option("--dump-scenario", dump_path, "Write the resolved scenario JSON to a file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "dra-sim: " << e.what() << "\n";
    return 2;
  }

  if (scenario_path.empty() == builtin_name.empty()) {
    std::cerr << "dra-sim: exactly one of --scenario or --builtin is required\n";
    return 2;
  }
  std::optional<Algorithm> alg_override;
  if (!alg_name.empty()) {
    if (alg_name == "projected")
      alg_override = Algorithm::Projected;
    else if (alg_name == "diff-projected" || alg_name == "diff_projected")
      alg_override = Algorithm::DiffProjected;
    else {
      std::cerr << "dra-sim: unknown algorithm '" << alg_name << "'\n";
      return 2;
    }
  }
  if (!builtin_name.empty() && builtin_name != "example1" && builtin_name != "dispatch" &&
      builtin_name != "scale") {
    std::cerr << "dra-sim: unknown builtin '" << builtin_name << "'\n";
    return 2;
  }

  try {
    Scenario sc;
    if (!builtin_name.empty()) {
      const std::uint64_t use_seed = seed >= 0 ? static_cast<std::uint64_t>(seed) : 1;
      if (builtin_name == "example1")
        sc = builtin_example1();
      else if (builtin_name == "dispatch")
        sc = builtin_dispatch(use_seed);
      else
        sc = builtin_scale(scale_n, scale_periods, use_seed);
      if (seed >= 0) sc.seed = static_cast<std::uint64_t>(seed);
    } else {
      sc = parse_scenario(read_file(scenario_path));
      if (seed >= 0) {
        sc.seed = static_cast<std::uint64_t>(seed);
        if (sc.init.kind == InitPolicy::Kind::Random) sc.init = InitPolicy::random(sc.seed);
      }
    }
    if (alg_override) sc.integrator.alg = *alg_override;
    if (dt > 0.0) sc.integrator.dt = dt;
    if (duration >= 0.0) {
      sc.integrator.duration = duration;
      // Dropping events beyond a shortened horizon keeps the override usable.
      std::erase_if(sc.timeline, [&](const Event& e) { return e.t > duration; });
    }
    if (sample_every > 0) sc.integrator.sample_every = sample_every;
    if (!metrics_out.empty()) sc.outputs.metrics_path = metrics_out;
    if (!trajectory_out.empty()) sc.outputs.trajectory_path = trajectory_out;
    if (oracle_check) sc.outputs.oracle_check = true;
    if (oracle_tol > 0.0) sc.outputs.oracle_tol = oracle_tol;
    if (sc.outputs.metrics_path.empty()) sc.outputs.metrics_path = "metrics.csv";

    if (!dump_path.empty()) {
      std::ofstream out(dump_path);
      if (!out) throw std::runtime_error("cannot write " + dump_path);
      out << serialize_scenario(sc);
    }

    const auto violations = validate(sc.problem);
    if (!violations.empty()) {
      for (const auto& v : violations) std::cerr << "dra-sim: invalid problem: " << v << "\n";
      return 1;
    }

    std::ofstream metrics_file(sc.outputs.metrics_path);
    if (!metrics_file) throw std::runtime_error("cannot write " + sc.outputs.metrics_path);
    metrics_file << metrics_csv_header();

    std::ofstream trajectory_file;
    const bool want_trajectory = !sc.outputs.trajectory_path.empty();
    if (want_trajectory) {
      trajectory_file.open(sc.outputs.trajectory_path);
      if (!trajectory_file) throw std::runtime_error("cannot write " + sc.outputs.trajectory_path);
      trajectory_file << trajectory_csv_header(sc.problem);
    }

    NetworkState state = initialize(sc.problem, sc.init);

    bool oracle_ok = true;
    int segment = 0;
    const SegmentHook hook = [&](const ProblemInstance& p, const NetworkState& s) {
      if (!sc.outputs.oracle_check) return;
      // Solve two orders tighter than the comparison, within sane limits.
      const double oracle_precision = std::clamp(sc.outputs.oracle_tol * 1e-2, 1e-8, 1e-3);
      const OracleSolution sol = oracle_solve(p, oracle_precision);
      double dev = 0.0;
      for (size_t k = 0; k < s.x.size(); ++k) dev = std::max(dev, std::abs(s.x[k] - sol.x_star[k]));
      const bool pass = dev <= sc.outputs.oracle_tol;
      oracle_ok = oracle_ok && pass;
      std::printf("oracle-check segment=%d t=%.6g max|x - x*|=%.3e tol=%.1e %s\n", segment++, s.t,
                  dev, sc.outputs.oracle_tol, pass ? "PASS" : "FAIL");
    };

    const MetricsSink sink = [&](const MetricsRecord& rec) { metrics_file << metrics_csv_row(rec); };
    // Trajectory rows piggyback on the metrics cadence.
    const StateSink state_sink = [&](double t, const NetworkState& s) {
      if (want_trajectory) trajectory_file << trajectory_csv_row(t, s);
    };

    auto [final_p, final_s] =
        simulate(sc.problem, state, sc.timeline, sc.integrator, sink, hook, state_sink);

    const MetricsRecord last = metrics(final_p, final_s, sc.integrator.alg);
    std::printf("done t=%.6g balance_gap=%.3e consensus_error=%.3e kkt_residual=%.3e -> %s\n",
                final_s.t, last.balance_gap, last.consensus_error, last.kkt_residual,
                sc.outputs.metrics_path.c_str());
    return oracle_ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "dra-sim: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace dra
