#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "dra/events.hpp"
#include "dra/metrics_record.hpp"
#include "dra/problem.hpp"

namespace dra {

enum class Algorithm { Projected, DiffProjected };

// Stacked algorithm state: allocations X, local multipliers Lambda, integral
// variables Z, each n x m flat row-major (agent-major).
struct NetworkState {
  int n = 0, m = 0;
  Vec x, lam, z;
  double t = 0.0;

  NetworkState() = default;
  NetworkState(int n_, int m_)
      : n(n_), m(m_), x(static_cast<size_t>(n_) * m_, 0.0), lam(x.size(), 0.0), z(x.size(), 0.0) {}

  std::span<double> x_row(int i) { return {x.data() + static_cast<size_t>(i) * m, static_cast<size_t>(m)}; }
  std::span<const double> x_row(int i) const {
    return {x.data() + static_cast<size_t>(i) * m, static_cast<size_t>(m)};
  }
  std::span<double> lam_row(int i) { return {lam.data() + static_cast<size_t>(i) * m, static_cast<size_t>(m)}; }
  std::span<const double> lam_row(int i) const {
    return {lam.data() + static_cast<size_t>(i) * m, static_cast<size_t>(m)};
  }
};

struct StateDerivative {
  Vec dx, dlam, dz;

  void resize(size_t len) {
    dx.assign(len, 0.0);
    dlam.assign(len, 0.0);
    dz.assign(len, 0.0);
  }
};

// Scratch buffers reused across steps so the integrator loop is allocation-free.
struct Workspace {
  StateDerivative deriv;
  Vec grad, dir, arg, proj;
};

// Vector field of the projected algorithm:
//   dx_i   = P_{Omega_i}(x_i - grad f_i(x_i) + lam_i) - x_i
//   dlam_i = -sum_{j in N_i}(lam_i - lam_j) - sum_{j in N_i}(z_i - z_j) + (d_i - x_i)
//   dz_i   =  sum_{j in N_i}(lam_i - lam_j)
void field_projected(const ProblemInstance& p, const NetworkState& s, StateDerivative& out,
                     Workspace& w);

// Differentiated variant: dx_i = Pi_{Omega_i}(x_i, -grad f_i(x_i) + lam_i);
// multiplier and integral dynamics are identical. On 1-D boxes the x update
// reduces to the bound clamp.
void field_diff_projected(const ProblemInstance& p, const NetworkState& s, StateDerivative& out,
                          Workspace& w);

void compute_field(const ProblemInstance& p, const NetworkState& s, Algorithm alg,
                   StateDerivative& out, Workspace& w);

// One explicit Euler step followed by re-projection of every x_i onto its
// set (the continuous-time invariance does not survive discretization).
// Throws if the state leaves [-1e12, 1e12] or turns non-finite.
void step_inplace(const ProblemInstance& p, NetworkState& s, double dt, Algorithm alg, Workspace& w);
NetworkState step(const ProblemInstance& p, const NetworkState& s, double dt, Algorithm alg);

struct InitPolicy {
  enum class Kind { Zeros, Random, Given };
  Kind kind = Kind::Zeros;
  std::uint64_t seed = 0;
  Vec x0;  // Given: n*m flat

  static InitPolicy zeros() { return {}; }
  static InitPolicy random(std::uint64_t seed) { return {Kind::Random, seed, {}}; }
  static InitPolicy given(Vec x0) { return {Kind::Given, 0, std::move(x0)}; }
};

// Lambda = Z = 0; each x_i is drawn per policy and locally projected onto its
// own set. No coordination: sum x_i(0) need not equal sum d_i.
NetworkState initialize(const ProblemInstance& p, const InitPolicy& policy);

// Applies one reconfiguration in place. The post-event graph must be
// connected and referenced ids must exist; otherwise throws and leaves
// inputs unchanged only for validation failures detected up front.
void apply_event(ProblemInstance& p, NetworkState& s, const Event& e);

struct SimulateConfig {
  double dt = 0.01;
  double duration = 0.0;
  Algorithm alg = Algorithm::Projected;
  int sample_every = 100;
};

using MetricsSink = std::function<void(const MetricsRecord&)>;

// Receives the live state at every emission point (for trajectory capture).
using StateSink = std::function<void(double t, const NetworkState&)>;

// Observes the state at segment boundaries: right before each event batch
// applies, and once at the end of the run.
using SegmentHook = std::function<void(const ProblemInstance&, const NetworkState&)>;

// Integrates over [0, duration], applying timeline events after the step that
// reaches their timestamp (events at t = 0 fire before the first step;
// simultaneous events apply in list order). Emits a record at t = 0, every
// sample_every-th step, immediately before and after each event batch, and at
// the end. Deterministic for fixed inputs.
std::pair<ProblemInstance, NetworkState> simulate(ProblemInstance p, NetworkState s,
                                                  std::vector<Event> timeline,
                                                  const SimulateConfig& cfg,
                                                  const MetricsSink& sink,
                                                  const SegmentHook& segment_hook = nullptr,
                                                  const StateSink& state_sink = nullptr);

}  // namespace dra
