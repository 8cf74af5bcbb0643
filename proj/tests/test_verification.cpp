#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dra/rng.hpp"
#include "dra/verification.hpp"
#include "helpers.hpp"

using namespace dra;
using namespace dra::testing;

namespace {

ProblemInstance symmetric_pair() {
  ProblemInstance p;
  p.m = 1;
  p.agents.emplace_back(1, Objective::quadratic_scalar(1, 0, 0), Vec{1.0}, ConvexSet::full_space(1));
  p.agents.emplace_back(2, Objective::quadratic_scalar(1, 0, 0), Vec{1.0}, ConvexSet::full_space(1));
  p.graph = Graph::from_edges(2, {{0, 1}});
  return p;
}

// Minimal standalone bisection for m=1 quadratic/box instances; kept separate
// from the library path so oracle results have an independent witness.
double reference_price(const ProblemInstance& p, double lo, double hi) {
  const auto supply = [&](double price) {
    double s = 0.0;
    for (const auto& a : p.agents) {
      double x = (price - a.objective.quad_b()) / (2.0 * a.objective.quad_a());
      if (a.feasible_set.kind() == ConvexSet::Kind::Box)
        x = std::clamp(x, a.feasible_set.lower()[0], a.feasible_set.upper()[0]);
      s += x;
    }
    return s;
  };
  const double target = total_resource(p)[0];
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (supply(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("kkt_residual: named examples") {
  const ProblemInstance p = symmetric_pair();
  CHECK(kkt_residual(p, {1.0, 1.0}, {2.0}) == 0.0);
  CHECK(kkt_residual(p, {1.0, 1.0}, {0.0}) == 2.0);  // stationarity term |P(x-grad)-x|

  ProblemInstance boxed = p;
  boxed.agents[0] = AgentSpec(1, Objective::quadratic_scalar(1, 0, 0), Vec{1.0},
                              ConvexSet::box({0.0}, {2.0}));
  CHECK_THROWS_AS(kkt_residual(boxed, {5.0, 1.0}, {2.0}), std::domain_error);
}

TEST_CASE("oracle_solve: closed forms") {
  // Symmetric pair: X* = (1,1), lambda* = 2.
  const OracleSolution sym = oracle_solve(symmetric_pair(), 1e-10);
  CHECK(sym.x_star[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sym.x_star[1] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sym.lambda_star[0] == doctest::Approx(2.0).epsilon(1e-8));

  // f1 = x^2, f2 = 2x^2, sum d = 3: equal marginals 2 x1 = 4 x2 with
  // x1 + x2 = 3 give X* = (2, 1), lambda* = 4.
  ProblemInstance p;
  p.m = 1;
  p.agents.emplace_back(1, Objective::quadratic_scalar(1, 0, 0), Vec{1.5}, ConvexSet::full_space(1));
  p.agents.emplace_back(2, Objective::quadratic_scalar(2, 0, 0), Vec{1.5}, ConvexSet::full_space(1));
  p.graph = Graph::from_edges(2, {{0, 1}});
  const OracleSolution sol = oracle_solve(p, 1e-10);
  CHECK(sol.x_star[0] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(sol.x_star[1] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(sol.lambda_star[0] == doctest::Approx(4.0).epsilon(1e-8));
  CHECK(sol.lambda_star[0] ==
        doctest::Approx(reference_price(p, -100, 100)).epsilon(1e-8));  // independent bisection
}

TEST_CASE("oracle_solve: active bounds carry a zero normal-cone residual") {
  // f1 = x^2, f2 = x^2, d sums to 4, agent 2 capped at 1: X* = (3, 1),
  // lambda* = 6, and -grad f2 + lambda* = 4 >= 0 is normal at the upper bound.
  ProblemInstance p;
  p.m = 1;
  p.agents.emplace_back(1, Objective::quadratic_scalar(1, 0, 0), Vec{2.0}, ConvexSet::full_space(1));
  p.agents.emplace_back(2, Objective::quadratic_scalar(1, 0, 0), Vec{2.0}, ConvexSet::box({0.0}, {1.0}));
  p.graph = Graph::from_edges(2, {{0, 1}});
  const OracleSolution sol = oracle_solve(p, 1e-10);
  CHECK(sol.x_star[0] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(sol.x_star[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(sol.lambda_star[0] == doctest::Approx(6.0).epsilon(1e-9));
  const double residual = p.agents[1].feasible_set.normal_residual(
      Vec{sol.x_star[1]}, Vec{sol.lambda_star[0] - 2.0 * sol.x_star[1]});
  CHECK(residual == 0.0);
  CHECK(kkt_residual(p, sol.x_star, sol.lambda_star) <= 1e-10);
}

TEST_CASE("oracle_solve: random boxed instances satisfy their own KKT test") {
  SplitMix64 rng(31337);
  for (int trial = 0; trial < 40; ++trial) {
    const ProblemInstance p = random_dispatch_problem(rng, 3, 9);
    const double tol = 1e-8;
    const OracleSolution sol = oracle_solve(p, tol);
    CHECK(kkt_residual(p, sol.x_star, sol.lambda_star) <= tol);
    for (int i = 0; i < p.n(); ++i)
      CHECK(p.agents[i].feasible_set.contains({sol.x_star.begin() + i, size_t(1)}, 1e-12));
    // Independent bisection agrees on the clearing price.
    CHECK(sol.lambda_star[0] ==
          doctest::Approx(reference_price(p, -1000, 1000)).epsilon(1e-6));
  }
}

TEST_CASE("oracle_solve: general path (m=2) against a hand-solvable instance") {
  // f_i(x) = ||x - t_i||^2 over the full space: the optimum shifts every
  // target by the same vector, x_i* = t_i + (sum d - sum t)/n.
  const std::vector<Vec> targets = {{1.0, -2.0}, {3.0, 0.5}, {-1.0, 1.0}};
  ProblemInstance p;
  p.m = 2;
  for (int i = 0; i < 3; ++i) {
    const Vec t = targets[i];
    p.agents.emplace_back(
        i + 1,
        Objective::custom(
            2,
            [t](std::span<const double> x) {
              return (x[0] - t[0]) * (x[0] - t[0]) + (x[1] - t[1]) * (x[1] - t[1]);
            },
            [t](std::span<const double> x) {
              return Vec{2.0 * (x[0] - t[0]), 2.0 * (x[1] - t[1])};
            },
            2.0, 2.0),
        Vec{1.0, 1.0}, ConvexSet::full_space(2));
  }
  p.graph = ring_with_chords(3, {});
  const OracleSolution sol = oracle_solve(p, 1e-9);
  const Vec shift = {(3.0 - 3.0) / 3.0, (3.0 + 0.5) / 3.0};  // (sum d - sum t)/n
  for (int i = 0; i < 3; ++i) {
    CHECK(sol.x_star[2 * i] == doctest::Approx(targets[i][0] + shift[0]).epsilon(1e-6));
    CHECK(sol.x_star[2 * i + 1] == doctest::Approx(targets[i][1] + shift[1]).epsilon(1e-6));
  }
  CHECK(sol.lambda_star[0] == doctest::Approx(2.0 * shift[0]).epsilon(1e-6));
  CHECK(sol.lambda_star[1] == doctest::Approx(2.0 * shift[1]).epsilon(1e-6));
}

TEST_CASE("oracle_solve: exact 2-D inner solves match the projected-gradient route") {
  // Same instance twice: once with the native coupled quadratic (exact face
  // enumeration / trust-region inner solves), once with custom callbacks
  // computing the same function (accelerated projected-gradient inner
  // solves). Equal soft directions keep the dual well conditioned.
  const auto coupled_value = [](double a1, double a2) {
    return [a1, a2](std::span<const double> x) {
      const double u = x[0] + a1 * x[1];
      return u * u + x[0] + a2 * x[1] + 0.001 * (x[0] * x[0] + x[1] * x[1]);
    };
  };
  const auto coupled_grad = [](double a1, double a2) {
    return [a1, a2](std::span<const double> x) {
      const double u = x[0] + a1 * x[1];
      return Vec{2.0 * u + 1.0 + 0.002 * x[0], 2.0 * a1 * u + a2 + 0.002 * x[1]};
    };
  };

  const std::vector<ConvexSet> sets = {
      ConvexSet::ball({0.5, -0.5}, 1.5),
      ConvexSet::polyhedron({{{1.0, 1.0}, 1.0}, {{-1.0, 0.0}, 2.0}, {{0.0, -1.0}, 2.0}},
                            {-0.5, -0.5}),
      ConvexSet::box({-2.0, -2.0}, {0.5, 1.0}),
  };
  const double a1 = 1.0;
  for (const auto& set : sets) {
    ProblemInstance exact;
    exact.m = 2;
    exact.agents.emplace_back(1, Objective::coupled_quadratic_2d(a1, 0.5), Vec{0.3, -0.2}, set);
    exact.agents.emplace_back(2, Objective::coupled_quadratic_2d(a1, -1.0), Vec{-0.4, 0.6},
                              ConvexSet::full_space(2));
    exact.graph = Graph::from_edges(2, {{0, 1}});

    ProblemInstance pg = exact;
    const double lip = 2.0 * (1.0 + a1 * a1) + 0.002;
    pg.agents[0] = AgentSpec(1, Objective::custom(2, coupled_value(a1, 0.5), coupled_grad(a1, 0.5),
                                                  0.002, lip),
                             Vec{0.3, -0.2}, set);
    pg.agents[1] = AgentSpec(2, Objective::custom(2, coupled_value(a1, -1.0), coupled_grad(a1, -1.0),
                                                  0.002, lip),
                             Vec{-0.4, 0.6}, ConvexSet::full_space(2));

    const OracleSolution via_exact = oracle_solve(exact, 1e-8);
    CHECK(kkt_residual(exact, via_exact.x_star, via_exact.lambda_star) <= 1e-8);

    const OracleSolution via_pg = oracle_solve(pg, 1e-6);
    for (size_t k = 0; k < via_exact.x_star.size(); ++k)
      CHECK(via_exact.x_star[k] == doctest::Approx(via_pg.x_star[k]).epsilon(1e-4));
    for (int k = 0; k < 2; ++k)
      CHECK(via_exact.lambda_star[k] == doctest::Approx(via_pg.lambda_star[k]).epsilon(1e-4));
  }
}

TEST_CASE("oracle_solve: infeasible aggregate demand is reported") {
  ProblemInstance p;
  p.m = 1;
  p.agents.emplace_back(1, Objective::quadratic_scalar(1, 0, 0), Vec{10.0}, ConvexSet::box({0.0}, {1.0}));
  p.agents.emplace_back(2, Objective::quadratic_scalar(1, 0, 0), Vec{10.0}, ConvexSet::box({0.0}, {1.0}));
  p.graph = Graph::from_edges(2, {{0, 1}});
  CHECK_THROWS_AS(oracle_solve(p, 1e-8), std::runtime_error);
}

TEST_CASE("rate_bound: frozen value and monotonicity") {
  // Hand evaluation: first branch 2*2/(8+12+4) = 1/6; second branch
  // 4*4*2 / ((3+8+4+12)*4 + 36 + 3*sqrt(25) + 3) = 32/162 = 0.1975...;
  // the minimum is 1/6.
  CHECK(rate_bound(2, 2, 2, 2) == doctest::Approx(1.0 / 6.0).epsilon(1e-13));

  double prev = rate_bound(1.0, 2.0, 1.0, 1.0);
  for (double lmax = 2.0; lmax < 40.0; lmax *= 1.7) {
    const double cur = rate_bound(1.0, 2.0, 1.0, lmax);
    CHECK(cur <= prev + 1e-15);
    CHECK(cur <= 2.0 * 1.0 / (8.0 + 6.0 + lmax * lmax) + 1e-15);
    prev = cur;
  }
  prev = 0.0;
  for (double l2 = 0.1; l2 < 3.0; l2 += 0.3) {
    const double cur = rate_bound(1.0, 2.0, l2, 3.0);
    CHECK(cur >= prev - 1e-15);
    prev = cur;
  }
  prev = rate_bound(1.0, 0.5, 1.0, 2.0);
  for (double lip = 1.0; lip < 30.0; lip *= 2.0) {
    const double cur = rate_bound(1.0, lip, 1.0, 2.0);
    CHECK(cur <= prev + 1e-15);
    prev = cur;
  }
  CHECK_THROWS_AS(rate_bound(-1, 1, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(rate_bound(1, 1, 2, 1), std::invalid_argument);
}

TEST_CASE("rate_envelope is consistent with rate_bound's second branch") {
  const auto env = rate_envelope(1.0, 3.0, 1.382, 3.618);
  CHECK(env.amplitude >= 1.0);
  CHECK(env.exact_rate > 0.0);
  // When the second branch of the closed form attains the minimum it equals
  // the exact Lyapunov rate for the remark's parameter choice.
  const double rho = rate_bound(1.0, 3.0, 1.382, 3.618);
  CHECK(rho <= env.exact_rate + 1e-12);
}

TEST_CASE("transformed_deviation") {
  const ProblemInstance p = symmetric_pair();
  NetworkState a(2, 1), b(2, 1);
  a.x = {1, 2};
  a.lam = {3, 4};
  a.z = {5, 6};
  b = a;
  CHECK(transformed_deviation(a, b) == 0.0);

  // A uniform shift of z is invisible (conserved direction).
  NetworkState c = a;
  c.z = {5 + 7.5, 6 + 7.5};
  CHECK(transformed_deviation(c, a) <= 1e-12);

  SplitMix64 rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    NetworkState u(3, 2), v(3, 2);
    for (auto* vec : {&u.x, &u.lam, &u.z, &v.x, &v.lam, &v.z})
      for (double& w : *vec) w = rng.uniform(-3, 3);
    const double base = transformed_deviation(u, v);
    NetworkState u2 = u, v2 = v;
    const double c1 = rng.uniform(-5, 5), c2 = rng.uniform(-5, 5);
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 2; ++k) {
        u2.z[static_cast<size_t>(i) * 2 + k] += c1 * (k == 0 ? 1 : -2);
        v2.z[static_cast<size_t>(i) * 2 + k] += c2 * (k == 0 ? 1 : -2);
      }
    CHECK(transformed_deviation(u2, v2) == doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("metrics") {
  const ProblemInstance p = symmetric_pair();
  NetworkState eq(2, 1);
  eq.x = {1, 1};
  eq.lam = {2, 2};
  const MetricsRecord at_eq = metrics(p, eq, Algorithm::Projected);
  CHECK(at_eq.balance_gap <= 1e-12);
  CHECK(at_eq.consensus_error <= 1e-12);
  CHECK(at_eq.optimality_residual <= 1e-12);
  CHECK(at_eq.kkt_residual <= 1e-12);
  CHECK(at_eq.max_infeasibility <= 1e-12);
  CHECK(at_eq.objective == doctest::Approx(2.0));

  // Consensus error vanishes exactly when the multipliers agree.
  SplitMix64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    NetworkState s(2, 1);
    const double lam = rng.uniform(-10, 10);
    s.x = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
    s.lam = {lam, lam};
    s.z = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
    CHECK(metrics(p, s, Algorithm::Projected).consensus_error == 0.0);
    s.lam[1] += rng.uniform(0.1, 1.0);
    CHECK(metrics(p, s, Algorithm::Projected).consensus_error > 1e-12);
  }
}

TEST_CASE("long dynamics runs land on the oracle solution") {
  SplitMix64 rng(90210);
  for (int trial = 0; trial < 3; ++trial) {
    ProblemInstance p = random_dispatch_problem(rng, 3, 6);
    const OracleSolution sol = oracle_solve(p, 1e-8);
    NetworkState s = initialize(p, InitPolicy::random(rng.next_u64()));
    Workspace w;
    const Algorithm alg = trial % 2 ? Algorithm::DiffProjected : Algorithm::Projected;
    for (int k = 0; k < 120000; ++k) step_inplace(p, s, 0.005, alg, w);
    for (int i = 0; i < p.n(); ++i)
      CHECK(std::abs(s.x[i] - sol.x_star[i]) <= 1e-3);
  }
}
