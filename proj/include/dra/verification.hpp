#pragma once

#include "dra/dynamics.hpp"
#include "dra/metrics_record.hpp"
#include "dra/problem.hpp"

namespace dra {

// Combined optimality test for a candidate primal point and a single shared
// multiplier: the inf-norm of the projection fixed-point residual
// P_{Omega_i}(x_i - grad f_i(x_i) + lambda) - x_i over agents, maxed with the
// inf-norm balance violation ||sum d - sum x||. Zero exactly at KKT points.
// Requires every x_i feasible (tolerance 1e-9).
double kkt_residual(const ProblemInstance& p, const Vec& x_flat, const Vec& lambda_bar);

struct OracleSolution {
  Vec x_star;             // n*m flat
  Vec lambda_star;        // m
  double dual_gap_estimate = 0.0;
};

// Independent centralized solution of the allocation problem, used to verify
// the distributed dynamics. m = 1 with box/full-space sets and scalar
// quadratic costs solves by bisection on the shared marginal price
// (water-filling); everything else runs dual gradient ascent with per-agent
// projected-gradient inner solves. Shares only the projection primitive with
// the rest of the library, nothing from the dynamics engine.
OracleSolution oracle_solve(const ProblemInstance& p, double tol);

// Closed-form lower estimate of the exponential convergence rate of the
// differentiated algorithm without local constraints:
//   rho = min{ 2 l2 / (8 + 6 l2 + lmax^2),
//              4 l2^2 mu / ((3 + 2 lmax^2 + M^2 + 6 mu) l2^2
//                           + 9 mu l2 + 3 sqrt(6 mu l2 + 1) + 3) }
// with mu = min_i strong-convexity modulus, M = max_i gradient Lipschitz
// constant, and (l2, lmax) the extreme nonzero Laplacian eigenvalues.
double rate_bound(double mu_min, double lip_max, double lambda2, double lambda_max);

// The Lyapunov parameters behind rate_bound: epsilon maximizes the second
// branch, gamma = (3 eps + 1) / (2 l2), alpha the stated maximum. `amplitude`
// is the envelope prefactor sqrt((alpha + 3 gamma + 4 eps) / alpha) and
// `exact_rate` = 2 eps / (alpha + 3 gamma + 4 eps).
struct RateEnvelope {
  double alpha, gamma, epsilon;
  double amplitude;
  double exact_rate;
};
RateEnvelope rate_envelope(double mu_min, double lip_max, double lambda2, double lambda_max);

// Norm of the deviation from a reference point in the decomposed coordinates:
// allocation and multiplier deviations enter whole, the integral-variable
// deviation enters with its per-dimension mean over agents removed (that
// component is a conserved quantity of the flow).
double transformed_deviation(const NetworkState& s, const NetworkState& ref);

// Full per-sample diagnostics for a running state; the shared multiplier for
// the KKT term is the mean of the local multipliers.
MetricsRecord metrics(const ProblemInstance& p, const NetworkState& s, Algorithm alg);

}  // namespace dra
