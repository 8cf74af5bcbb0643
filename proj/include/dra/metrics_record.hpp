#pragma once

namespace dra {

// Per-sample diagnostics along a trajectory.
struct MetricsRecord {
  double t = 0.0;
  double balance_gap = 0.0;          // || sum d - sum x ||_2
  double consensus_error = 0.0;      // || (L (x) I_m) Lambda ||_2
  double optimality_residual = 0.0;  // ||dX||^2 + ||dLambda||^2 + ||dZ||^2
  double kkt_residual = 0.0;         // stationarity + balance, inf-norms
  double objective = 0.0;            // sum_i f_i(x_i)
  double max_infeasibility = 0.0;    // max_i dist(x_i, Omega_i)
};

}  // namespace dra
