#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crbt/problem.hpp"
#include "crbt/vector.hpp"

namespace crbt {

// Verdict of the step-size / accuracy conditions for the composite problem
// with constants (rho, L_g, mu).  valid is true iff every applicable
// inequality holds; violated_conditions names the failures.
struct ParamReport {
  double eps_bound = 0.0;           // strict upper bound on eps
  double alpha_lower = 0.0;         // 2 eps (rho+1) / (mu^2 - 2 eps (rho+1))
  double alpha_upper = 0.0;         // min{1/L_g, 1/(rho+1)}
  double exact_alpha_upper = 0.0;   // min{1/L_g, 1/rho}
  double descent_alpha_upper = 0.0; // 2/(rho+L_g), strict-descent regime
  bool valid = false;
  std::vector<std::string> violated_conditions;
};

// Throws std::invalid_argument for nonpositive rho or L_g, negative eps, or
// eps > 0 without a positive sharpness constant mu.  mu is ignored when
// eps == 0 (eps_bound is then reported as NaN if mu <= 0).
ParamReport validate_parameters(double rho, double lipschitz_g, double mu,
                                double alpha, double eps);

// One forward-backward step: prox of f at x - alpha * grad g(x).
ProxResult fb_step(const Vector& x, double alpha,
                   const std::function<Vector(const Vector&)>& g_gradient,
                   const ProxOracle& f_prox);

struct SolverConfig {
  double alpha = 0.1;
  double eps = 0.0;
  long max_iterations = 1000;
  double step_tolerance = 1e-10;  // negative disables the step stop
  double dist_tolerance = -1.0;   // negative disables the distance stop
  FbMode mode = FbMode::exact;
  bool log_distances = true;
  bool skip_validation = false;   // run anyway; recorded in the trajectory
};

struct TrajectoryRecord {
  long t = 0;
  std::uint64_t x_hash = 0;
  double objective = 0.0;
  double f_value = 0.0;
  double g_value = 0.0;
  double step_norm = 0.0;   // NaN at t = 0
  double dist_to_s = 0.0;   // NaN when no solution projector / not logged
  double zeta = 0.0;        // NaN when unavailable
  int certificate_ok = -1;  // -1 no certificate, 0 failed, 1 satisfied
  bool descent_violation = false;
};

enum class SolverStatus { converged_step, converged_dist, max_iterations, failed };

const char* status_name(SolverStatus s);

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  Vector final_x;
  SolverStatus status = SolverStatus::max_iterations;
  std::string message;
  bool validation_overridden = false;
  long descent_violations = 0;
  double alpha = 0.0;
  double eps = 0.0;
  FbMode mode = FbMode::exact;
};

// Runs the forward-backward iteration from x0.  Parameters are checked with
// validate_parameters first unless config.skip_validation is set (the
// override is recorded).  Descent is monitored every step: in exact mode
// with 2/alpha > rho + L_g the objective must not increase by more than
// 1e-12; in inexact mode the allowed increase is
// eps + sqrt(2 eps / alpha) * step_norm + 1e-12.  Oracle failures truncate
// the trajectory with status failed.
Trajectory run_fb(const CompositeProblem& problem, const Vector& x0,
                  const SolverConfig& config);

// CSV export: header t,objective,f_value,g_value,step_norm,dist_to_S,zeta
// with empty cells for unavailable values and 17-significant-digit floats.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

// Reads the CSV back (x_hash and certificate fields are not serialized);
// lines starting with '#' are skipped.
std::vector<TrajectoryRecord> read_trajectory_csv(const std::string& path);

}  // namespace crbt
