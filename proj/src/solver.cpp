#include "crbt/solver.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "crbt/diagnostics.hpp"
#include "crbt/text_io.hpp"

namespace crbt {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

ParamReport validate_parameters(double rho, double lipschitz_g, double mu,
                                double alpha, double eps) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw std::invalid_argument("validate_parameters: rho must be positive");
  if (!(lipschitz_g > 0.0) || !std::isfinite(lipschitz_g))
    throw std::invalid_argument("validate_parameters: L_g must be positive");
  if (!(eps >= 0.0) || !std::isfinite(eps))
    throw std::invalid_argument("validate_parameters: eps must be >= 0");
  if (eps > 0.0 && !(mu > 0.0))
    throw std::invalid_argument(
        "validate_parameters: inexact runs need a positive sharpness "
        "constant mu");

  ParamReport rep;
  rep.alpha_upper = std::min(1.0 / lipschitz_g, 1.0 / (rho + 1.0));
  rep.exact_alpha_upper = std::min(1.0 / lipschitz_g, 1.0 / rho);
  rep.descent_alpha_upper = 2.0 / (rho + lipschitz_g);
  rep.eps_bound = mu > 0.0
                      ? mu * mu / (2.0 * (rho + 1.0)) *
                            std::min(1.0 / (lipschitz_g + 1.0),
                                     1.0 / (rho + 2.0))
                      : kNaN;
  rep.alpha_lower = 0.0;

  if (!(alpha > 0.0))
    rep.violated_conditions.push_back("alpha must be positive");
  if (eps > 0.0) {
    if (!(eps < rep.eps_bound))
      rep.violated_conditions.push_back(
          "eps must be smaller than mu^2/(2(rho+1)) * min{1/(L_g+1), "
          "1/(rho+2)}");
    const double denom = mu * mu - 2.0 * eps * (rho + 1.0);
    if (denom > 0.0) {
      rep.alpha_lower = 2.0 * eps * (rho + 1.0) / denom;
      if (alpha < rep.alpha_lower)
        rep.violated_conditions.push_back(
            "alpha must be at least 2 eps (rho+1)/(mu^2 - 2 eps (rho+1))");
    } else {
      rep.alpha_lower = std::numeric_limits<double>::infinity();
      rep.violated_conditions.push_back(
          "mu^2 - 2 eps (rho+1) must be positive");
    }
  }
  if (!(alpha < rep.alpha_upper))
    rep.violated_conditions.push_back(
        "alpha must be smaller than min{1/L_g, 1/(rho+1)}");

  rep.valid = rep.violated_conditions.empty();
  return rep;
}

ProxResult fb_step(const Vector& x, double alpha,
                   const std::function<Vector(const Vector&)>& g_gradient,
                   const ProxOracle& f_prox) {
  const Vector grad = g_gradient(x);
  if (grad.size() != x.size())
    throw std::invalid_argument("fb_step: gradient dimension mismatch");
  Vector y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - alpha * grad[i];
  return f_prox(y, alpha);
}

const char* status_name(SolverStatus s) {
  switch (s) {
    case SolverStatus::converged_step: return "converged_step";
    case SolverStatus::converged_dist: return "converged_dist";
    case SolverStatus::max_iterations: return "max_iterations";
    case SolverStatus::failed: return "failed";
  }
  return "unknown";
}

Trajectory run_fb(const CompositeProblem& problem, const Vector& x0,
                  const SolverConfig& config) {
  if (x0.empty() || !all_finite(x0))
    throw std::invalid_argument("run_fb: initial point must be finite");
  if (!(config.alpha > 0.0) || !std::isfinite(config.alpha))
    throw std::invalid_argument("run_fb: alpha must be positive");
  if (!(config.eps >= 0.0) || !std::isfinite(config.eps))
    throw std::invalid_argument("run_fb: eps must be >= 0");
  if (config.max_iterations < 0)
    throw std::invalid_argument("run_fb: max_iterations must be >= 0");
  if (config.mode == FbMode::inexact && !(config.eps > 0.0))
    throw std::invalid_argument("run_fb: inexact mode needs eps > 0");

  const double mu = problem.sharpness_mu.value_or(0.0);
  Trajectory traj;
  traj.alpha = config.alpha;
  traj.eps = config.eps;
  traj.mode = config.mode;
  if (config.skip_validation) {
    traj.validation_overridden = true;
  } else {
    const ParamReport rep = validate_parameters(
        problem.rho, problem.lipschitz_g, mu, config.alpha, config.eps);
    if (!rep.valid) {
      std::string msg = "run_fb: parameter validation failed:";
      for (const auto& v : rep.violated_conditions) msg += " [" + v + "]";
      throw std::invalid_argument(msg);
    }
  }

  // E^- enters the inexact contraction factor; unavailable thresholds just
  // leave the zeta column empty.
  double e_minus = 0.0;
  bool have_zeta = problem.solution_projector && mu > 0.0;
  if (config.mode == FbMode::inexact && have_zeta) {
    try {
      e_minus =
          compute_thresholds(mu, problem.rho, config.alpha, config.eps).e_minus;
    } catch (const std::invalid_argument&) {
      have_zeta = false;
    }
  }

  const bool strict_descent =
      config.mode == FbMode::exact &&
      2.0 / config.alpha > problem.rho + problem.lipschitz_g;
  const double inexact_slack_base = config.eps;
  const double inexact_slack_rate =
      config.eps > 0.0 ? std::sqrt(2.0 * config.eps / config.alpha) : 0.0;

  const auto log_dist = [&](const Vector& x) -> double {
    if (!config.log_distances || !problem.solution_projector) return kNaN;
    return distance(x, problem.solution_projector(x));
  };

  Vector x = x0;
  {
    TrajectoryRecord rec;
    rec.t = 0;
    rec.x_hash = hash_bits(x);
    rec.f_value = problem.f_value(x);
    rec.g_value = problem.g_value(x);
    rec.objective = rec.f_value + rec.g_value;
    rec.step_norm = kNaN;
    rec.dist_to_s = log_dist(x);
    rec.zeta = kNaN;
    if (!std::isfinite(rec.objective))
      throw std::invalid_argument("run_fb: initial objective is not finite");
    traj.records.push_back(rec);
  }
  double prev_objective = traj.records.front().objective;

  for (long t = 1; t <= config.max_iterations; ++t) {
    ProxResult pr;
    try {
      pr = fb_step(x, config.alpha, problem.g_gradient, problem.f_prox);
    } catch (const std::exception& e) {
      traj.status = SolverStatus::failed;
      traj.message = e.what();
      traj.final_x = x;
      return traj;
    }
    Vector x_next = std::move(pr.point);

    TrajectoryRecord rec;
    rec.t = t;
    rec.x_hash = hash_bits(x_next);
    rec.f_value = problem.f_value(x_next);
    rec.g_value = problem.g_value(x_next);
    rec.objective = rec.f_value + rec.g_value;
    rec.step_norm = distance(x, x_next);
    if (!std::isfinite(rec.objective) || !std::isfinite(rec.step_norm)) {
      traj.status = SolverStatus::failed;
      traj.message = "objective or step became non-finite at iteration " +
                     std::to_string(t);
      traj.final_x = x;
      return traj;
    }

    const double decrease = prev_objective - rec.objective;
    if (strict_descent) {
      rec.descent_violation = decrease < -1e-12;
    } else if (config.mode == FbMode::inexact) {
      rec.descent_violation =
          decrease <
          -inexact_slack_base - inexact_slack_rate * rec.step_norm - 1e-12;
    }
    if (rec.descent_violation) ++traj.descent_violations;

    rec.dist_to_s = log_dist(x_next);
    rec.zeta = kNaN;
    if (have_zeta && std::isfinite(rec.dist_to_s)) {
      const auto z = contraction_factor(rec.dist_to_s, mu, problem.rho,
                                        config.alpha, e_minus, config.mode);
      if (z) rec.zeta = *z;
    }
    if (pr.certificate) rec.certificate_ok = pr.certificate->satisfied ? 1 : 0;
    traj.records.push_back(rec);

    x = std::move(x_next);
    prev_objective = rec.objective;

    if (rec.step_norm <= config.step_tolerance) {
      traj.status = SolverStatus::converged_step;
      traj.final_x = x;
      return traj;
    }
    if (rec.dist_to_s <= config.dist_tolerance) {
      traj.status = SolverStatus::converged_dist;
      traj.final_x = x;
      return traj;
    }
  }

  traj.status = SolverStatus::max_iterations;
  traj.final_x = x;
  return traj;
}

namespace {

std::string csv_cell(double v) { return std::isnan(v) ? "" : format_g17(v); }

double parse_cell(const std::string& s) {
  if (s.empty()) return kNaN;
  return parse_double_strict(s);
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("write_trajectory_csv: cannot open " + path);
  out << "t,objective,f_value,g_value,step_norm,dist_to_S,zeta\n";
  for (const auto& r : traj.records) {
    out << r.t << ',' << csv_cell(r.objective) << ',' << csv_cell(r.f_value)
        << ',' << csv_cell(r.g_value) << ',' << csv_cell(r.step_norm) << ','
        << csv_cell(r.dist_to_s) << ',' << csv_cell(r.zeta) << '\n';
  }
  if (!out)
    throw std::runtime_error("write_trajectory_csv: write failed for " + path);
}

std::vector<TrajectoryRecord> read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("read_trajectory_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("read_trajectory_csv: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t,objective,f_value,g_value,step_norm,dist_to_S,zeta")
    throw std::runtime_error("read_trajectory_csv: unexpected header in " +
                             path);
  std::vector<TrajectoryRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    if (cells.size() != 7)
      throw std::runtime_error("read_trajectory_csv: malformed row '" + line +
                               "'");
    TrajectoryRecord r;
    r.t = std::stol(cells[0]);
    r.objective = parse_cell(cells[1]);
    r.f_value = parse_cell(cells[2]);
    r.g_value = parse_cell(cells[3]);
    r.step_norm = parse_cell(cells[4]);
    r.dist_to_s = parse_cell(cells[5]);
    r.zeta = parse_cell(cells[6]);
    records.push_back(r);
  }
  return records;
}

}  // namespace crbt
