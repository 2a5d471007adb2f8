#include "crbt/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "crbt/rng.hpp"

namespace crbt {

Thresholds compute_thresholds(double mu, double rho, double alpha,
                              double eps) {
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw std::invalid_argument("compute_thresholds: mu must be positive");
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw std::invalid_argument("compute_thresholds: rho must be positive");
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("compute_thresholds: alpha must be positive");
  if (!(eps >= 0.0) || !std::isfinite(eps))
    throw std::invalid_argument("compute_thresholds: eps must be >= 0");

  Thresholds th;
  th.disc_e = mu * mu - 2.0 * eps * (rho + 1.0) * (alpha + 1.0) / alpha;
  th.disc_tau = mu * mu - 2.0 * rho * eps;
  if (th.disc_e < 0.0)
    throw std::invalid_argument(
        "compute_thresholds: eps exceeds mu^2 alpha / (2 (rho+1)(alpha+1)), "
        "the tube radii are undefined");
  if (th.disc_tau < 0.0)
    throw std::invalid_argument(
        "compute_thresholds: eps exceeds mu^2 / (2 rho), the criticality "
        "ring is undefined");

  const double se = std::sqrt(th.disc_e);
  const double st = std::sqrt(th.disc_tau);
  th.e_minus = (mu - se) / (rho + 1.0);
  th.e_plus = (mu + se) / (rho + 1.0);
  th.tau1 = (mu - st) / rho;
  th.tau2 = (mu + st) / rho;
  return th;
}

std::pair<double, Vector> dist_to_binary_set(const Vector& x, double a,
                                             double b) {
  if (!(a < b))
    throw std::invalid_argument("dist_to_binary_set: requires a < b");
  Vector nearest(x.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double da = x[i] - a;
    const double db = x[i] - b;
    if (da * da < db * db) {
      nearest[i] = a;
      acc += da * da;
    } else {
      nearest[i] = b;  // midpoint tie goes to b
      acc += db * db;
    }
  }
  return {std::sqrt(acc), std::move(nearest)};
}

std::optional<double> contraction_factor(double dist_next, double mu,
                                         double rho, double alpha,
                                         double e_minus, FbMode mode) {
  if (mode == FbMode::exact) {
    if (dist_next <= 0.0) return std::nullopt;  // solution reached
    return 1.0 - alpha * rho + 2.0 * alpha * mu / dist_next;
  }
  const double denom = dist_next + e_minus;
  if (denom <= 0.0) return std::nullopt;
  return 1.0 - alpha * rho - alpha + 2.0 * alpha * mu / denom;
}

Vector draw_sample(const SamplerSpec& spec, int dim, std::uint64_t index) {
  if (dim < 1) throw std::invalid_argument("draw_sample: dimension < 1");
  Vector x(dim);
  const std::uint64_t base = index * static_cast<std::uint64_t>(dim);
  if (spec.kind == SamplerSpec::Kind::uniform_box) {
    for (int i = 0; i < dim; ++i)
      x[i] = (2.0 * counter_uniform(spec.seed, base + i) - 1.0) * spec.radius;
  } else {
    for (int i = 0; i < dim; ++i)
      x[i] = counter_gaussian(spec.seed, base + i) * spec.radius;
  }
  return x;
}

namespace {

ProbeReport run_probe(const std::function<double(const Vector&)>& h,
                      double optimal_value,
                      const std::function<Vector(const Vector&)>& projector,
                      double requested_mu, const SamplerSpec& sampler, int dim,
                      long n_samples, bool parallel) {
  if (n_samples < 1)
    throw std::invalid_argument("sharpness_probe: need at least one sample");
  double min_ratio = std::numeric_limits<double>::infinity();
  long violations = 0;
  long used = 0;
  if (parallel) {
#pragma omp parallel for schedule(static) \
    reduction(min : min_ratio) reduction(+ : violations, used)
    for (long s = 0; s < n_samples; ++s) {
      const Vector x = draw_sample(sampler, dim, static_cast<std::uint64_t>(s));
      const double d = distance(x, projector(x));
      if (d <= 0.0) continue;
      const double ratio = (h(x) - optimal_value) / d;
      min_ratio = std::min(min_ratio, ratio);
      if (ratio < requested_mu) ++violations;
      ++used;
    }
  } else {
    for (long s = 0; s < n_samples; ++s) {
      const Vector x = draw_sample(sampler, dim, static_cast<std::uint64_t>(s));
      const double d = distance(x, projector(x));
      if (d <= 0.0) continue;
      const double ratio = (h(x) - optimal_value) / d;
      min_ratio = std::min(min_ratio, ratio);
      if (ratio < requested_mu) ++violations;
      ++used;
    }
  }
  return ProbeReport{min_ratio, violations, used};
}

}  // namespace

ProbeReport sharpness_probe(const std::function<double(const Vector&)>& h,
                            double optimal_value,
                            const std::function<Vector(const Vector&)>& projector,
                            double requested_mu, const SamplerSpec& sampler,
                            int dim, long n_samples) {
  return run_probe(h, optimal_value, projector, requested_mu, sampler, dim,
                   n_samples, true);
}

ProbeReport sharpness_probe_serial(
    const std::function<double(const Vector&)>& h, double optimal_value,
    const std::function<Vector(const Vector&)>& projector, double requested_mu,
    const SamplerSpec& sampler, int dim, long n_samples) {
  return run_probe(h, optimal_value, projector, requested_mu, sampler, dim,
                   n_samples, false);
}

bool eps_criticality_check(const std::function<double(const Vector&)>& h,
                           const Vector& x0, double C, double eps,
                           const SamplerSpec& sampler, long n_probes) {
  if (!(C >= 0.0)) throw std::invalid_argument("eps_criticality_check: C < 0");
  if (!(eps >= 0.0))
    throw std::invalid_argument("eps_criticality_check: eps < 0");
  const double h0 = h(x0);
  const int dim = static_cast<int>(x0.size());
  for (long s = 0; s < n_probes; ++s) {
    Vector x = draw_sample(sampler, dim, static_cast<std::uint64_t>(s));
    for (int i = 0; i < dim; ++i) x[i] += x0[i];
    const double d = distance(x, x0);
    if (h(x) - h0 < -C * d * d - eps - 1e-12) return false;
  }
  return true;
}

RateFit rate_fit(const std::vector<double>& distances) {
  int window = 0;
  while (window < static_cast<int>(distances.size()) &&
         distances[window] > 0.0)
    ++window;
  if (window < 3)
    throw std::invalid_argument(
        "rate_fit: need at least 3 leading positive distances");

  // least squares of y_t = 2 log(d_t) against t over the positive prefix
  double st = 0.0, sy = 0.0;
  for (int t = 0; t < window; ++t) {
    st += t;
    sy += 2.0 * std::log(distances[t]);
  }
  const double tbar = st / window;
  const double ybar = sy / window;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int t = 0; t < window; ++t) {
    const double dt = t - tbar;
    const double dy = 2.0 * std::log(distances[t]) - ybar;
    sxx += dt * dt;
    sxy += dt * dy;
    syy += dy * dy;
  }
  const double slope = sxy / sxx;
  RateFit fit;
  fit.window = window;
  fit.factor = std::exp(slope);
  if (syy <= 1e-30) {
    fit.r_squared = 1.0;
  } else {
    double ss_res = 0.0;
    for (int t = 0; t < window; ++t) {
      const double pred = ybar + slope * (t - tbar);
      const double r = 2.0 * std::log(distances[t]) - pred;
      ss_res += r * r;
    }
    fit.r_squared = 1.0 - ss_res / syy;
  }
  return fit;
}

}  // namespace crbt
