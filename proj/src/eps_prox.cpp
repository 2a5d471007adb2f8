#include "crbt/eps_prox.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "crbt/penalties.hpp"

namespace crbt {

SurrogateSpec::SurrogateSpec(std::vector<double> a, std::vector<double> b,
                             std::vector<double> eps)
    : root_a(std::move(a)), root_b(std::move(b)), eps_i(std::move(eps)) {
  if (root_a.empty() || root_a.size() != root_b.size() ||
      root_a.size() != eps_i.size())
    throw std::invalid_argument("SurrogateSpec: inconsistent lengths");
  for (std::size_t i = 0; i < root_a.size(); ++i) {
    if (!(root_a[i] < root_b[i]))
      throw std::invalid_argument("SurrogateSpec: requires a_i < b_i");
    if (!(eps_i[i] > 0.0) || !std::isfinite(eps_i[i]))
      throw std::invalid_argument(
          "SurrogateSpec: smoothing levels must be positive");
  }
}

SurrogateSpec SurrogateSpec::uniform(double a, double b, int n,
                                     double total_eps) {
  if (n < 1) throw std::invalid_argument("SurrogateSpec: dimension < 1");
  if (!(total_eps > 0.0))
    throw std::invalid_argument("SurrogateSpec: budget must be positive");
  return SurrogateSpec(std::vector<double>(n, a), std::vector<double>(n, b),
                       std::vector<double>(n, total_eps / n));
}

double SurrogateSpec::total_budget() const {
  double acc = 0.0;
  for (double e : eps_i) acc += e;
  return acc;
}

bool SurrogateSpec::binary_roots() const {
  for (int i = 0; i < size(); ++i)
    if (root_a[i] != -1.0 || root_b[i] != 1.0) return false;
  return true;
}

double SurrogateSpec::exact_value(const Vector& x) const {
  if (static_cast<int>(x.size()) != size())
    throw std::invalid_argument("SurrogateSpec: dimension mismatch");
  double acc = 0.0;
  for (int i = 0; i < size(); ++i)
    acc += std::fabs((x[i] - root_a[i]) * (x[i] - root_b[i]));
  return acc;
}

double surrogate_value(const SurrogateSpec& s, const Vector& x) {
  if (static_cast<int>(x.size()) != s.size())
    throw std::invalid_argument("surrogate_value: dimension mismatch");
  double acc = 0.0;
  for (int i = 0; i < s.size(); ++i) {
    const double q = (x[i] - s.root_a[i]) * (x[i] - s.root_b[i]);
    acc += std::sqrt(q * q + s.eps_i[i] * s.eps_i[i]);
  }
  return acc;
}

namespace {

struct CoordObjective {
  double a, b, e, y, alpha;

  // derivative of sqrt(q^2+e^2) + (x-y)^2/(2 alpha), q = (x-a)(x-b)
  double psi(double x) const {
    const double q = (x - a) * (x - b);
    const double qp = 2.0 * x - a - b;
    const double s = std::sqrt(q * q + e * e);
    return q * qp / s + (x - y) / alpha;
  }
  // second derivative; bounded below by 1/alpha - 2 > 0 for alpha < 1/2
  double psi_prime(double x) const {
    const double q = (x - a) * (x - b);
    const double qp = 2.0 * x - a - b;
    const double s = std::sqrt(q * q + e * e);
    return (qp * qp * e * e + 2.0 * q * s * s) / (s * s * s) + 1.0 / alpha;
  }
};

// Newton with a shrinking sign bracket; the derivative is strictly
// increasing, so any step leaving the bracket falls back to bisection.
// Termination is on bracket width, not on the derivative residual: with a
// tiny smoothing level the minimizer sits against a kink of |q| where the
// derivative jumps through zero so steeply that no representable point
// makes it small.
double solve_coordinate(const CoordObjective& c) {
  double lo = std::min(c.y, c.a) - 1.0;
  double hi = std::max(c.y, c.b) + 1.0;
  double x = 0.5 * (lo + hi);
  double last_width = hi - lo;
  for (int it = 0; it < 200; ++it) {
    const double d = c.psi(x);
    if (d == 0.0) return x;
    if (d > 0.0)
      hi = x;
    else
      lo = x;
    const double width = hi - lo;
    if (width <= 4e-16 * std::max({1.0, std::fabs(lo), std::fabs(hi)}))
      return 0.5 * (lo + hi);
    double next = x - d / c.psi_prime(x);
    // bisect when Newton leaves the bracket or the previous step failed to
    // halve it, so slow tails cannot exhaust the iteration budget
    if (!(next > lo && next < hi) || width > 0.5 * last_width)
      next = 0.5 * (lo + hi);
    last_width = width;
    x = next;
  }
  return 0.5 * (lo + hi);
}

ProxResult run_eps_prox(const SurrogateSpec& s, const Vector& y, double alpha,
                        bool parallel) {
  if (!(alpha > 0.0 && alpha < 0.5))
    throw std::invalid_argument(
        "eps_prox: step size must lie in (0, 1/2) to keep the prox "
        "objective strongly convex");
  if (static_cast<int>(y.size()) != s.size())
    throw std::invalid_argument("eps_prox: dimension mismatch");

  const int n = s.size();
  Vector x(n);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      const CoordObjective c{s.root_a[i], s.root_b[i], s.eps_i[i], y[i],
                             alpha};
      x[i] = solve_coordinate(c);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const CoordObjective c{s.root_a[i], s.root_b[i], s.eps_i[i], y[i],
                             alpha};
      x[i] = solve_coordinate(c);
    }
  }

  const auto quad = [&](const Vector& p) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = p[i] - y[i];
      acc += d * d;
    }
    return acc / (2.0 * alpha);
  };

  EpsProxCertificate cert;
  cert.budget = s.total_budget();
  cert.candidate_objective = s.exact_value(x) + quad(x);
  cert.surrogate_objective = surrogate_value(s, x) + quad(x);
  if (s.binary_roots()) {
    Vector ref(n);
    for (int i = 0; i < n; ++i) ref[i] = binary_prox_scalar(y[i], alpha);
    cert.reference_objective = s.exact_value(ref) + quad(ref);
  } else {
    cert.reference_objective = cert.candidate_objective;
  }
  cert.satisfied =
      cert.candidate_objective <= cert.reference_objective + cert.budget + 1e-12;
  return ProxResult{std::move(x), cert};
}

}  // namespace

ProxResult eps_prox(const SurrogateSpec& s, const Vector& y, double alpha) {
  return run_eps_prox(s, y, alpha, true);
}

ProxResult eps_prox_serial(const SurrogateSpec& s, const Vector& y,
                           double alpha) {
  return run_eps_prox(s, y, alpha, false);
}

EpsProxCertificate certify_eps_solution(
    const std::function<double(const Vector&)>& h_value,
    const Vector& candidate, const Vector& reference, double eps) {
  if (!(eps >= 0.0))
    throw std::invalid_argument("certify_eps_solution: negative budget");
  EpsProxCertificate cert;
  cert.budget = eps;
  cert.candidate_objective = h_value(candidate);
  cert.reference_objective = h_value(reference);
  cert.surrogate_objective = cert.candidate_objective;
  cert.satisfied =
      cert.candidate_objective <= cert.reference_objective + eps + 1e-12;
  return cert;
}

}  // namespace crbt
