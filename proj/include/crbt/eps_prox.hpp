#pragma once

#include "crbt/problem.hpp"

namespace crbt {

// Smoothed separable surrogate for the two-root product penalty
//   Fhat(x) = sum_i sqrt( ((x_i - a_i)(x_i - b_i))^2 + eps_i^2 ),
// which sandwiches the exact penalty: F <= Fhat <= F + sum_i eps_i. The
// surrogate is smooth and its prox objective stays strongly convex for
// steps below 1/2, so minimizing it yields an eps-prox point of F with
// eps = sum_i eps_i.
struct SurrogateSpec {
  std::vector<double> root_a;
  std::vector<double> root_b;
  std::vector<double> eps_i;  // strictly positive smoothing levels

  SurrogateSpec(std::vector<double> a, std::vector<double> b,
                std::vector<double> eps);
  // Equal split of a total accuracy budget: eps_i = total_eps / n.
  static SurrogateSpec uniform(double a, double b, int n, double total_eps);

  int size() const { return static_cast<int>(root_a.size()); }
  double total_budget() const;
  bool binary_roots() const;  // all (a_i, b_i) == (-1, 1)
  double exact_value(const Vector& x) const;  // sum_i |(x_i-a_i)(x_i-b_i)|
};

double surrogate_value(const SurrogateSpec& s, const Vector& x);

// eps-approximate prox of alpha*F at y: per-coordinate safeguarded Newton on
// the surrogate objective's derivative (tolerance 1e-12, at most 200 steps,
// bracket [min(y_i,a_i)-1, max(y_i,b_i)+1]). Requires 0 < alpha < 1/2. The
// certificate compares exact prox objectives against the closed-form prox
// when every root pair is (-1, 1); otherwise the candidate is its own
// reference.
ProxResult eps_prox(const SurrogateSpec& s, const Vector& y, double alpha);
ProxResult eps_prox_serial(const SurrogateSpec& s, const Vector& y,
                           double alpha);

// Generic a-posteriori check that `candidate` is an eps-solution of min h.
EpsProxCertificate certify_eps_solution(
    const std::function<double(const Vector&)>& h_value,
    const Vector& candidate, const Vector& reference, double eps);

}  // namespace crbt
