#pragma once

#include <functional>
#include <optional>

#include "crbt/vector.hpp"

namespace crbt {

enum class FbMode { exact, inexact };

// Accuracy certificate for an approximate prox point. With the prox
// objective h(x) = f(x) + ||x - y||^2 / (2 alpha), `satisfied` states
// h(candidate) <= h(reference) + budget (within a 1e-12 slack).
struct EpsProxCertificate {
  double candidate_objective = 0.0;  // h at the candidate, exact f
  double reference_objective = 0.0;  // h at the reference minimizer
  double surrogate_objective = 0.0;  // smoothed h at the candidate
  double budget = 0.0;
  bool satisfied = false;
};

struct ProxResult {
  Vector point;
  std::optional<EpsProxCertificate> certificate;
};

// (y, alpha) -> approximate minimizer of f + ||. - y||^2 / (2 alpha).
// Accuracy is a property of the oracle instance; exact oracles return no
// certificate.
using ProxOracle = std::function<ProxResult(const Vector&, double)>;

struct CompositeProblem {
  std::function<double(const Vector&)> f_value;
  ProxOracle f_prox;
  std::function<double(const Vector&)> g_value;
  std::function<Vector(const Vector&)> g_gradient;
  double rho = 0.0;          // weak-convexity modulus of f
  double lipschitz_g = 0.0;  // gradient Lipschitz constant of g
  std::optional<double> sharpness_mu;  // sharpness of f + g when known
  std::function<Vector(const Vector&)> solution_projector;  // optional

  double objective(const Vector& x) const { return f_value(x) + g_value(x); }
};

// Splits F + G (F weakly convex with modulus rho_F, G smooth with constant
// L_G) as f = F - (L_G/2)||.||^2 and g = (L_G/2)||.||^2 + G, yielding
// rho_f = rho_F + L_G and L_g = 2 L_G. When a prox oracle for F is supplied,
// the prox of f is recovered through the quadratic-tilt identity
// prox_{af}(y) = prox_{a'F}(y/(1 - a L_G)) with a' = a / (1 - a L_G).
CompositeProblem reformulate_problem(
    double rho_F, double lipschitz_G,
    std::function<double(const Vector&)> F_value,
    std::function<double(const Vector&)> G_value,
    std::function<Vector(const Vector&)> G_gradient,
    ProxOracle F_prox = nullptr);

}  // namespace crbt
