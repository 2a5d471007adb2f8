#include "crbt/problem.hpp"

#include <stdexcept>

namespace crbt {

CompositeProblem reformulate_problem(
    double rho_F, double lipschitz_G,
    std::function<double(const Vector&)> F_value,
    std::function<double(const Vector&)> G_value,
    std::function<Vector(const Vector&)> G_gradient, ProxOracle F_prox) {
  if (rho_F < 0.0 || lipschitz_G < 0.0)
    throw std::invalid_argument("reformulate_problem: negative constants");
  if (!F_value || !G_value || !G_gradient)
    throw std::invalid_argument("reformulate_problem: missing oracles");

  const double lg = lipschitz_G;
  CompositeProblem p;
  p.rho = rho_F + lg;
  p.lipschitz_g = 2.0 * lg;
  p.f_value = [F_value, lg](const Vector& x) {
    return F_value(x) - 0.5 * lg * dot(x, x);
  };
  p.g_value = [G_value, lg](const Vector& x) {
    return 0.5 * lg * dot(x, x) + G_value(x);
  };
  p.g_gradient = [G_gradient, lg](const Vector& x) {
    Vector g = G_gradient(x);
    for (std::size_t i = 0; i < x.size(); ++i) g[i] += lg * x[i];
    return g;
  };
  if (F_prox) {
    p.f_prox = [F_prox, lg](const Vector& y, double alpha) {
      const double c = 1.0 - alpha * lg;
      // The tilt by -(L_G/2)||.||^2 keeps the prox objective strongly convex
      // only while alpha < 1/L_G; the solver's step bound 1/L_g = 1/(2 L_G)
      // is well inside that.
      if (!(c > 0.0))
        throw std::invalid_argument(
            "reformulated prox: step size too large for the tilt identity");
      return F_prox(scaled(y, 1.0 / c), alpha / c);
    };
  }
  return p;
}

}  // namespace crbt
