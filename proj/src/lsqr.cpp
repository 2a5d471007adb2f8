#include <cmath>
#include <stdexcept>

#include "crbt/tomography.hpp"

namespace crbt {

namespace {

void scale_in_place(Vector& v, double s) {
  for (double& e : v) e *= s;
}

}  // namespace

// Paige-Saunders LSQR without regularization; runs a fixed iteration budget.
Vector lsqr_solve(const CsrMatrix& a, const Vector& y, int iterations) {
  if (static_cast<int>(y.size()) != a.n_rows)
    throw std::invalid_argument("lsqr_solve: dimension mismatch");
  if (iterations < 0)
    throw std::invalid_argument("lsqr_solve: negative iteration count");

  Vector x(a.n_cols, 0.0);
  double beta = norm2(y);
  if (beta == 0.0) return x;
  Vector u = y;
  scale_in_place(u, 1.0 / beta);

  Vector v = matvec_transpose(a, u);
  double alpha = norm2(v);
  if (alpha == 0.0) return x;
  scale_in_place(v, 1.0 / alpha);

  Vector w = v;
  double phibar = beta;
  double rhobar = alpha;

  for (int it = 0; it < iterations; ++it) {
    // continue the bidiagonalization
    Vector au = matvec(a, v);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = au[i] - alpha * u[i];
    beta = norm2(u);
    if (beta > 0.0) scale_in_place(u, 1.0 / beta);

    Vector atv = matvec_transpose(a, u);
    for (std::size_t i = 0; i < v.size(); ++i) atv[i] -= beta * v[i];
    alpha = norm2(atv);

    // Givens rotation eliminating beta from the bidiagonal system
    const double rho = std::hypot(rhobar, beta);
    if (rho == 0.0) break;
    const double c = rhobar / rho;
    const double s = beta / rho;
    const double theta = s * alpha;
    rhobar = -c * alpha;
    const double phi = c * phibar;
    phibar = s * phibar;

    const double t1 = phi / rho;
    const double t2 = -theta / rho;
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] += t1 * w[i];
      w[i] = (alpha > 0.0 ? atv[i] / alpha : 0.0) + t2 * w[i];
    }
    if (alpha > 0.0) {
      v = atv;
      scale_in_place(v, 1.0 / alpha);
    }
    if (alpha == 0.0 && beta == 0.0) break;
  }
  return x;
}

}  // namespace crbt
