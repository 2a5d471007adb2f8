#pragma once

#include <cstdint>
#include <optional>

#include "crbt/csr.hpp"

namespace crbt {

// f(x) = sum_i |(x_i - a)(x_i - b)|: zero exactly on {a,b}^n, 2-weakly
// convex, and sharp with mu = (b-a)/2 around that set.
struct BinaryPenalty {
  double a = -1.0;
  double b = 1.0;
  int n = 0;

  BinaryPenalty(double a_, double b_, int n_);
  double value(const Vector& x) const;
  double rho() const { return 2.0; }
  double sharpness_mu() const { return 0.5 * (b - a); }
  // The closed-form prox below only covers the (-1, 1) roots; other root
  // pairs go through the smoothed eps-prox oracle.
  bool has_closed_form_prox() const { return a == -1.0 && b == 1.0; }
};

// Minimizer of |x^2 - 1| + (x - y)^2 / (2 alpha); valid for 0 < alpha < 1/2.
double binary_prox_scalar(double y, double alpha);

// Coordinatewise closed-form prox of alpha * BinaryPenalty(-1, 1).
Vector binary_penalty_prox(const BinaryPenalty& p, const Vector& y,
                           double alpha);
Vector binary_penalty_prox_serial(const BinaryPenalty& p, const Vector& y,
                                  double alpha);

// f(x) = | ||x||^2 - 1 |, zero on the unit sphere, 2-weakly convex, sharp
// with mu = 1 (the value dominates | ||x|| - 1 |).
struct SpherePenalty {
  int n = 0;
  explicit SpherePenalty(int n_);
  double value(const Vector& x) const;
  double rho() const { return 2.0; }
  double sharpness_mu() const { return 1.0; }
};

// Radial prox; y = 0 breaks the tie to the first basis vector.
Vector sphere_penalty_prox(const SpherePenalty& p, const Vector& y,
                           double alpha);
// Nearest point of the unit sphere (0 maps to e_1).
Vector sphere_projector(const Vector& x);
double dist_to_sphere(const Vector& x);

// prox of theta * ||.||_2: the block soft threshold (1 - theta/||z||)_+ z.
Vector norm_prox(const Vector& z, double theta);

// Projection onto the closed ball B(center, theta), computed through the
// identity proj(x) = x - norm_prox(x - center, theta) so the two agree
// bit-for-bit.
Vector ball_projection(const Vector& x, const Vector& center, double theta);

// g(x) = 0.5 * dist^2(Ax, B(y, theta)): the smooth convex data term with
// gradient A^T norm_prox(Ax - y, theta) and Lipschitz constant ||A||^2.
class BallDistanceTerm {
 public:
  // Without an explicit Lipschitz constant, ||A||^2 is estimated with 100
  // power iterations started from `norm_seed`.
  BallDistanceTerm(CsrMatrix a, Vector y, double theta,
                   std::optional<double> lipschitz = std::nullopt,
                   std::uint64_t norm_seed = 1);

  double value(const Vector& x) const;
  Vector gradient(const Vector& x) const;
  double lipschitz() const { return lipschitz_; }
  double theta() const { return theta_; }
  const CsrMatrix& matrix() const { return a_; }
  const Vector& center() const { return y_; }

 private:
  CsrMatrix a_;
  CsrMatrix at_;  // cached transpose: keeps the gradient row-parallel
  Vector y_;
  double theta_ = 0.0;
  double lipschitz_ = 0.0;
};

}  // namespace crbt
