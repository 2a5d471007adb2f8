#include "crbt/penalties.hpp"

#include <cmath>
#include <stdexcept>

namespace crbt {

namespace {

void check_prox_alpha(double alpha) {
  // Outside (0, 1/2) the prox objective loses strong convexity and the
  // minimizer may not be unique.
  if (!(alpha > 0.0 && alpha < 0.5))
    throw std::invalid_argument(
        "binary/sphere prox requires a step size in (0, 1/2)");
}

}  // namespace

BinaryPenalty::BinaryPenalty(double a_, double b_, int n_)
    : a(a_), b(b_), n(n_) {
  if (!(a < b)) throw std::invalid_argument("BinaryPenalty: requires a < b");
  if (n < 1) throw std::invalid_argument("BinaryPenalty: dimension < 1");
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("BinaryPenalty: non-finite roots");
}

double BinaryPenalty::value(const Vector& x) const {
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("BinaryPenalty::value: dimension mismatch");
  double acc = 0.0;
  for (double xi : x) acc += std::fabs((xi - a) * (xi - b));
  return acc;
}

double binary_prox_scalar(double y, double alpha) {
  check_prox_alpha(alpha);
  const double lo = 1.0 - 2.0 * alpha;
  const double hi = 1.0 + 2.0 * alpha;
  const double ay = std::fabs(y);
  if (ay > hi) return y / hi;
  if (ay < lo) return y / lo;
  return y >= 0.0 ? 1.0 : -1.0;  // middle band [lo, hi] collapses to a root
}

Vector binary_penalty_prox(const BinaryPenalty& p, const Vector& y,
                           double alpha) {
  if (!p.has_closed_form_prox())
    throw std::invalid_argument(
        "binary_penalty_prox: closed form only for roots (-1, 1); use the "
        "eps-prox oracle for general roots");
  check_prox_alpha(alpha);
  if (static_cast<int>(y.size()) != p.n)
    throw std::invalid_argument("binary_penalty_prox: dimension mismatch");
  const int n = p.n;
  Vector out(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) out[i] = binary_prox_scalar(y[i], alpha);
  return out;
}

Vector binary_penalty_prox_serial(const BinaryPenalty& p, const Vector& y,
                                  double alpha) {
  if (!p.has_closed_form_prox())
    throw std::invalid_argument(
        "binary_penalty_prox: closed form only for roots (-1, 1); use the "
        "eps-prox oracle for general roots");
  check_prox_alpha(alpha);
  if (static_cast<int>(y.size()) != p.n)
    throw std::invalid_argument("binary_penalty_prox: dimension mismatch");
  Vector out(p.n);
  for (int i = 0; i < p.n; ++i) out[i] = binary_prox_scalar(y[i], alpha);
  return out;
}

SpherePenalty::SpherePenalty(int n_) : n(n_) {
  if (n < 1) throw std::invalid_argument("SpherePenalty: dimension < 1");
}

double SpherePenalty::value(const Vector& x) const {
  if (static_cast<int>(x.size()) != n)
    throw std::invalid_argument("SpherePenalty::value: dimension mismatch");
  return std::fabs(dot(x, x) - 1.0);
}

Vector sphere_penalty_prox(const SpherePenalty& p, const Vector& y,
                           double alpha) {
  check_prox_alpha(alpha);
  if (static_cast<int>(y.size()) != p.n)
    throw std::invalid_argument("sphere_penalty_prox: dimension mismatch");
  const double r = norm2(y);
  if (r == 0.0) {
    Vector e1(p.n, 0.0);
    e1[0] = 1.0;
    return e1;
  }
  const double lo = 1.0 - 2.0 * alpha;
  const double hi = 1.0 + 2.0 * alpha;
  if (r > hi) return scaled(y, 1.0 / hi);
  if (r < lo) return scaled(y, 1.0 / lo);
  return scaled(y, 1.0 / r);
}

Vector sphere_projector(const Vector& x) {
  const double r = norm2(x);
  if (r == 0.0) {
    Vector e1(x.size(), 0.0);
    e1[0] = 1.0;
    return e1;
  }
  return scaled(x, 1.0 / r);
}

double dist_to_sphere(const Vector& x) { return std::fabs(norm2(x) - 1.0); }

Vector norm_prox(const Vector& z, double theta) {
  if (!(theta >= 0.0))
    throw std::invalid_argument("norm_prox: negative threshold");
  const double nz = norm2(z);
  if (nz <= theta) return Vector(z.size(), 0.0);
  return scaled(z, 1.0 - theta / nz);
}

Vector ball_projection(const Vector& x, const Vector& center, double theta) {
  if (x.size() != center.size())
    throw std::invalid_argument("ball_projection: dimension mismatch");
  if (!(theta > 0.0))
    throw std::invalid_argument("ball_projection: radius must be positive");
  const Vector np = norm_prox(sub(x, center), theta);
  return sub(x, np);
}

BallDistanceTerm::BallDistanceTerm(CsrMatrix a, Vector y, double theta,
                                   std::optional<double> lipschitz,
                                   std::uint64_t norm_seed)
    : a_(std::move(a)), y_(std::move(y)), theta_(theta) {
  if (y_.size() != static_cast<std::size_t>(a_.n_rows))
    throw std::invalid_argument("BallDistanceTerm: center length != n_rows");
  if (!(theta_ > 0.0))
    throw std::invalid_argument("BallDistanceTerm: radius must be positive");
  if (!all_finite(y_))
    throw std::invalid_argument("BallDistanceTerm: non-finite center");
  at_ = transpose(a_);
  if (lipschitz) {
    if (!(*lipschitz > 0.0) || !std::isfinite(*lipschitz))
      throw std::invalid_argument(
          "BallDistanceTerm: Lipschitz constant must be positive");
    lipschitz_ = *lipschitz;
  } else {
    const double est = operator_norm_estimate(a_, 100, norm_seed);
    lipschitz_ = est * est;
  }
}

double BallDistanceTerm::value(const Vector& x) const {
  Vector r = matvec(a_, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= y_[i];
  const Vector np = norm_prox(r, theta_);
  return 0.5 * dot(np, np);
}

Vector BallDistanceTerm::gradient(const Vector& x) const {
  Vector r = matvec(a_, x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= y_[i];
  return matvec(at_, norm_prox(r, theta_));
}

}  // namespace crbt
