#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>

#include "crbt/problem.hpp"
#include "crbt/vector.hpp"

namespace crbt {

// Radii governing the contraction analysis: the iteration tube (e_minus,
// e_plus) and the criticality ring (tau1, tau2).  Ordering
// tau1 <= e_minus < e_plus <= tau2 holds whenever the radicands are
// nonnegative.
struct Thresholds {
  double e_minus = 0.0;
  double e_plus = 0.0;
  double tau1 = 0.0;
  double tau2 = 0.0;
  double disc_e = 0.0;    // mu^2 - 2 eps (rho+1)(alpha+1)/alpha
  double disc_tau = 0.0;  // mu^2 - 2 rho eps
};

// Throws std::invalid_argument when a radicand is negative (the accuracy
// budget eps is too large for the given mu, rho, alpha) or when
// mu, rho, alpha are not positive / eps is negative.
Thresholds compute_thresholds(double mu, double rho, double alpha, double eps);

// Distance to {a,b}^n together with the nearest point; ties at the midpoint
// resolve to b.
std::pair<double, Vector> dist_to_binary_set(const Vector& x, double a,
                                             double b);

// Per-step contraction factor predicted by the distance to the solution set
// of the NEW iterate.  Exact mode: 1 - alpha rho + 2 alpha mu / dist.
// Inexact mode: 1 - alpha rho - alpha + 2 alpha mu / (dist + e_minus).
// Returns nullopt when the denominator vanishes (solution reached).
std::optional<double> contraction_factor(double dist_next, double mu,
                                         double rho, double alpha,
                                         double e_minus, FbMode mode);

// Deterministic sample stream for probing: draws are a pure function of
// (spec, dim, index).
struct SamplerSpec {
  enum class Kind { uniform_box, gaussian };
  Kind kind = Kind::gaussian;
  double radius = 3.0;
  std::uint64_t seed = 1;
};

Vector draw_sample(const SamplerSpec& spec, int dim, std::uint64_t index);

struct ProbeReport {
  double min_ratio = 0.0;  // min over samples of (h(x)-h*)/dist(x,S)
  long violations = 0;     // samples with ratio < requested mu
  long used_samples = 0;   // samples outside S (others are skipped)
};

// Samples x from the sampler and checks h(x) - optimal_value >= mu dist(x,S)
// with dist computed through the projector onto S.
ProbeReport sharpness_probe(const std::function<double(const Vector&)>& h,
                            double optimal_value,
                            const std::function<Vector(const Vector&)>& projector,
                            double requested_mu, const SamplerSpec& sampler,
                            int dim, long n_samples);
ProbeReport sharpness_probe_serial(
    const std::function<double(const Vector&)>& h, double optimal_value,
    const std::function<Vector(const Vector&)>& projector, double requested_mu,
    const SamplerSpec& sampler, int dim, long n_samples);

// Sampled necessary test for C-eps-criticality of x0: checks
// h(x) - h(x0) >= -C ||x-x0||^2 - eps at probe points x = x0 + draw.
// A false return is a certified witness of non-criticality; true only means
// no probe violated the inequality.
bool eps_criticality_check(const std::function<double(const Vector&)>& h,
                           const Vector& x0, double C, double eps,
                           const SamplerSpec& sampler, long n_probes);

struct RateFit {
  double factor = 1.0;     // fitted per-step factor for squared distances
  double r_squared = 1.0;  // quality of the log-linear fit
  int window = 0;          // number of leading positive entries used
};

// Least-squares slope of log(dist^2) against iteration index over the
// longest positive prefix; needs at least 3 positive entries.
RateFit rate_fit(const std::vector<double>& distances);

}  // namespace crbt
