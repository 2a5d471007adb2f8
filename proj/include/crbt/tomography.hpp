#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crbt/csr.hpp"
#include "crbt/solver.hpp"
#include "crbt/vector.hpp"

namespace crbt {

// Row-major binary image with pixel values in {-1, +1}.
struct BinaryImage {
  int width = 0;
  int height = 0;
  std::vector<signed char> pixels;  // size width*height, values -1 or +1

  BinaryImage() = default;
  BinaryImage(int w, int h);

  int size() const { return width * height; }
  Vector to_vector() const;
  static BinaryImage from_vector(int w, int h, const Vector& v);
  long count_positive() const;
};

// Parallel-beam acquisition: one block of n_detectors rays per angle.
struct ScanGeometry {
  std::vector<double> angles_deg;
  int n_detectors = 0;
};

struct Sinogram {
  Vector data;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

// A ray through the image plane, parametrized o + t*d with unit direction.
struct Ray {
  double ox = 0.0, oy = 0.0;
  double dx = 0.0, dy = 0.0;
};

// Ray k of the detector block at the given angle: the detector array is
// centered on the image and spans the full diagonal, so every pixel is
// covered at every angle.  Pixels are unit squares on [0,w] x [0,h].
Ray projector_ray(int width, int height, double angle_deg, int n_detectors,
                  int k);

// Intersection lengths of a ray with the pixel grid as (column, length)
// pairs in traversal order; segments shorter than 1e-12 are dropped.
std::vector<std::pair<int, double>> trace_ray(int width, int height,
                                              const Ray& ray);

// CSR projector of shape (n_angles*n_detectors) x (width*height); row
// a*n_detectors + k is the ray of detector k at angle a.
CsrMatrix build_projector(int width, int height, const ScanGeometry& geometry);
CsrMatrix build_projector_serial(int width, int height,
                                 const ScanGeometry& geometry);

enum class PhantomKind { disk, bars, blob };

// Deterministic synthetic binary images; each class holds at least 10% of
// the pixels.  disk ignores the seed, bars uses it as a phase, blob seeds
// a smooth random field thresholded at its median.
BinaryImage make_phantom(PhantomKind kind, int width, int height,
                         std::uint64_t seed);

// y = A x + omega with omega iid Gaussian(0, sigma^2) from the counter RNG;
// sigma = 0 gives the exact projection.
Sinogram simulate_sinogram(const CsrMatrix& a, const BinaryImage& x,
                           double sigma, std::uint64_t seed);

// Golub-Kahan bidiagonalization least squares (no regularization).
Vector lsqr_solve(const CsrMatrix& a, const Vector& y, int iterations);

// Pixelwise sign with 0 mapped to +1.
BinaryImage threshold_to_binary(int width, int height, const Vector& x);

double misclassification_rate(const BinaryImage& rec, const BinaryImage& truth);

// Feasibility-ball radius rule scaled to the configured detector count.
double default_theta(int n_detectors, double sigma);

struct CrbtConfig {
  double alpha = -1.0;  // nonpositive selects 0.9 * min(1/L_g, 1/2)
  double eps = 0.0;
  FbMode mode = FbMode::exact;
  long max_iterations = 2000;
  double step_tolerance = 1e-12;
  std::optional<double> lipschitz_g;  // default: operator norm estimate squared
  std::uint64_t norm_seed = 1;
  std::optional<Vector> x0;  // default: zero vector
  bool log_distances = true;
};

struct CrbtResult {
  BinaryImage image;
  Trajectory trajectory;
  bool relaxed = false;  // exact-mode run outside the validated step range
  double alpha = 0.0;
  double lipschitz_g = 0.0;
};

// Binary reconstruction: forward-backward on the two-root penalty plus the
// smooth squared distance to the ball of radius theta around the sinogram.
CrbtResult reconstruct_crbt(const CsrMatrix& a, const Sinogram& sino,
                            double theta, int width, int height,
                            const CrbtConfig& config);

// PGM (P5, maxval 255) I/O: -1 maps to 0, +1 to 255; import thresholds at
// 128 (>= 128 becomes +1).
void write_pgm(const BinaryImage& img, const std::string& path);
BinaryImage read_pgm(const std::string& path);

// Sinogram CSV: "# sigma,<v>" and "# seed,<v>" comment preamble, then an
// `i,value` header and one 17-significant-digit row per measurement.
void write_sinogram_csv(const Sinogram& s, const std::string& path);
Sinogram read_sinogram_csv(const std::string& path);

}  // namespace crbt
