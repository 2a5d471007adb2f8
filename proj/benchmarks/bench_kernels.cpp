// Timing comparison of the OpenMP kernels against their serial reference
// implementations, with a checksum column proving the results agree
// bit-for-bit for any thread count.

#include <chrono>
#include <cstdio>
#include <functional>

#include "crbt/csr.hpp"
#include "crbt/diagnostics.hpp"
#include "crbt/eps_prox.hpp"
#include "crbt/penalties.hpp"
#include "crbt/rng.hpp"
#include "crbt/tomography.hpp"
#include "crbt/vector.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using clock_type = std::chrono::steady_clock;

double time_best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto start = clock_type::now();
    fn();
    const auto stop = clock_type::now();
    best = std::min(best,
                    std::chrono::duration<double, std::milli>(stop - start)
                        .count());
  }
  return best;
}

void report(const char* name, double serial_ms, double parallel_ms,
            bool identical) {
  std::printf("%-22s %10.3f ms %10.3f ms %8.2fx   %s\n", name, serial_ms,
              parallel_ms, serial_ms / parallel_ms,
              identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads: %d\n", omp_get_max_threads());
#else
  std::printf("OpenMP disabled: both columns run the same serial code\n");
#endif
  std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "parallel",
              "speedup");

  const int reps = 5;

  // sparse matvec on a tomography projector
  {
    crbt::ScanGeometry geom;
    geom.angles_deg = {0, 30, 60, 90, 120, 150};
    geom.n_detectors = 192;
    const crbt::CsrMatrix a = crbt::build_projector(128, 128, geom);
    crbt::Vector x(a.n_cols);
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = 2.0 * crbt::counter_uniform(7, i) - 1.0;
    crbt::Vector ys, yp;
    const double ts =
        time_best_of(reps, [&] { ys = crbt::matvec_serial(a, x); });
    const double tp = time_best_of(reps, [&] { yp = crbt::matvec(a, x); });
    report("matvec", ts, tp,
           crbt::hash_bits(ys) == crbt::hash_bits(yp));
  }

  // closed-form binary prox
  {
    const int n = 2'000'000;
    const crbt::BinaryPenalty pen(-1.0, 1.0, n);
    crbt::Vector y(n);
    for (int i = 0; i < n; ++i)
      y[i] = 4.0 * (2.0 * crbt::counter_uniform(11, i) - 1.0);
    crbt::Vector ps, pp;
    const double ts = time_best_of(
        reps, [&] { ps = crbt::binary_penalty_prox_serial(pen, y, 0.25); });
    const double tp = time_best_of(
        reps, [&] { pp = crbt::binary_penalty_prox(pen, y, 0.25); });
    report("binary prox", ts, tp,
           crbt::hash_bits(ps) == crbt::hash_bits(pp));
  }

  // smoothed eps-prox (per-coordinate Newton)
  {
    const int n = 200'000;
    const auto spec = crbt::SurrogateSpec::uniform(-1.0, 1.0, n, 1e-3);
    crbt::Vector y(n);
    for (int i = 0; i < n; ++i)
      y[i] = 4.0 * (2.0 * crbt::counter_uniform(13, i) - 1.0);
    crbt::Vector es, ep;
    const double ts = time_best_of(
        reps, [&] { es = crbt::eps_prox_serial(spec, y, 0.25).point; });
    const double tp =
        time_best_of(reps, [&] { ep = crbt::eps_prox(spec, y, 0.25).point; });
    report("eps prox", ts, tp,
           crbt::hash_bits(es) == crbt::hash_bits(ep));
  }

  // projector construction (per-ray tracing)
  {
    crbt::ScanGeometry geom;
    geom.angles_deg = {0, 20, 40, 60, 80, 100, 120, 140, 160};
    geom.n_detectors = 256;
    crbt::CsrMatrix as, ap;
    const double ts = time_best_of(
        reps, [&] { as = crbt::build_projector_serial(192, 192, geom); });
    const double tp =
        time_best_of(reps, [&] { ap = crbt::build_projector(192, 192, geom); });
    const bool same = crbt::hash_bits(as.values) == crbt::hash_bits(ap.values) &&
                      as.col_indices == ap.col_indices &&
                      as.row_offsets == ap.row_offsets;
    report("projector build", ts, tp, same);
  }

  // sharpness probe (per-sample reduction)
  {
    const int dim = 8;
    const long samples = 200'000;
    const crbt::BinaryPenalty pen(-1.0, 1.0, dim);
    crbt::SamplerSpec sampler;
    sampler.kind = crbt::SamplerSpec::Kind::uniform_box;
    sampler.radius = 3.0;
    sampler.seed = 5;
    const auto h = [&pen](const crbt::Vector& x) { return pen.value(x); };
    const auto proj = [](const crbt::Vector& x) {
      return crbt::dist_to_binary_set(x, -1.0, 1.0).second;
    };
    crbt::ProbeReport rs, rp;
    const double ts = time_best_of(reps, [&] {
      rs = crbt::sharpness_probe_serial(h, 0.0, proj, 1.0, sampler, dim,
                                        samples);
    });
    const double tp = time_best_of(reps, [&] {
      rp = crbt::sharpness_probe(h, 0.0, proj, 1.0, sampler, dim, samples);
    });
    const bool same = rs.min_ratio == rp.min_ratio &&
                      rs.violations == rp.violations &&
                      rs.used_samples == rp.used_samples;
    report("sharpness probe", ts, tp, same);
  }

  return 0;
}
