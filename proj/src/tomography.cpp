#include "crbt/tomography.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "crbt/diagnostics.hpp"
#include "crbt/eps_prox.hpp"
#include "crbt/penalties.hpp"
#include "crbt/problem.hpp"
#include "crbt/rng.hpp"
#include "crbt/text_io.hpp"

namespace crbt {

BinaryImage::BinaryImage(int w, int h) : width(w), height(h) {
  if (w < 1 || h < 1)
    throw std::invalid_argument("BinaryImage: dimensions must be >= 1");
  pixels.assign(static_cast<std::size_t>(w) * h, -1);
}

Vector BinaryImage::to_vector() const {
  Vector v(pixels.size());
  for (std::size_t i = 0; i < pixels.size(); ++i) v[i] = pixels[i];
  return v;
}

BinaryImage BinaryImage::from_vector(int w, int h, const Vector& v) {
  if (static_cast<std::size_t>(w) * h != v.size())
    throw std::invalid_argument("BinaryImage::from_vector: size mismatch");
  BinaryImage img(w, h);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 1.0 && v[i] != -1.0)
      throw std::invalid_argument(
          "BinaryImage::from_vector: entries must be exactly -1 or +1");
    img.pixels[i] = static_cast<signed char>(v[i]);
  }
  return img;
}

long BinaryImage::count_positive() const {
  long c = 0;
  for (signed char p : pixels) c += p > 0;
  return c;
}

Ray projector_ray(int width, int height, double angle_deg, int n_detectors,
                  int k) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("projector_ray: dimensions must be >= 1");
  if (n_detectors < 1)
    throw std::invalid_argument("projector_ray: need at least one detector");
  if (k < 0 || k >= n_detectors)
    throw std::invalid_argument("projector_ray: detector index out of range");
  if (!std::isfinite(angle_deg))
    throw std::invalid_argument("projector_ray: angle must be finite");

  const double phi = angle_deg * std::numbers::pi / 180.0;
  const double dx = std::cos(phi), dy = std::sin(phi);
  const double ux = -dy, uy = dx;  // detector axis, perpendicular to the ray
  const double diag = std::hypot(static_cast<double>(width),
                                 static_cast<double>(height));
  const double s = ((k + 0.5) / n_detectors - 0.5) * diag;
  Ray r;
  r.ox = width / 2.0 + s * ux;
  r.oy = height / 2.0 + s * uy;
  r.dx = dx;
  r.dy = dy;
  return r;
}

std::vector<std::pair<int, double>> trace_ray(int width, int height,
                                              const Ray& ray) {
  double t_lo = -std::numeric_limits<double>::infinity();
  double t_hi = std::numeric_limits<double>::infinity();
  // clip against the slab [0, extent] on each axis
  if (ray.dx != 0.0) {
    const double t0 = (0.0 - ray.ox) / ray.dx;
    const double t1 = (width - ray.ox) / ray.dx;
    t_lo = std::max(t_lo, std::min(t0, t1));
    t_hi = std::min(t_hi, std::max(t0, t1));
  } else if (ray.ox < 0.0 || ray.ox > width) {
    return {};
  }
  if (ray.dy != 0.0) {
    const double t0 = (0.0 - ray.oy) / ray.dy;
    const double t1 = (height - ray.oy) / ray.dy;
    t_lo = std::max(t_lo, std::min(t0, t1));
    t_hi = std::min(t_hi, std::max(t0, t1));
  } else if (ray.oy < 0.0 || ray.oy > height) {
    return {};
  }
  if (!(t_lo < t_hi)) return {};

  std::vector<double> ts;
  ts.push_back(t_lo);
  ts.push_back(t_hi);
  if (ray.dx != 0.0) {
    for (int i = 1; i < width; ++i) {
      const double t = (i - ray.ox) / ray.dx;
      if (t > t_lo && t < t_hi) ts.push_back(t);
    }
  }
  if (ray.dy != 0.0) {
    for (int j = 1; j < height; ++j) {
      const double t = (j - ray.oy) / ray.dy;
      if (t > t_lo && t < t_hi) ts.push_back(t);
    }
  }
  std::sort(ts.begin(), ts.end());

  const double speed = std::hypot(ray.dx, ray.dy);
  std::vector<std::pair<int, double>> out;
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double len = (ts[i + 1] - ts[i]) * speed;
    if (len <= 1e-12) continue;
    const double tm = 0.5 * (ts[i] + ts[i + 1]);
    const double mx = ray.ox + tm * ray.dx;
    const double my = ray.oy + tm * ray.dy;
    const int px = std::clamp(static_cast<int>(std::floor(mx)), 0, width - 1);
    const int py = std::clamp(static_cast<int>(std::floor(my)), 0, height - 1);
    out.emplace_back(py * width + px, len);
  }
  return out;
}

namespace {

CsrMatrix assemble_projector(int width, int height,
                             const ScanGeometry& geometry, bool parallel) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("build_projector: dimensions must be >= 1");
  if (geometry.n_detectors < 1)
    throw std::invalid_argument("build_projector: need at least one detector");
  for (double a : geometry.angles_deg)
    if (!std::isfinite(a))
      throw std::invalid_argument("build_projector: angles must be finite");

  const int n_angles = static_cast<int>(geometry.angles_deg.size());
  const int n_det = geometry.n_detectors;
  const int n_rays = n_angles * n_det;
  std::vector<std::vector<std::pair<int, double>>> rows(n_rays);
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < n_rays; ++r) {
      const Ray ray = projector_ray(width, height,
                                    geometry.angles_deg[r / n_det], n_det,
                                    r % n_det);
      rows[r] = trace_ray(width, height, ray);
    }
  } else {
    for (int r = 0; r < n_rays; ++r) {
      const Ray ray = projector_ray(width, height,
                                    geometry.angles_deg[r / n_det], n_det,
                                    r % n_det);
      rows[r] = trace_ray(width, height, ray);
    }
  }

  CsrMatrix a;
  a.n_rows = n_rays;
  a.n_cols = width * height;
  a.row_offsets.assign(n_rays + 1, 0);
  for (int r = 0; r < n_rays; ++r) {
    auto& row = rows[r];
    std::stable_sort(row.begin(), row.end(),
                     [](const auto& p, const auto& q) {
                       return p.first < q.first;
                     });
    // merge duplicate columns in traversal order
    std::size_t out_n = 0;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (out_n > 0 && row[out_n - 1].first == row[i].first)
        row[out_n - 1].second += row[i].second;
      else
        row[out_n++] = row[i];
    }
    row.resize(out_n);
    a.row_offsets[r + 1] = a.row_offsets[r] + static_cast<int>(out_n);
  }
  a.col_indices.reserve(a.row_offsets[n_rays]);
  a.values.reserve(a.row_offsets[n_rays]);
  for (int r = 0; r < n_rays; ++r) {
    for (const auto& [col, len] : rows[r]) {
      a.col_indices.push_back(col);
      a.values.push_back(len);
    }
  }
  return a;
}

}  // namespace

CsrMatrix build_projector(int width, int height,
                          const ScanGeometry& geometry) {
  return assemble_projector(width, height, geometry, true);
}

CsrMatrix build_projector_serial(int width, int height,
                                 const ScanGeometry& geometry) {
  return assemble_projector(width, height, geometry, false);
}

BinaryImage make_phantom(PhantomKind kind, int width, int height,
                         std::uint64_t seed) {
  if (width < 4 || height < 4)
    throw std::invalid_argument("make_phantom: dimensions must be >= 4");
  BinaryImage img(width, height);
  switch (kind) {
    case PhantomKind::disk: {
      const double r = std::round(0.3 * std::min(width, height));
      const double cx = width / 2.0, cy = height / 2.0;
      for (int py = 0; py < height; ++py)
        for (int px = 0; px < width; ++px) {
          const double ex = px + 0.5 - cx, ey = py + 0.5 - cy;
          img.pixels[py * width + px] = ex * ex + ey * ey <= r * r ? 1 : -1;
        }
      break;
    }
    case PhantomKind::bars: {
      const int bw = std::max(2, width / 8);
      const int phase = static_cast<int>(seed % (2 * bw));
      for (int py = 0; py < height; ++py)
        for (int px = 0; px < width; ++px)
          img.pixels[py * width + px] = ((px + phase) / bw) % 2 == 0 ? 1 : -1;
      break;
    }
    case PhantomKind::blob: {
      std::vector<double> field(img.size());
      double fx[3], fy[3], ph[3];
      for (int m = 0; m < 3; ++m) {
        fx[m] = 1.0 + std::floor(3.0 * counter_uniform(seed, 3 * m));
        fy[m] = 1.0 + std::floor(3.0 * counter_uniform(seed, 3 * m + 1));
        ph[m] = 2.0 * std::numbers::pi * counter_uniform(seed, 3 * m + 2);
      }
      for (int py = 0; py < height; ++py)
        for (int px = 0; px < width; ++px) {
          double v = 0.0;
          for (int m = 0; m < 3; ++m)
            v += std::cos(2.0 * std::numbers::pi *
                              (fx[m] * (px + 0.5) / width +
                               fy[m] * (py + 0.5) / height) +
                          ph[m]);
          field[py * width + px] = v;
        }
      std::vector<double> sorted = field;
      std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                       sorted.end());
      const double median = sorted[sorted.size() / 2];
      for (int i = 0; i < img.size(); ++i)
        img.pixels[i] = field[i] >= median ? 1 : -1;
      break;
    }
  }
  return img;
}

Sinogram simulate_sinogram(const CsrMatrix& a, const BinaryImage& x,
                           double sigma, std::uint64_t seed) {
  if (a.n_cols != x.size())
    throw std::invalid_argument("simulate_sinogram: projector/image mismatch");
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("simulate_sinogram: sigma must be >= 0");
  Sinogram s;
  s.sigma = sigma;
  s.seed = seed;
  s.data = matvec(a, x.to_vector());
  if (sigma > 0.0)
    for (std::size_t i = 0; i < s.data.size(); ++i)
      s.data[i] += sigma * counter_gaussian(seed, i);
  return s;
}

BinaryImage threshold_to_binary(int width, int height, const Vector& x) {
  if (static_cast<std::size_t>(width) * height != x.size())
    throw std::invalid_argument("threshold_to_binary: size mismatch");
  BinaryImage img(width, height);
  for (std::size_t i = 0; i < x.size(); ++i)
    img.pixels[i] = x[i] >= 0.0 ? 1 : -1;
  return img;
}

double misclassification_rate(const BinaryImage& rec,
                              const BinaryImage& truth) {
  if (rec.width != truth.width || rec.height != truth.height)
    throw std::invalid_argument("misclassification_rate: dimension mismatch");
  long diff = 0;
  for (int i = 0; i < rec.size(); ++i) diff += rec.pixels[i] != truth.pixels[i];
  return static_cast<double>(diff) / rec.size();
}

double default_theta(int n_detectors, double sigma) {
  if (n_detectors < 1)
    throw std::invalid_argument("default_theta: need at least one detector");
  const double scale = n_detectors * sigma;
  return 10.0 * scale * scale;
}

CrbtResult reconstruct_crbt(const CsrMatrix& a, const Sinogram& sino,
                            double theta, int width, int height,
                            const CrbtConfig& config) {
  const int n = width * height;
  if (a.n_cols != n)
    throw std::invalid_argument("reconstruct_crbt: projector/image mismatch");
  if (a.n_rows != static_cast<int>(sino.data.size()))
    throw std::invalid_argument(
        "reconstruct_crbt: projector/sinogram mismatch");
  if (!(theta > 0.0))
    throw std::invalid_argument("reconstruct_crbt: theta must be positive");

  CrbtResult res;
  res.lipschitz_g = config.lipschitz_g
                        ? *config.lipschitz_g
                        : [&] {
                            const double nrm = operator_norm_estimate(
                                a, 100, config.norm_seed);
                            return nrm * nrm;
                          }();
  if (!(res.lipschitz_g > 0.0))
    throw std::invalid_argument("reconstruct_crbt: L_g must be positive");
  res.alpha = config.alpha > 0.0
                  ? config.alpha
                  : 0.9 * std::min(1.0 / res.lipschitz_g, 0.5);
  if (!(res.alpha < std::min(1.0 / res.lipschitz_g, 0.5)))
    throw std::invalid_argument(
        "reconstruct_crbt: alpha must be smaller than min{1/L_g, 1/2}");

  BallDistanceTerm term(a, sino.data, theta, res.lipschitz_g);
  BinaryPenalty pen(-1.0, 1.0, n);

  CompositeProblem prob;
  prob.rho = pen.rho();
  prob.lipschitz_g = res.lipschitz_g;
  prob.sharpness_mu = pen.sharpness_mu();
  prob.f_value = [pen](const Vector& x) { return pen.value(x); };
  prob.g_value = [&term](const Vector& x) { return term.value(x); };
  prob.g_gradient = [&term](const Vector& x) { return term.gradient(x); };
  prob.solution_projector = [](const Vector& x) {
    return dist_to_binary_set(x, -1.0, 1.0).second;
  };

  SolverConfig scfg;
  scfg.alpha = res.alpha;
  scfg.eps = config.eps;
  scfg.mode = config.mode;
  scfg.max_iterations = config.max_iterations;
  scfg.step_tolerance = config.step_tolerance;
  scfg.log_distances = config.log_distances;

  if (config.mode == FbMode::exact) {
    prob.f_prox = [pen](const Vector& y, double alpha) {
      return ProxResult{binary_penalty_prox(pen, y, alpha), std::nullopt};
    };
    const ParamReport rep =
        validate_parameters(prob.rho, res.lipschitz_g, 1.0, res.alpha, 0.0);
    if (!rep.valid) {
      // alpha < min{1/L_g, 1/2} keeps the prox single-valued and the
      // iteration descending; the run is recorded as outside the
      // validated contraction regime.
      res.relaxed = true;
      scfg.skip_validation = true;
    }
  } else {
    if (!(config.eps > 0.0))
      throw std::invalid_argument(
          "reconstruct_crbt: inexact mode needs eps > 0");
    const SurrogateSpec spec = SurrogateSpec::uniform(-1.0, 1.0, n, config.eps);
    prob.f_prox = [spec](const Vector& y, double alpha) {
      return eps_prox(spec, y, alpha);
    };
  }

  Vector x0 = config.x0 ? *config.x0 : Vector(n, 0.0);
  res.trajectory = run_fb(prob, x0, scfg);
  res.image = threshold_to_binary(width, height, res.trajectory.final_x);
  return res;
}

void write_pgm(const BinaryImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_pgm: cannot open " + path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::vector<unsigned char> bytes(img.pixels.size());
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    bytes[i] = img.pixels[i] > 0 ? 255 : 0;
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write_pgm: write failed for " + path);
}

namespace {

// next whitespace-delimited token, skipping '#' comments to end of line
std::string pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

}  // namespace

void write_sinogram_csv(const Sinogram& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_sinogram_csv: cannot open " + path);
  out << "# sigma," << format_g17(s.sigma) << "\n";
  out << "# seed," << s.seed << "\n";
  out << "i,value\n";
  for (std::size_t i = 0; i < s.data.size(); ++i)
    out << i << ',' << format_g17(s.data[i]) << '\n';
  if (!out)
    throw std::runtime_error("write_sinogram_csv: write failed for " + path);
}

Sinogram read_sinogram_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_sinogram_csv: cannot open " + path);
  Sinogram s;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto cells = split(line.substr(1), ',');
      if (cells.size() == 2) {
        std::string key = cells[0];
        key.erase(0, key.find_first_not_of(' '));
        if (key == "sigma") s.sigma = parse_double_strict(cells[1]);
        if (key == "seed") s.seed = std::stoull(cells[1]);
      }
      continue;
    }
    if (!saw_header) {
      if (line != "i,value")
        throw std::runtime_error("read_sinogram_csv: unexpected header in " +
                                 path);
      saw_header = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 2)
      throw std::runtime_error("read_sinogram_csv: malformed row '" + line +
                               "'");
    const std::size_t i = std::stoul(cells[0]);
    if (i != s.data.size())
      throw std::runtime_error("read_sinogram_csv: rows out of order in " +
                               path);
    s.data.push_back(parse_double_strict(cells[1]));
  }
  if (!saw_header)
    throw std::runtime_error("read_sinogram_csv: missing header in " + path);
  return s;
}

BinaryImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_pgm: cannot open " + path);
  if (pgm_token(in) != "P5")
    throw std::runtime_error("read_pgm: not a binary PGM (P5): " + path);
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(pgm_token(in));
    h = std::stoi(pgm_token(in));
    maxval = std::stoi(pgm_token(in));
  } catch (const std::exception&) {
    throw std::runtime_error("read_pgm: malformed header in " + path);
  }
  if (w < 1 || h < 1)
    throw std::runtime_error("read_pgm: bad dimensions in " + path);
  if (maxval < 1 || maxval > 255)
    throw std::runtime_error("read_pgm: unsupported maxval in " + path);
  std::vector<unsigned char> bytes(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
    throw std::runtime_error("read_pgm: truncated pixel data in " + path);
  BinaryImage img(w, h);
  for (std::size_t i = 0; i < bytes.size(); ++i)
    img.pixels[i] = bytes[i] >= 128 ? 1 : -1;
  return img;
}

}  // namespace crbt
