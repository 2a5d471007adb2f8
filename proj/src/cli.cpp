#include "crbt/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>

#include <CLI11.hpp>

#include "crbt/diagnostics.hpp"
#include "crbt/eps_prox.hpp"
#include "crbt/penalties.hpp"
#include "crbt/problem.hpp"
#include "crbt/solver.hpp"
#include "crbt/text_io.hpp"
#include "crbt/tomography.hpp"

namespace crbt {

namespace {

namespace fs = std::filesystem;

// Relative output paths land under $CRBT_OUT_DIR when it is set; parent
// directories are created as needed.
std::string resolve_out(const std::string& path) {
  fs::path p(path);
  if (!p.is_absolute()) {
    const char* base = std::getenv("CRBT_OUT_DIR");
    if (base && *base) p = fs::path(base) / p;
  }
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p.string();
}

void require_input(const std::string& path, const std::string& what) {
  if (!fs::exists(path))
    throw std::invalid_argument(what + " not found: " + path);
}

std::vector<double> parse_angle_list(const std::string& s) {
  std::vector<double> angles;
  for (const auto& tok : split(s, ',')) {
    try {
      angles.push_back(parse_double_strict(tok));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad angle '" + tok + "' in list '" + s +
                                  "'");
    }
  }
  if (angles.empty()) throw std::invalid_argument("empty angle list");
  return angles;
}

FbMode parse_mode(const std::string& s) {
  if (s == "exact") return FbMode::exact;
  if (s == "inexact") return FbMode::inexact;
  throw std::invalid_argument("mode must be 'exact' or 'inexact', got '" + s +
                              "'");
}

PhantomKind parse_kind(const std::string& s) {
  if (s == "disk") return PhantomKind::disk;
  if (s == "bars") return PhantomKind::bars;
  if (s == "blob") return PhantomKind::blob;
  throw std::invalid_argument("kind must be disk, bars, or blob, got '" + s +
                              "'");
}

const CLI::Validator FiniteNumber(
    [](std::string& s) -> std::string {
      try {
        parse_double_strict(s);
      } catch (const std::exception&) {
        return "not a finite number: " + s;
      }
      return {};
    },
    "FINITE");

struct PhantomArgs {
  std::string kind = "disk";
  int size = 16;
  int width = 0, height = 0;  // override size when positive
  std::uint64_t seed = 1;
  std::string out = "phantom.pgm";
};

struct ProjectArgs {
  std::string kind = "disk";
  int size = 16;
  int width = 0, height = 0;
  std::uint64_t seed = 1;
  std::string image;  // input PGM instead of a generated phantom
  std::string angles = "0,50,100,150";
  int detectors = 0;  // 0 selects 3*max(w,h)/2
  double sigma = 0.0;
  std::string matrix_out = "projector.mtx";
  std::string sinogram_out = "sinogram.csv";
  std::string truth_out;
};

struct SolveArgs {
  std::string matrix;
  std::string sinogram;
  int size = 0;
  int width = 0, height = 0;
  double alpha = -1.0;
  double eps = 0.0;
  std::string mode = "exact";
  long max_iter = 2000;
  double tol = 1e-12;
  double theta = -1.0;  // nonpositive selects the detector rule / 1e-8
  int detectors = 0;
  double lipschitz = -1.0;
  std::uint64_t seed = 1;
  std::string out = "reconstruction.pgm";
  std::string trajectory_out = "trajectory.csv";
  std::string truth;
};

struct BaselineArgs {
  std::string matrix;
  std::string sinogram;
  int size = 0;
  int width = 0, height = 0;
  int iterations = 100;
  std::string lsqr_out = "lsqr.csv";
  std::string tlsqr_out = "tlsqr.pgm";
  std::string truth;
};

struct DiagnoseArgs {
  std::string trajectory;
  double mu = 1.0;
  double rho = 2.0;
  double alpha = 0.0;
  double eps = 0.0;
  std::string mode = "exact";
  bool append = false;
  bool probe = false;
  std::string probe_kind = "binary";
  int probe_dim = 2;
  long probe_samples = 100000;
  double probe_radius = 3.0;
  std::uint64_t seed = 1;
};

struct Demo1dArgs {
  double alpha = 0.3;
  double x0 = 0.5;
  long max_iter = 50;
  double tol = 1e-10;
  std::string trajectory_out;
};

// Plain `key = value` configuration file: each entry becomes a --key=value
// token injected before the command-line flags, so explicit flags override
// the file (every option takes the last value given).
std::vector<std::string> load_config_args(const std::string& path) {
  if (!fs::exists(path))
    throw std::invalid_argument("config file not found: " + path);
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  const auto trim = [](const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  std::vector<std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const auto eq = t.find('=');
    const std::string key = eq == std::string::npos ? "" : trim(t.substr(0, eq));
    if (key.empty())
      throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                  ": expected key = value");
    out.push_back("--" + key + "=" + trim(t.substr(eq + 1)));
  }
  return out;
}

// Extracts --config PATH from the raw arguments and splices the file's
// entries in right after the subcommand name.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> expanded;
  std::string config_path;
  const auto set_path = [&config_path](const std::string& p) {
    if (!config_path.empty())
      throw std::invalid_argument("--config given more than once");
    if (p.empty()) throw std::invalid_argument("--config needs a file path");
    config_path = p;
  };
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size())
        throw std::invalid_argument("--config needs a file path");
      set_path(args[++i]);
    } else if (args[i].rfind("--config=", 0) == 0) {
      set_path(args[i].substr(9));
    } else {
      expanded.push_back(args[i]);
    }
  }
  if (!config_path.empty()) {
    if (expanded.empty())
      throw std::invalid_argument("--config requires a subcommand");
    const auto conf = load_config_args(config_path);
    expanded.insert(expanded.begin() + 1, conf.begin(), conf.end());
  }
  return expanded;
}

std::pair<int, int> resolve_dims(int size, int width, int height,
                                 const char* cmd) {
  const int w = width > 0 ? width : size;
  const int h = height > 0 ? height : size;
  if (w < 1 || h < 1)
    throw std::invalid_argument(std::string(cmd) +
                                ": image dimensions must be positive "
                                "(--size or --width/--height)");
  return {w, h};
}

void run_phantom(const PhantomArgs& a) {
  const auto [w, h] = resolve_dims(a.size, a.width, a.height, "phantom");
  const BinaryImage img = make_phantom(parse_kind(a.kind), w, h, a.seed);
  const std::string path = resolve_out(a.out);
  write_pgm(img, path);
  std::cout << "phantom " << a.kind << " " << w << "x" << h << " seed "
            << a.seed << ": " << img.count_positive() << " positive / "
            << img.size() << " pixels -> " << path << "\n";
}

void run_project(const ProjectArgs& a) {
  BinaryImage img;
  if (!a.image.empty()) {
    require_input(a.image, "input image");
    img = read_pgm(a.image);
  } else {
    const auto [w, h] = resolve_dims(a.size, a.width, a.height, "project");
    img = make_phantom(parse_kind(a.kind), w, h, a.seed);
  }
  ScanGeometry geom;
  geom.angles_deg = parse_angle_list(a.angles);
  geom.n_detectors = a.detectors > 0
                         ? a.detectors
                         : 3 * std::max(img.width, img.height) / 2;
  const CsrMatrix mat = build_projector(img.width, img.height, geom);
  const Sinogram sino = simulate_sinogram(mat, img, a.sigma, a.seed);

  const std::string mpath = resolve_out(a.matrix_out);
  const std::string spath = resolve_out(a.sinogram_out);
  write_matrix_market(mat, mpath);
  write_sinogram_csv(sino, spath);
  if (!a.truth_out.empty()) write_pgm(img, resolve_out(a.truth_out));

  std::cout << "project " << img.width << "x" << img.height << ": "
            << geom.angles_deg.size() << " angles x " << geom.n_detectors
            << " detectors, " << mat.nnz() << " nonzeros, sigma "
            << format_g17(a.sigma) << " -> " << mpath << ", " << spath << "\n";
  std::cout << "suggested theta: "
            << format_g17(a.sigma > 0.0
                              ? default_theta(geom.n_detectors, a.sigma)
                              : 1e-8)
            << "\n";
}

void run_solve(const SolveArgs& a) {
  require_input(a.matrix, "projector matrix");
  require_input(a.sinogram, "sinogram");
  const auto [w, h] = resolve_dims(a.size, a.width, a.height, "solve");
  const CsrMatrix mat = read_matrix_market(a.matrix);
  if (mat.n_cols != w * h)
    throw std::invalid_argument(
        "solve: projector has " + std::to_string(mat.n_cols) +
        " columns but the image shape gives " + std::to_string(w * h));
  const Sinogram sino = read_sinogram_csv(a.sinogram);

  double theta = a.theta;
  if (!(theta > 0.0)) {
    theta = a.detectors > 0 && sino.sigma > 0.0
                ? default_theta(a.detectors, sino.sigma)
                : 1e-8;
  }

  CrbtConfig cfg;
  cfg.alpha = a.alpha;
  cfg.eps = a.eps;
  cfg.mode = parse_mode(a.mode);
  cfg.max_iterations = a.max_iter;
  cfg.step_tolerance = a.tol;
  if (a.lipschitz > 0.0) cfg.lipschitz_g = a.lipschitz;
  cfg.norm_seed = a.seed;
  const CrbtResult res = reconstruct_crbt(mat, sino, theta, w, h, cfg);

  const std::string opath = resolve_out(a.out);
  const std::string tpath = resolve_out(a.trajectory_out);
  write_pgm(res.image, opath);
  write_trajectory_csv(res.trajectory, tpath);

  const auto& last = res.trajectory.records.back();
  std::cout << "solve: status=" << status_name(res.trajectory.status)
            << " iterations=" << last.t
            << " objective=" << format_g17(last.objective)
            << " alpha=" << format_g17(res.alpha)
            << " L_g=" << format_g17(res.lipschitz_g)
            << " theta=" << format_g17(theta)
            << " relaxed=" << (res.relaxed ? 1 : 0) << "\n";
  std::cout << "solve: wrote " << opath << ", " << tpath << "\n";
  if (!a.truth.empty()) {
    require_input(a.truth, "truth image");
    const BinaryImage truth = read_pgm(a.truth);
    std::cout << "solve: misclassification "
              << format_g17(misclassification_rate(res.image, truth)) << "\n";
  }
}

void run_baseline(const BaselineArgs& a) {
  require_input(a.matrix, "projector matrix");
  require_input(a.sinogram, "sinogram");
  const auto [w, h] = resolve_dims(a.size, a.width, a.height, "baseline");
  const CsrMatrix mat = read_matrix_market(a.matrix);
  if (mat.n_cols != w * h)
    throw std::invalid_argument(
        "baseline: projector has " + std::to_string(mat.n_cols) +
        " columns but the image shape gives " + std::to_string(w * h));
  if (a.iterations < 1)
    throw std::invalid_argument("baseline: iterations must be >= 1");
  const Sinogram sino = read_sinogram_csv(a.sinogram);

  const Vector x = lsqr_solve(mat, sino.data, a.iterations);
  const BinaryImage tl = threshold_to_binary(w, h, x);

  const std::string lpath = resolve_out(a.lsqr_out);
  const std::string tpath = resolve_out(a.tlsqr_out);
  {
    std::ofstream out(lpath);
    if (!out) throw std::runtime_error("baseline: cannot open " + lpath);
    out << "i,value\n";
    for (std::size_t i = 0; i < x.size(); ++i)
      out << i << ',' << format_g17(x[i]) << '\n';
  }
  write_pgm(tl, tpath);

  const Vector r = sub(matvec(mat, x), sino.data);
  std::cout << "baseline: lsqr " << a.iterations << " iterations, residual "
            << format_g17(norm2(r)) << " -> " << lpath << ", " << tpath
            << "\n";
  if (!a.truth.empty()) {
    require_input(a.truth, "truth image");
    const BinaryImage truth = read_pgm(a.truth);
    std::cout << "baseline: tlsqr misclassification "
              << format_g17(misclassification_rate(tl, truth)) << "\n";
  }
}

void run_diagnose(const DiagnoseArgs& a) {
  require_input(a.trajectory, "trajectory");
  const auto records = read_trajectory_csv(a.trajectory);
  const FbMode mode = parse_mode(a.mode);
  const Thresholds th = compute_thresholds(a.mu, a.rho, a.alpha, a.eps);

  std::vector<std::pair<std::string, std::string>> summary;
  summary.emplace_back("e_minus", format_g17(th.e_minus));
  summary.emplace_back("e_plus", format_g17(th.e_plus));
  summary.emplace_back("tau1", format_g17(th.tau1));
  summary.emplace_back("tau2", format_g17(th.tau2));

  // recompute zeta from the logged distances and compare
  double zeta_max_dev = 0.0;
  long zeta_rows = 0;
  for (const auto& r : records) {
    if (r.t == 0 || std::isnan(r.dist_to_s)) continue;
    const auto z = contraction_factor(r.dist_to_s, a.mu, a.rho, a.alpha,
                                      mode == FbMode::inexact ? th.e_minus
                                                              : 0.0,
                                      mode);
    if (!z || std::isnan(r.zeta)) continue;
    zeta_max_dev = std::max(zeta_max_dev, std::fabs(*z - r.zeta));
    ++zeta_rows;
  }
  summary.emplace_back("zeta_rows", std::to_string(zeta_rows));
  summary.emplace_back("zeta_max_dev", format_g17(zeta_max_dev));

  std::vector<double> dists;
  for (const auto& r : records) {
    if (std::isnan(r.dist_to_s)) break;
    dists.push_back(r.dist_to_s);
  }
  try {
    const RateFit fit = rate_fit(dists);
    summary.emplace_back("rate_factor", format_g17(fit.factor));
    summary.emplace_back("rate_r_squared", format_g17(fit.r_squared));
    summary.emplace_back("rate_window", std::to_string(fit.window));
  } catch (const std::invalid_argument&) {
    summary.emplace_back("rate_factor", "unavailable");
  }

  if (a.probe) {
    if (a.probe_dim < 1 || a.probe_samples < 1)
      throw std::invalid_argument("diagnose: probe dimension and sample "
                                  "count must be positive");
    SamplerSpec sampler;
    sampler.kind = SamplerSpec::Kind::uniform_box;
    sampler.radius = a.probe_radius;
    sampler.seed = a.seed;
    ProbeReport rep;
    if (a.probe_kind == "binary") {
      const BinaryPenalty pen(-1.0, 1.0, a.probe_dim);
      rep = sharpness_probe(
          [&pen](const Vector& x) { return pen.value(x); }, 0.0,
          [](const Vector& x) { return dist_to_binary_set(x, -1.0, 1.0).second; },
          pen.sharpness_mu(), sampler, a.probe_dim, a.probe_samples);
    } else if (a.probe_kind == "sphere") {
      const SpherePenalty pen(a.probe_dim);
      rep = sharpness_probe(
          [&pen](const Vector& x) { return pen.value(x); }, 0.0,
          [](const Vector& x) { return sphere_projector(x); },
          pen.sharpness_mu(), sampler, a.probe_dim, a.probe_samples);
    } else {
      throw std::invalid_argument("diagnose: probe kind must be binary or "
                                  "sphere, got '" + a.probe_kind + "'");
    }
    summary.emplace_back("probe_min_ratio", format_g17(rep.min_ratio));
    summary.emplace_back("probe_violations", std::to_string(rep.violations));
    summary.emplace_back("probe_used", std::to_string(rep.used_samples));
  }

  for (const auto& [k, v] : summary) std::cout << k << " = " << v << "\n";
  if (a.append) {
    std::ofstream out(a.trajectory, std::ios::app);
    if (!out)
      throw std::runtime_error("diagnose: cannot append to " + a.trajectory);
    for (const auto& [k, v] : summary) out << "# summary," << k << ',' << v
                                           << '\n';
  }
}

void run_demo(const Demo1dArgs& a) {
  CompositeProblem prob;
  const BinaryPenalty pen(-1.0, 1.0, 1);
  prob.rho = pen.rho();
  prob.lipschitz_g = 1.0;
  prob.sharpness_mu = 1.0;
  prob.f_value = [pen](const Vector& x) { return pen.value(x); };
  prob.f_prox = [pen](const Vector& y, double alpha) {
    return ProxResult{binary_penalty_prox(pen, y, alpha), std::nullopt};
  };
  prob.g_value = [](const Vector& x) {
    return 0.5 * (x[0] - 1.0) * (x[0] - 1.0);
  };
  prob.g_gradient = [](const Vector& x) { return Vector{x[0] - 1.0}; };
  prob.solution_projector = [](const Vector&) { return Vector{1.0}; };

  SolverConfig cfg;
  cfg.alpha = a.alpha;
  cfg.max_iterations = a.max_iter;
  cfg.step_tolerance = a.tol;
  const Trajectory traj = run_fb(prob, Vector{a.x0}, cfg);

  std::cout << "demo-1d: f(x) = |x^2 - 1|, g(x) = (x - 1)^2 / 2, alpha "
            << format_g17(a.alpha) << ", x0 " << format_g17(a.x0) << "\n";
  for (const auto& r : traj.records) {
    std::cout << "t=" << r.t << " objective=" << format_g17(r.objective)
              << " step="
              << (std::isnan(r.step_norm) ? std::string("-")
                                          : format_g17(r.step_norm))
              << " dist=" << format_g17(r.dist_to_s) << "\n";
  }
  std::cout << "demo-1d: status=" << status_name(traj.status)
            << " x=" << format_g17(traj.final_x[0]) << "\n";
  if (!a.trajectory_out.empty())
    write_trajectory_csv(traj, resolve_out(a.trajectory_out));
}

void add_dim_options(CLI::App* sub, int& size, int& width, int& height) {
  sub->add_option("--size", size, "square image side length");
  sub->add_option("--width", width, "image width (overrides --size)");
  sub->add_option("--height", height, "image height (overrides --size)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"binary tomography via forward-backward splitting with "
               "sharpness diagnostics"};
  app.name("crbt");
  app.require_subcommand(1);
  // Later occurrences win, so config-file values lose to explicit flags.
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  PhantomArgs pa;
  auto* phantom = app.add_subcommand("phantom", "generate a binary phantom");
  phantom->add_option("--kind", pa.kind, "disk, bars, or blob")
      ->check(CLI::IsMember({"disk", "bars", "blob"}));
  add_dim_options(phantom, pa.size, pa.width, pa.height);
  phantom->add_option("--seed", pa.seed, "phantom seed");
  phantom->add_option("--out", pa.out, "output PGM path");

  ProjectArgs pj;
  auto* project = app.add_subcommand(
      "project", "build the projector and simulate a sinogram");
  project->add_option("--kind", pj.kind, "phantom kind")
      ->check(CLI::IsMember({"disk", "bars", "blob"}));
  add_dim_options(project, pj.size, pj.width, pj.height);
  project->add_option("--image", pj.image, "input PGM instead of a phantom");
  project->add_option("--angles", pj.angles,
                      "comma-separated projection angles in degrees");
  project->add_option("--detectors", pj.detectors,
                      "detector count per angle (0 = 3*max(w,h)/2)");
  project->add_option("--sigma", pj.sigma, "noise standard deviation")
      ->check(FiniteNumber);
  project->add_option("--seed", pj.seed, "phantom and noise seed");
  project->add_option("--matrix", pj.matrix_out, "output Matrix Market path");
  project->add_option("--sinogram", pj.sinogram_out, "output sinogram CSV");
  project->add_option("--truth", pj.truth_out,
                      "also write the projected image as PGM");

  SolveArgs sv;
  auto* solve = app.add_subcommand("solve", "binary reconstruction");
  solve->add_option("--matrix", sv.matrix, "projector Matrix Market file")
      ->required();
  solve->add_option("--sinogram", sv.sinogram, "sinogram CSV file")
      ->required();
  add_dim_options(solve, sv.size, sv.width, sv.height);
  solve->add_option("--alpha", sv.alpha,
                    "step size (nonpositive = 0.9*min(1/L_g, 1/2))")
      ->check(FiniteNumber);
  solve->add_option("--eps", sv.eps, "prox accuracy budget")
      ->check(FiniteNumber);
  solve->add_option("--mode", sv.mode, "exact or inexact")
      ->check(CLI::IsMember({"exact", "inexact"}));
  solve->add_option("--max-iter", sv.max_iter, "iteration cap");
  solve->add_option("--tol", sv.tol, "step-norm stopping tolerance")
      ->check(FiniteNumber);
  solve->add_option("--theta", sv.theta,
                    "feasibility ball radius (nonpositive = detector rule)")
      ->check(FiniteNumber);
  solve->add_option("--detectors", sv.detectors,
                    "detector count, used by the default theta rule");
  solve->add_option("--lipschitz", sv.lipschitz,
                    "override for L_g = ||A||^2 (nonpositive = estimate)")
      ->check(FiniteNumber);
  solve->add_option("--seed", sv.seed, "norm-estimate seed");
  solve->add_option("--out", sv.out, "output reconstruction PGM");
  solve->add_option("--trajectory", sv.trajectory_out, "output trajectory CSV");
  solve->add_option("--truth", sv.truth,
                    "ground-truth PGM for a misclassification report");

  BaselineArgs bl;
  auto* baseline =
      app.add_subcommand("baseline", "LSQR and thresholded-LSQR baselines");
  baseline->add_option("--matrix", bl.matrix, "projector Matrix Market file")
      ->required();
  baseline->add_option("--sinogram", bl.sinogram, "sinogram CSV file")
      ->required();
  add_dim_options(baseline, bl.size, bl.width, bl.height);
  baseline->add_option("--iterations", bl.iterations, "LSQR iteration count");
  baseline->add_option("--out-lsqr", bl.lsqr_out, "raw LSQR solution CSV");
  baseline->add_option("--out-tlsqr", bl.tlsqr_out, "thresholded PGM");
  baseline->add_option("--truth", bl.truth,
                       "ground-truth PGM for a misclassification report");

  DiagnoseArgs dg;
  auto* diagnose = app.add_subcommand(
      "diagnose", "thresholds, rate fit, and probes for a trajectory");
  diagnose->add_option("--trajectory", dg.trajectory, "trajectory CSV file")
      ->required();
  diagnose->add_option("--mu", dg.mu, "sharpness constant")
      ->check(FiniteNumber);
  diagnose->add_option("--rho", dg.rho, "weak-convexity modulus")
      ->check(FiniteNumber);
  diagnose->add_option("--alpha", dg.alpha, "step size used by the run")
      ->required()
      ->check(FiniteNumber);
  diagnose->add_option("--eps", dg.eps, "prox accuracy used by the run")
      ->check(FiniteNumber);
  diagnose->add_option("--mode", dg.mode, "exact or inexact")
      ->check(CLI::IsMember({"exact", "inexact"}));
  diagnose->add_flag("--append", dg.append,
                     "append '# summary,key,value' rows to the CSV");
  diagnose->add_flag("--probe", dg.probe, "run a sharpness probe");
  diagnose->add_option("--probe-kind", dg.probe_kind, "binary or sphere")
      ->check(CLI::IsMember({"binary", "sphere"}));
  diagnose->add_option("--probe-dim", dg.probe_dim, "probe dimension");
  diagnose->add_option("--probe-samples", dg.probe_samples, "probe samples");
  diagnose->add_option("--probe-radius", dg.probe_radius, "sampler radius")
      ->check(FiniteNumber);
  diagnose->add_option("--seed", dg.seed, "sampler seed");

  Demo1dArgs dm;
  auto* demo = app.add_subcommand("demo-1d", "scalar worked example");
  demo->add_option("--alpha", dm.alpha, "step size")->check(FiniteNumber);
  demo->add_option("--x0", dm.x0, "initial point")->check(FiniteNumber);
  demo->add_option("--max-iter", dm.max_iter, "iteration cap");
  demo->add_option("--tol", dm.tol, "step-norm stopping tolerance")
      ->check(FiniteNumber);
  demo->add_option("--trajectory", dm.trajectory_out,
                   "optional output trajectory CSV");

  for (auto* sub : {phantom, project, solve, baseline, diagnose, demo}) {
    sub->add_option("--config",
                    "key=value configuration file; explicit flags override")
        ->type_name("FILE");
  }

  try {
    const std::vector<std::string> full = expand_config(args);
    std::vector<std::string> reversed(full.rbegin(), full.rend());
    app.parse(std::move(reversed));
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (phantom->parsed()) run_phantom(pa);
    if (project->parsed()) run_project(pj);
    if (solve->parsed()) run_solve(sv);
    if (baseline->parsed()) run_baseline(bl);
    if (diagnose->parsed()) run_diagnose(dg);
    if (demo->parsed()) run_demo(dm);
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace crbt
