// Command-line front end: synthesize datasets, run reconstructions, and run
// the built-in validation suite.
//
// Exit codes: 0 success, 1 validation-suite failure, 2 bad arguments,
// 3 runtime failure.

#include <cinttypes>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "taperscat/forward.hpp"
#include "taperscat/geometry.hpp"
#include "taperscat/imaging.hpp"
#include "taperscat/incident.hpp"
#include "taperscat/specfun.hpp"
#include "taperscat/synthesis.hpp"
#include "taperscat/vec2.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

namespace ts = taperscat;

struct RunConfig {
  std::string shape = "circle";
  double k = 25.0;
  double g = 0.01;
  int n = 512;
  int nd = 128;
  int nr = 256;
  double radius = 5.0;
  double aperture_start = 0.0;
  double aperture_extent = 2.0 * kPi;
  double noise = 0.05;
  std::uint64_t seed = 42;
  std::vector<double> grid = {-2.0, 2.0, -2.0, 2.0, 150.0, 150.0};
  int m = 2;
  int per_domain = 128;
  std::string mode = "standard";
  double split_y = 0.0;
};

struct PresetValues {
  RunConfig cfg;
  bool known = false;
};

PresetValues preset_values(const std::string& name) {
  PresetValues p;
  p.known = true;
  RunConfig& c = p.cfg;
  if (name == "example1") {
    c.shape = "circle";
    c.k = 25.0;
    c.g = 0.01;
    c.n = 512;
    c.nd = 128;
    c.nr = 256;
  } else if (name == "example2") {
    c.shape = "kite";
    c.k = 20.0;
    c.g = 5e-4;
    c.n = 1024;
    c.nd = 256;
    c.nr = 256;
  } else if (name == "example3") {
    c.shape = "leaf3";
    c.k = 25.0;
    c.g = 3e-3;
    c.n = 1024;
    c.nd = 256;
    c.nr = 128;
    c.mode = "separated";
    c.per_domain = 128;
  } else if (name == "example4") {
    c.shape = "multi";
    c.k = 25.0;
    c.g = 5e-3;
    c.n = 1024;
    c.nd = 256;
    c.nr = 512;
    c.radius = 10.0;
    c.grid = {-5.0, 5.0, -5.0, 5.0, 150.0, 150.0};
    c.m = 4;
  } else {
    p.known = false;
  }
  return p;
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file for digest: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[65536];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

ts::imaging::SamplingGrid parse_grid(const std::vector<double>& g) {
  if (g.size() != 6) {
    throw CLI::ValidationError("--grid", "expected xmin,xmax,ymin,ymax,nx,ny");
  }
  ts::imaging::SamplingGrid grid;
  grid.xmin = g[0];
  grid.xmax = g[1];
  grid.ymin = g[2];
  grid.ymax = g[3];
  grid.nx = static_cast<int>(g[4]);
  grid.ny = static_cast<int>(g[5]);
  if (grid.nx < 2 || grid.ny < 2 || !(grid.xmax > grid.xmin) || !(grid.ymax > grid.ymin)) {
    throw CLI::ValidationError("--grid", "malformed grid specification");
  }
  return grid;
}

void write_manifest(const std::string& path, const RunConfig& c, const std::string& dataset_path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open manifest for writing: " + path);
  std::fprintf(f, "taperscat-manifest-1\n");
  std::fprintf(f, "command simulate\n");
  std::fprintf(f, "shape %s\n", c.shape.c_str());
  std::fprintf(f, "k %.17g\n", c.k);
  std::fprintf(f, "g %.17g\n", c.g);
  std::fprintf(f, "n %d\n", c.n);
  std::fprintf(f, "nd %d\n", c.nd);
  std::fprintf(f, "nr %d\n", c.nr);
  std::fprintf(f, "radius %.17g\n", c.radius);
  std::fprintf(f, "aperture_start %.17g\n", c.aperture_start);
  std::fprintf(f, "aperture_extent %.17g\n", c.aperture_extent);
  std::fprintf(f, "noise %.17g\n", c.noise);
  std::fprintf(f, "seed %" PRIu64 "\n", c.seed);
  std::fprintf(f, "dataset %s\n", dataset_path.c_str());
  std::fprintf(f, "fnv1a64 %016" PRIx64 "\n", fnv1a64_file(dataset_path));
  if (std::fclose(f) != 0) throw std::runtime_error("error closing manifest: " + path);
}

int run_simulate(const RunConfig& c, const std::string& out_path) {
  ts::synthesis::MeasurementConfig cfg;
  cfg.curves = ts::geom::shape_registry(c.shape);
  cfg.shape = c.shape;
  cfg.k = c.k;
  cfg.g = c.g;
  cfg.n_quadrature = c.n;
  cfg.num_directions = c.nd;
  cfg.num_receivers = c.nr;
  cfg.radius = c.radius;
  cfg.aperture_start = c.aperture_start;
  cfg.aperture_extent = c.aperture_extent;
  cfg.noise_level = c.noise;
  cfg.seed = c.seed;
  const auto ds = ts::synthesis::synthesize(cfg);
  ts::synthesis::save_dataset(ds, out_path);
  write_manifest(out_path + ".manifest", c, out_path);
  std::printf("wrote %s (%d directions x %d receivers) and %s.manifest\n", out_path.c_str(),
              ds.num_directions, ds.num_receivers, out_path.c_str());
  return 0;
}

void write_points_file(const std::string& path,
                       const std::vector<ts::imaging::ReconstructedPoint>& points) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open points file for writing: " + path);
  std::fprintf(f, "# x y direction_index indicator_value\n");
  for (const auto& p : points) {
    std::fprintf(f, "%.17g %.17g %d %.17g\n", p.position.x, p.position.y, p.direction, p.value);
  }
  if (std::fclose(f) != 0) throw std::runtime_error("error closing points file: " + path);
}

int run_reconstruct(const std::string& data_path, const std::string& out_path,
                    const ts::imaging::SamplingGrid& grid, int m, int per_domain,
                    const std::string& mode, double split_y, bool use_clean, double tol,
                    const std::string& heatmap_dir, const std::vector<int>& heatmap_directions) {
  const auto ds = ts::synthesis::load_dataset(data_path);

  ts::imaging::Reconstruction rec;
  if (mode == "separated") {
    const std::vector<ts::imaging::Rect> halves = {
        {grid.xmin, grid.xmax, grid.ymin, split_y},
        {grid.xmin, grid.xmax, split_y, grid.ymax},
    };
    rec = ts::imaging::separated_domain_reconstruct(ds, grid, halves, per_domain, use_clean);
  } else {
    rec = ts::imaging::reconstruct(ds, grid, m, use_clean);
    for (int j : rec.skipped_directions) {
      std::fprintf(stderr, "warning: direction %d: beam strip misses the sampling grid\n", j);
    }
  }
  if (rec.points.empty()) {
    throw std::runtime_error("reconstruction produced no points (no strip hit the grid)");
  }
  write_points_file(out_path, rec.points);
  std::printf("wrote %s (%zu points)\n", out_path.c_str(), rec.points.size());

  if (!ds.curves.empty()) {
    const auto metrics = ts::imaging::reconstruction_metrics(rec, ds.curves, tol);
    std::printf("metrics: count %d mean_distance %.6g max_distance %.6g fraction_within(%.3g) "
                "%.4f\n",
                metrics.count, metrics.mean_distance, metrics.max_distance, tol,
                metrics.fraction_within);
  }

  if (!heatmap_dir.empty()) {
    for (int j : heatmap_directions) {
      const auto map = ts::imaging::indicator_map(ds, j, grid, use_clean);
      std::vector<double> full(grid.size(), 0.0);
      for (std::size_t mcell = 0; mcell < map.mesh.cells.size(); ++mcell) {
        full[map.mesh.cells[mcell]] = map.values[mcell];
      }
      char name[64];
      std::snprintf(name, sizeof(name), "/indicator_d%04d.pgm", j);
      std::ostringstream note;
      note << "direction " << j << " of " << ds.num_directions << ", unit vector ("
           << ds.direction(j).x << ", " << ds.direction(j).y << ")";
      ts::imaging::write_heatmap(heatmap_dir + name, grid, full, map.mesh.cells, note.str());
    }
    if (!heatmap_directions.empty()) {
      std::printf("wrote %zu heatmap(s) to %s\n", heatmap_directions.size(),
                  heatmap_dir.c_str());
    }
  }
  return 0;
}

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

CheckResult check_bessel_identities() {
  CheckResult r{"special-function-identities", false, ""};
  double worst = 0.0;
  // Wronskian J_{n+1}(x) Y_n(x) - J_n(x) Y_{n+1}(x) = 2/(pi x)
  for (double x : {0.3, 1.7, 6.0, 14.0, 60.0, 250.0}) {
    for (int nidx = 0; nidx <= 12; ++nidx) {
      const double lhs = ts::specfun::bessel_j(nidx + 1, x) * ts::specfun::bessel_y(nidx, x) -
                         ts::specfun::bessel_j(nidx, x) * ts::specfun::bessel_y(nidx + 1, x);
      worst = std::max(worst, std::abs(lhs - 2.0 / (kPi * x)));
    }
  }
  // Three-term recurrence J_{n-1} + J_{n+1} = (2n/x) J_n, same for Y.
  for (double x : {0.9, 7.3, 33.0}) {
    for (int nidx = 1; nidx <= 10; ++nidx) {
      const double jr = ts::specfun::bessel_j(nidx - 1, x) + ts::specfun::bessel_j(nidx + 1, x) -
                        2.0 * nidx / x * ts::specfun::bessel_j(nidx, x);
      const double yr = ts::specfun::bessel_y(nidx - 1, x) + ts::specfun::bessel_y(nidx + 1, x) -
                        2.0 * nidx / x * ts::specfun::bessel_y(nidx, x);
      worst = std::max(worst, std::max(std::abs(jr), std::abs(yr)));
    }
  }
  // First zeros of J0 and Y0.
  worst = std::max(worst, std::abs(ts::specfun::bessel_j(0, 2.4048255576957728)));
  worst = std::max(worst, std::abs(ts::specfun::bessel_y(0, 0.89357696627916752)));
  r.pass = worst <= 1e-9;
  std::ostringstream os;
  os << "max identity error " << worst << " (tolerance 1e-9)";
  r.detail = os.str();
  return r;
}

CheckResult check_pde_residual() {
  CheckResult r{"tapered-wave-pde-residual", false, ""};
  const auto wave = ts::incident::make_tapered(25.0, 0.1, kPi / 3.0);
  double worst = 0.0;
  int used = 0;
  for (int i = 0; used < 50 && i < 4000; ++i) {
    // walk outward along the beam, staying where the Gaussian factor is alive
    const double t = -2.0 + 4.0 * i / 4000.0;
    const ts::Vec2 x{wave.d.x * t + 0.05 * wave.d.y * std::sin(17.0 * t),
                     wave.d.y * t - 0.05 * wave.d.x * std::sin(17.0 * t)};
    const double s = dot(x, perp(wave.d));
    if (std::exp(-s * s / (wave.lambda * wave.lambda)) < 1e-12) continue;
    worst = std::max(worst, ts::incident::pde_residual(wave, x, 1e-4));
    ++used;
  }
  r.pass = used == 50 && worst <= 1e-3;
  std::ostringstream os;
  os << "max normalized residual " << worst << " over " << used
     << " points (tolerance 1e-3, h = 1e-4)";
  r.detail = os.str();
  return r;
}

CheckResult check_mie(double eta_override) {
  CheckResult r{"mie-vs-boundary-solver", false, ""};
  const auto curves = ts::geom::shape_registry("circle");
  double worst = 0.0;
  std::ostringstream os;
  try {
    // 2.404825557695773 is the first interior Dirichlet eigenvalue wavenumber
    // of the unit disk; eta = 0 loses unique solvability exactly there.
    for (double k : {5.0, 25.0, 2.404825557695773}) {
      const ts::forward::NystromSolver solver(curves, k, 256, eta_override);
      const ts::Vec2 d{1.0, 0.0};
      const auto sol = solver.solve([&](ts::Vec2 x) { return ts::incident::eval_plane(k, d, x); });
      double num = 0.0, den = 0.0;
      for (int i = 0; i < 64; ++i) {
        const double th = 2.0 * kPi * i / 64;
        const ts::Vec2 x{5.0 * std::cos(th), 5.0 * std::sin(th)};
        const ts::Complex got = ts::forward::eval_scattered(sol, x);
        const ts::Complex ref = ts::forward::mie_series_reference(1.0, k, d, x, 64);
        num += std::norm(got - ref);
        den += std::norm(ref);
      }
      worst = std::max(worst, std::sqrt(num / den));
    }
    r.pass = worst <= 1e-6;
    os << "max relative l2 error " << worst << " (tolerance 1e-6)";
  } catch (const std::exception& e) {
    r.pass = false;
    os << "solver failure: " << e.what();
  }
  r.detail = os.str();
  return r;
}

CheckResult check_green_representation() {
  CheckResult r{"green-representation", false, ""};
  const auto curves = ts::geom::shape_registry("circle");
  const double k = 25.0;
  const auto wave = ts::incident::make_tapered(k, 0.01, kPi / 4.0);
  const ts::forward::NystromSolver solver(curves, k, 512);
  const auto sol = solver.solve([&](ts::Vec2 x) { return ts::incident::eval_tapered(wave, x); });
  const auto traces = ts::forward::boundary_traces(sol);
  double worst = 0.0;
  for (int i = 0; i < 16; ++i) {
    const double th = 2.0 * kPi * i / 16 + 0.1;
    const double rad = 2.0 + (i % 4);
    const ts::Vec2 x{rad * std::cos(th), rad * std::sin(th)};
    const ts::Complex direct = ts::forward::eval_scattered(sol, x);
    const ts::Complex viagreen = ts::forward::greens_rep_eval(sol, traces, x);
    worst = std::max(worst, std::abs(direct - viagreen) / std::abs(direct));
  }
  r.pass = worst <= 1e-6;
  std::ostringstream os;
  os << "max relative deviation " << worst << " at 16 exterior points (tolerance 1e-6)";
  r.detail = os.str();
  return r;
}

int run_validate(bool eta_zero) {
  std::vector<CheckResult> results;
  results.push_back(check_bessel_identities());
  results.push_back(check_pde_residual());
  results.push_back(check_mie(eta_zero ? 0.0 : -1.0));
  results.push_back(check_green_representation());
  bool all = true;
  for (const auto& r : results) {
    std::printf("%-32s %s  %s\n", r.name.c_str(), r.pass ? "PASS" : "FAIL", r.detail.c_str());
    all = all && r.pass;
  }
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tapered-beam obstacle scattering toolkit"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string preset;
  std::string out_path = "dataset.txt";

  auto* sim = app.add_subcommand("simulate", "synthesize a scattering dataset");
  auto* o_shape = sim->add_option("--shape", cfg.shape, "obstacle name");
  auto* o_k = sim->add_option("--k", cfg.k, "wavenumber");
  auto* o_g = sim->add_option("--g", cfg.g, "taper parameter");
  auto* o_n = sim->add_option("--n", cfg.n, "boundary quadrature size per curve");
  auto* o_nd = sim->add_option("--nd", cfg.nd, "number of incident directions");
  auto* o_nr = sim->add_option("--nr", cfg.nr, "number of receivers");
  auto* o_radius = sim->add_option("--radius", cfg.radius, "receiver circle radius");
  auto* o_astart = sim->add_option("--aperture-start", cfg.aperture_start, "aperture start angle");
  auto* o_aextent =
      sim->add_option("--aperture-extent", cfg.aperture_extent, "aperture extent (radians)");
  auto* o_noise = sim->add_option("--noise", cfg.noise, "relative noise level in [0, 1)");
  auto* o_seed = sim->add_option("--seed", cfg.seed, "noise seed");
  sim->add_option("--preset", preset, "example1 | example2 | example3 | example4");
  sim->add_option("--out", out_path, "output dataset path");

  std::string data_path;
  std::string points_path = "points.txt";
  std::vector<double> grid_spec = cfg.grid;
  std::string heatmap_dir;
  std::vector<int> heatmap_directions;
  bool use_clean = false;
  double tol = 0.06;

  auto* rec = app.add_subcommand("reconstruct", "image a dataset and extract boundary points");
  rec->add_option("--data", data_path, "input dataset")->required();
  rec->add_option("--out", points_path, "output points table");
  auto* o_grid =
      rec->add_option("--grid", grid_spec, "sampling grid: xmin,xmax,ymin,ymax,nx,ny")
          ->delimiter(',')
          ->expected(6);
  auto* o_m = rec->add_option("--m", cfg.m, "maxima kept per direction");
  auto* o_pd = rec->add_option("--per-domain", cfg.per_domain, "maxima kept per subdomain");
  auto* o_mode = rec->add_option("--mode", cfg.mode, "standard | separated")
                     ->check(CLI::IsMember({"standard", "separated"}));
  auto* o_split = rec->add_option("--split-y", cfg.split_y, "separated-mode horizontal split");
  rec->add_flag("--use-clean", use_clean, "image the noiseless matrix");
  rec->add_option("--tol", tol, "metric tolerance for the distance report");
  rec->add_option("--heatmap-dir", heatmap_dir, "directory for per-direction PGM heatmaps");
  rec->add_option("--directions", heatmap_directions, "direction indices for --heatmap-dir")
      ->delimiter(',');
  rec->add_option("--preset", preset, "example1 | example2 | example3 | example4");

  bool eta_zero = false;
  auto* val = app.add_subcommand("validate", "run the built-in oracle checks");
  val->add_flag("--debug-eta-zero", eta_zero, "")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (!preset.empty()) {
      const auto p = preset_values(preset);
      if (!p.known) {
        std::fprintf(stderr, "error: unknown preset '%s'\n", preset.c_str());
        return 2;
      }
      // explicit flags override preset values
      if (!*o_shape) cfg.shape = p.cfg.shape;
      if (!*o_k) cfg.k = p.cfg.k;
      if (!*o_g) cfg.g = p.cfg.g;
      if (!*o_n) cfg.n = p.cfg.n;
      if (!*o_nd) cfg.nd = p.cfg.nd;
      if (!*o_nr) cfg.nr = p.cfg.nr;
      if (!*o_radius) cfg.radius = p.cfg.radius;
      if (!*o_astart) cfg.aperture_start = p.cfg.aperture_start;
      if (!*o_aextent) cfg.aperture_extent = p.cfg.aperture_extent;
      if (!*o_noise) cfg.noise = p.cfg.noise;
      if (!*o_seed) cfg.seed = p.cfg.seed;
      if (!*o_grid) grid_spec = p.cfg.grid;
      if (!*o_m) cfg.m = p.cfg.m;
      if (!*o_pd) cfg.per_domain = p.cfg.per_domain;
      if (!*o_mode) cfg.mode = p.cfg.mode;
      if (!*o_split) cfg.split_y = p.cfg.split_y;
    }

    if (sim->parsed()) {
      if (cfg.noise < 0.0 || cfg.noise >= 1.0) {
        std::fprintf(stderr, "error: --noise must lie in [0, 1)\n");
        return 2;
      }
      if (cfg.k <= 0.0 || cfg.g <= 0.0 || cfg.n < 32 || cfg.nd < 1 || cfg.nr < 2) {
        std::fprintf(stderr, "error: invalid simulate configuration\n");
        return 2;
      }
      return run_simulate(cfg, out_path);
    }
    if (rec->parsed()) {
      return run_reconstruct(data_path, points_path, parse_grid(grid_spec), cfg.m,
                             cfg.per_domain, cfg.mode, cfg.split_y, use_clean, tol, heatmap_dir,
                             heatmap_directions);
    }
    if (val->parsed()) {
      return run_validate(eta_zero);
    }
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "failure: %s\n", e.what());
    return 3;
  }
  return 0;
}
