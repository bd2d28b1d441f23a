#include "taperscat/synthesis.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "taperscat/forward.hpp"
#include "taperscat/incident.hpp"
#include "taperscat/parallel.hpp"
#include "taperscat/specfun.hpp"

namespace taperscat::synthesis {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double circumscribed_radius(const std::vector<geom::BoundaryCurve>& curves) {
  double rmax = 0.0;
  for (const auto& c : curves) {
    for (int i = 0; i < 1024; ++i) {
      rmax = std::max(rmax, norm(geom::position(c, 2.0 * kPi * i / 1024)));
    }
  }
  return rmax;
}

void check_config(const MeasurementConfig& cfg) {
  if (cfg.curves.empty()) throw std::invalid_argument("synthesis: no boundary curves");
  if (!(cfg.k > 0.0)) throw std::invalid_argument("synthesis: k must be > 0");
  if (!(cfg.g > 0.0)) throw std::invalid_argument("synthesis: g must be > 0");
  if (cfg.num_directions < 1) throw std::invalid_argument("synthesis: num_directions must be >= 1");
  if (cfg.num_receivers < 2) throw std::invalid_argument("synthesis: num_receivers must be >= 2");
  if (!(cfg.aperture_extent > 0.0) || cfg.aperture_extent > 2.0 * kPi + 1e-12) {
    throw std::invalid_argument("synthesis: aperture_extent must lie in (0, 2*pi]");
  }
  if (cfg.noise_level < 0.0 || cfg.noise_level >= 1.0) {
    throw std::invalid_argument("synthesis: noise_level must lie in [0, 1)");
  }
  const double rc = circumscribed_radius(cfg.curves);
  if (!(cfg.radius > rc)) {
    std::ostringstream os;
    os << "synthesis: receiver radius " << cfg.radius
       << " must exceed the circumscribed radius " << rc << " of the obstacles";
    throw std::invalid_argument(os.str());
  }
}

void write_double(std::FILE* f, const char* name, double v) {
  std::fprintf(f, "%s %.17g\n", name, v);
}

double read_named_double(std::istream& in, const std::string& name) {
  std::string key;
  double v = 0.0;
  if (!(in >> key >> v) || key != name) {
    throw std::runtime_error("dataset parse error: expected field '" + name + "'");
  }
  return v;
}

void expect_section(std::istream& in, const char* name) {
  std::string key;
  if (!(in >> key) || key != name) {
    throw std::runtime_error(std::string("dataset parse error: expected section '") + name + "'");
  }
}

}  // namespace

std::vector<Vec2> build_receivers(const MeasurementConfig& cfg) {
  std::vector<Vec2> out(cfg.num_receivers);
  for (int i = 0; i < cfg.num_receivers; ++i) {
    const double th = cfg.aperture_start + cfg.aperture_extent * i / cfg.num_receivers;
    out[i] = {cfg.radius * std::cos(th), cfg.radius * std::sin(th)};
  }
  return out;
}

std::vector<Vec2> build_directions(int num_directions) {
  if (num_directions < 1) throw std::invalid_argument("synthesis: num_directions must be >= 1");
  std::vector<Vec2> out(num_directions);
  for (int j = 0; j < num_directions; ++j) {
    const double psi = 2.0 * kPi * j / num_directions + kPi / num_directions;
    out[j] = {std::cos(psi), std::sin(psi)};
  }
  return out;
}

double uniform_pm1(std::uint64_t seed, int direction, int receiver, int draw) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(direction));
  h = mix64(h ^ static_cast<std::uint64_t>(receiver));
  h = mix64(h ^ static_cast<std::uint64_t>(draw));
  const double u = (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;  // (0, 1)
  return 2.0 * u - 1.0;
}

Complex perturb_entry(Complex clean, double noise_level, std::uint64_t seed, int direction,
                      int receiver) {
  if (noise_level == 0.0) return clean;
  const double r1 = uniform_pm1(seed, direction, receiver, 0);
  const double r2 = uniform_pm1(seed, direction, receiver, 1);
  return clean + noise_level * r1 * std::abs(clean) * std::polar(1.0, kPi * r2);
}

std::vector<std::vector<Complex>> add_noise(const std::vector<std::vector<Complex>>& clean,
                                            double noise_level, std::uint64_t seed) {
  if (noise_level < 0.0 || noise_level >= 1.0) {
    throw std::invalid_argument("synthesis: noise_level must lie in [0, 1)");
  }
  std::vector<std::vector<Complex>> out(clean.size());
  for (std::size_t j = 0; j < clean.size(); ++j) {
    out[j].resize(clean[j].size());
    for (std::size_t i = 0; i < clean[j].size(); ++i) {
      out[j][i] = perturb_entry(clean[j][i], noise_level, seed, static_cast<int>(j),
                                static_cast<int>(i));
    }
  }
  return out;
}

ScatteringDataset synthesize(const MeasurementConfig& cfg) {
  check_config(cfg);

  ScatteringDataset ds;
  ds.shape = cfg.shape;
  ds.curves = cfg.curves;
  ds.k = cfg.k;
  ds.g = cfg.g;
  ds.radius = cfg.radius;
  ds.aperture_start = cfg.aperture_start;
  ds.aperture_extent = cfg.aperture_extent;
  ds.noise_level = cfg.noise_level;
  ds.seed = cfg.seed;
  ds.n_quadrature = cfg.n_quadrature;
  ds.num_directions = cfg.num_directions;
  ds.num_receivers = cfg.num_receivers;
  ds.directions = build_directions(cfg.num_directions);
  ds.receivers = build_receivers(cfg);
  ds.per_direction_lambda.resize(cfg.num_directions);
  for (int j = 0; j < cfg.num_directions; ++j) {
    ds.per_direction_lambda[j] = cfg.g * std::abs(ds.directions[j].y);
  }
  ds.clean.assign(cfg.num_directions, {});
  ds.noisy.assign(cfg.num_directions, {});

  const forward::NystromSolver solver(cfg.curves, cfg.k, cfg.n_quadrature);

  // Receiver evaluation matrix: row i maps density values to the scattered
  // field at receiver i. Receivers do not depend on the direction, so this is
  // built once.
  const int n = cfg.n_quadrature;
  const int NP = solver.unknowns();
  const double w = 2.0 * kPi / n;
  const Complex ieta(0.0, solver.eta());
  std::vector<geom::CurveNodes> nodes;
  for (const auto& c : cfg.curves) nodes.push_back(geom::sample_nodes(c, n));
  std::vector<Complex> E(static_cast<std::size_t>(cfg.num_receivers) * NP);
  for (int i = 0; i < cfg.num_receivers; ++i) {
    for (std::size_t p = 0; p < nodes.size(); ++p) {
      const auto& nd = nodes[p];
      for (int j = 0; j < n; ++j) {
        const Vec2 diff = ds.receivers[i] - nd.x[j];
        const double r = norm(diff);
        const auto c = specfun::cyl01(cfg.k * r);
        const double dw = diff.x * nd.dx[j].y - diff.y * nd.dx[j].x;
        const Complex kern = Complex(0.0, 0.25 * cfg.k) * Complex(c.j1, c.y1) * dw / r -
                             ieta * Complex(0.0, 0.25) * Complex(c.j0, c.y0) * nd.speed[j];
        E[static_cast<std::size_t>(i) * NP + p * n + j] = w * kern;
      }
    }
  }

  parallel_for(cfg.num_directions, [&](int j) {
    forward::DensitySolution sol;
    try {
      const auto wave = incident::make_tapered_dir(cfg.k, cfg.g, ds.directions[j]);
      sol = solver.solve([&](Vec2 x) { return incident::eval_tapered(wave, x); });
    } catch (const std::exception& e) {
      throw std::runtime_error("synthesis: forward solve failed for direction " +
                               std::to_string(j) + ": " + e.what());
    }
    std::vector<Complex> row(cfg.num_receivers);
    for (int i = 0; i < cfg.num_receivers; ++i) {
      Complex acc(0.0, 0.0);
      const Complex* e = E.data() + static_cast<std::size_t>(i) * NP;
      for (int m = 0; m < NP; ++m) acc += e[m] * sol.density[m];
      row[i] = acc;
    }
    std::vector<Complex> noisy(cfg.num_receivers);
    for (int i = 0; i < cfg.num_receivers; ++i) {
      noisy[i] = perturb_entry(row[i], cfg.noise_level, cfg.seed, j, i);
    }
    ds.clean[j] = std::move(row);
    ds.noisy[j] = std::move(noisy);
  });

  return ds;
}

void save_dataset(const ScatteringDataset& ds, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open dataset file for writing: " + path);
  std::fprintf(f, "taperscat-ds-1\n");
  std::fprintf(f, "shape %s\n", ds.shape.empty() ? "-" : ds.shape.c_str());
  write_double(f, "k", ds.k);
  write_double(f, "g", ds.g);
  write_double(f, "radius", ds.radius);
  write_double(f, "aperture_start", ds.aperture_start);
  write_double(f, "aperture_extent", ds.aperture_extent);
  write_double(f, "noise_level", ds.noise_level);
  std::fprintf(f, "seed %" PRIu64 "\n", ds.seed);
  std::fprintf(f, "n_quadrature %d\n", ds.n_quadrature);
  std::fprintf(f, "num_directions %d\n", ds.num_directions);
  std::fprintf(f, "num_receivers %d\n", ds.num_receivers);
  std::fprintf(f, "curves %d\n", static_cast<int>(ds.curves.size()));
  for (const auto& c : ds.curves) {
    std::fprintf(f, "%s %.17g %.17g %d", geom::kind_name(c.kind).c_str(), c.center.x, c.center.y,
                 static_cast<int>(c.params.size()));
    for (double p : c.params) std::fprintf(f, " %.17g", p);
    std::fprintf(f, "\n");
  }
  std::fprintf(f, "directions\n");
  for (const Vec2& d : ds.directions) std::fprintf(f, "%.17g %.17g\n", d.x, d.y);
  std::fprintf(f, "receivers\n");
  for (const Vec2& r : ds.receivers) std::fprintf(f, "%.17g %.17g\n", r.x, r.y);
  std::fprintf(f, "clean\n");
  for (const auto& row : ds.clean) {
    for (const Complex& v : row) std::fprintf(f, "%.17g %.17g\n", v.real(), v.imag());
  }
  std::fprintf(f, "noisy\n");
  for (const auto& row : ds.noisy) {
    for (const Complex& v : row) std::fprintf(f, "%.17g %.17g\n", v.real(), v.imag());
  }
  if (std::fclose(f) != 0) throw std::runtime_error("error closing dataset file: " + path);
}

ScatteringDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  std::string magic;
  if (!(in >> magic) || magic != "taperscat-ds-1") {
    throw std::runtime_error("not a taperscat dataset (or unsupported version): " + path);
  }
  ScatteringDataset ds;
  std::string key;
  if (!(in >> key >> ds.shape) || key != "shape") {
    throw std::runtime_error("dataset parse error: expected field 'shape'");
  }
  if (ds.shape == "-") ds.shape.clear();
  ds.k = read_named_double(in, "k");
  ds.g = read_named_double(in, "g");
  ds.radius = read_named_double(in, "radius");
  ds.aperture_start = read_named_double(in, "aperture_start");
  ds.aperture_extent = read_named_double(in, "aperture_extent");
  ds.noise_level = read_named_double(in, "noise_level");
  if (!(in >> key >> ds.seed) || key != "seed") {
    throw std::runtime_error("dataset parse error: expected field 'seed'");
  }
  auto read_count = [&](const char* name) {
    int v = 0;
    if (!(in >> key >> v) || key != name || v < 0) {
      throw std::runtime_error(std::string("dataset parse error: expected field '") + name + "'");
    }
    return v;
  };
  ds.n_quadrature = read_count("n_quadrature");
  ds.num_directions = read_count("num_directions");
  ds.num_receivers = read_count("num_receivers");
  const int ncurves = read_count("curves");
  ds.curves.resize(ncurves);
  for (auto& c : ds.curves) {
    std::string kind;
    int np = 0;
    if (!(in >> kind >> c.center.x >> c.center.y >> np) || np < 0) {
      throw std::runtime_error("dataset parse error in curve list");
    }
    c.kind = geom::kind_from_name(kind);
    c.params.resize(np);
    for (double& p : c.params) {
      if (!(in >> p)) throw std::runtime_error("dataset parse error in curve parameters");
    }
  }
  auto read_vecs = [&](const char* name, int count) {
    expect_section(in, name);
    std::vector<Vec2> out(count);
    for (Vec2& v : out) {
      if (!(in >> v.x >> v.y)) {
        throw std::runtime_error(std::string("dataset parse error in section '") + name + "'");
      }
    }
    return out;
  };
  ds.directions = read_vecs("directions", ds.num_directions);
  ds.receivers = read_vecs("receivers", ds.num_receivers);
  ds.per_direction_lambda.resize(ds.num_directions);
  for (int j = 0; j < ds.num_directions; ++j) {
    ds.per_direction_lambda[j] = ds.g * std::abs(ds.directions[j].y);
  }
  auto read_block = [&](const char* name) {
    expect_section(in, name);
    std::vector<std::vector<Complex>> block(ds.num_directions,
                                            std::vector<Complex>(ds.num_receivers));
    for (auto& row : block) {
      for (auto& v : row) {
        double re = 0.0, im = 0.0;
        if (!(in >> re >> im)) throw std::runtime_error("dataset parse error in field values");
        v = Complex(re, im);
      }
    }
    return block;
  };
  ds.clean = read_block("clean");
  ds.noisy = read_block("noisy");
  return ds;
}

}  // namespace taperscat::synthesis
