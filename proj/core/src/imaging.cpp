#include "taperscat/imaging.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "taperscat/parallel.hpp"
#include "taperscat/specfun.hpp"

namespace taperscat::imaging {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_grid(const SamplingGrid& g) {
  if (g.nx < 2 || g.ny < 2 || !(g.xmax > g.xmin) || !(g.ymax > g.ymin)) {
    throw std::invalid_argument("imaging: malformed sampling grid");
  }
}

double default_half_width(const SamplingGrid& g, double lambda) {
  return std::max(5.0 * lambda, 3.0 * std::max(g.dx(), g.dy()));
}

double default_separation(const SamplingGrid& g) { return 3.0 * std::max(g.dx(), g.dy()); }

const std::vector<Complex>& data_row(const synthesis::ScatteringDataset& ds, int direction,
                                     bool use_clean) {
  if (direction < 0 || direction >= ds.num_directions) {
    throw std::out_of_range("imaging: direction index out of range");
  }
  return use_clean ? ds.clean.at(direction) : ds.noisy.at(direction);
}

double arc_weight(const synthesis::ScatteringDataset& ds) {
  return ds.radius * ds.aperture_extent / ds.num_receivers;
}

}  // namespace

ElongatedMesh build_elongated_mesh(const SamplingGrid& grid, Vec2 d, double lambda) {
  check_grid(grid);
  if (!(lambda > 0.0)) throw std::invalid_argument("imaging: lambda must be > 0");
  ElongatedMesh mesh;
  mesh.direction = d;
  mesh.half_width = default_half_width(grid, lambda);
  const Vec2 dp = perp(d);
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const Vec2 z = grid.point(ix, iy);
      if (std::abs(dot(z, dp)) <= mesh.half_width) mesh.cells.push_back(grid.index(ix, iy));
    }
  }
  if (mesh.cells.empty()) {
    std::ostringstream os;
    os << "imaging: beam strip along (" << d.x << ", " << d.y
       << ") does not intersect the sampling grid";
    throw std::invalid_argument(os.str());
  }
  return mesh;
}

double indicator(Vec2 z, const std::vector<Complex>& data_row,
                 const std::vector<Vec2>& receivers, double k, double lambda,
                 double arc_weight) {
  if (receivers.empty()) throw std::invalid_argument("imaging: receiver list is empty");
  if (receivers.size() != data_row.size()) {
    throw std::invalid_argument("imaging: data row and receiver list differ in length");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("imaging: lambda must be > 0");
  Complex acc(0.0, 0.0);
  for (std::size_t i = 0; i < receivers.size(); ++i) {
    const double r = norm(receivers[i] - z);
    acc += data_row[i] * std::polar(1.0, -(k * r + 0.25 * kPi));
  }
  return std::abs(acc) * arc_weight / lambda;
}

IndicatorMap indicator_map(const synthesis::ScatteringDataset& ds, int direction,
                           const SamplingGrid& grid, bool use_clean) {
  const auto& row = data_row(ds, direction, use_clean);
  IndicatorMap map;
  map.direction_index = direction;
  map.mesh = build_elongated_mesh(grid, ds.direction(direction), ds.lambda(direction));
  map.values.resize(map.mesh.cells.size());
  const double warc = arc_weight(ds);
  for (std::size_t m = 0; m < map.mesh.cells.size(); ++m) {
    map.values[m] =
        indicator(grid.point(map.mesh.cells[m]), row, ds.receivers, ds.k, ds.lambda(direction),
                  warc);
  }
  return map;
}

std::vector<Peak> local_maxima(const SamplingGrid& grid, const std::vector<int>& cells,
                               const std::vector<double>& values, int max_peaks,
                               double min_separation, bool* underfull) {
  if (cells.size() != values.size()) {
    throw std::invalid_argument("imaging: mesh/value size mismatch");
  }
  if (max_peaks < 1) throw std::invalid_argument("imaging: max_peaks must be >= 1");
  const double sep = min_separation > 0.0 ? min_separation : default_separation(grid);
  std::vector<std::size_t> order(cells.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] > values[b];
    return cells[a] < cells[b];
  });
  std::vector<Peak> peaks;
  for (std::size_t m : order) {
    if (static_cast<int>(peaks.size()) >= max_peaks) break;
    if (!(values[m] > 0.0)) break;  // sorted: everything after is zero too
    const Vec2 pos = grid.point(cells[m]);
    bool suppressed = false;
    for (const Peak& p : peaks) {
      if (norm(pos - p.position) <= sep) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) peaks.push_back({cells[m], pos, values[m]});
  }
  if (underfull) *underfull = static_cast<int>(peaks.size()) < max_peaks;
  return peaks;
}

std::vector<Peak> local_maxima(const SamplingGrid& grid, const IndicatorMap& map, int max_peaks,
                               double min_separation, bool* underfull) {
  return local_maxima(grid, map.mesh.cells, map.values, max_peaks, min_separation, underfull);
}

Reconstruction reconstruct(const synthesis::ScatteringDataset& ds, const SamplingGrid& grid,
                           int peaks_per_direction, bool use_clean) {
  check_grid(grid);
  if (peaks_per_direction < 1) {
    throw std::invalid_argument("imaging: peaks_per_direction must be >= 1");
  }
  std::vector<std::vector<Peak>> per_direction(ds.num_directions);
  std::vector<char> skipped(ds.num_directions, 0);
  parallel_for(ds.num_directions, [&](int j) {
    IndicatorMap map;
    try {
      map = indicator_map(ds, j, grid, use_clean);
    } catch (const std::invalid_argument&) {
      skipped[j] = 1;  // strip misses the grid for this direction
      return;
    }
    per_direction[j] = local_maxima(grid, map, peaks_per_direction);
  });
  Reconstruction rec;
  for (int j = 0; j < ds.num_directions; ++j) {
    if (skipped[j]) {
      rec.skipped_directions.push_back(j);
      continue;
    }
    for (const Peak& p : per_direction[j]) {
      rec.points.push_back({p.position, j, p.value, -1});
    }
  }
  return rec;
}

std::vector<double> aggregate_indicator(const synthesis::ScatteringDataset& ds,
                                        const SamplingGrid& grid, bool use_clean,
                                        std::vector<int>* argmax_direction) {
  check_grid(grid);
  std::vector<Vec2> dperp(ds.num_directions);
  std::vector<double> hw(ds.num_directions);
  for (int j = 0; j < ds.num_directions; ++j) {
    dperp[j] = perp(ds.direction(j));
    hw[j] = default_half_width(grid, ds.lambda(j));
  }
  const double warc = arc_weight(ds);
  const int ncells = grid.size();
  std::vector<double> aggregate(ncells, 0.0);
  std::vector<int> argdir(ncells, -1);
  parallel_for(ncells, [&](int cell) {
    const Vec2 z = grid.point(cell);
    std::vector<Complex> kern(ds.num_receivers);
    bool have_kernel = false;
    double best = 0.0;
    int arg = -1;
    for (int j = 0; j < ds.num_directions; ++j) {
      if (std::abs(dot(z, dperp[j])) > hw[j]) continue;
      if (!have_kernel) {
        for (int i = 0; i < ds.num_receivers; ++i) {
          const double r = norm(ds.receivers[i] - z);
          kern[i] = std::polar(1.0, -(ds.k * r + 0.25 * kPi));
        }
        have_kernel = true;
      }
      const auto& row = use_clean ? ds.clean[j] : ds.noisy[j];
      Complex acc(0.0, 0.0);
      for (int i = 0; i < ds.num_receivers; ++i) acc += row[i] * kern[i];
      const double v = std::abs(acc) * warc / ds.lambda(j);
      if (v > best) {
        best = v;
        arg = j;
      }
    }
    aggregate[cell] = best;
    argdir[cell] = arg;
  });
  if (argmax_direction) *argmax_direction = std::move(argdir);
  return aggregate;
}

Reconstruction separated_domain_reconstruct(const synthesis::ScatteringDataset& ds,
                                            const SamplingGrid& grid,
                                            const std::vector<Rect>& subdomains,
                                            int per_domain_count, bool use_clean) {
  check_grid(grid);
  if (subdomains.empty()) throw std::invalid_argument("imaging: no subdomains given");
  if (per_domain_count < 1) throw std::invalid_argument("imaging: per_domain_count must be >= 1");
  for (const Rect& r : subdomains) {
    if (!(r.xmax > r.xmin) || !(r.ymax > r.ymin)) {
      throw std::invalid_argument("imaging: malformed subdomain rectangle");
    }
  }

  std::vector<int> argdir;
  const std::vector<double> aggregate = aggregate_indicator(ds, grid, use_clean, &argdir);

  Reconstruction rec;
  for (std::size_t s = 0; s < subdomains.size(); ++s) {
    std::vector<int> cells;
    std::vector<double> vals;
    for (int cell = 0; cell < grid.size(); ++cell) {
      if (!subdomains[s].contains(grid.point(cell))) continue;
      cells.push_back(cell);
      vals.push_back(aggregate[cell]);
    }
    if (cells.empty()) continue;
    for (const Peak& p : local_maxima(grid, cells, vals, per_domain_count)) {
      rec.points.push_back({p.position, argdir[p.cell], p.value, static_cast<int>(s)});
    }
  }
  return rec;
}

PointSourceFit point_source_fit(const std::vector<Complex>& data_row,
                                const std::vector<Vec2>& receivers, double k,
                                const std::vector<Vec2>& candidates) {
  if (candidates.empty()) throw std::invalid_argument("imaging: no candidate source locations");
  if (receivers.size() < 4) throw std::invalid_argument("imaging: need at least 4 receivers");
  if (receivers.size() != data_row.size()) {
    throw std::invalid_argument("imaging: data row and receiver list differ in length");
  }
  const int nr = static_cast<int>(receivers.size());
  Eigen::VectorXcd b(nr);
  for (int i = 0; i < nr; ++i) b(i) = data_row[i];
  const double bn = b.norm();
  if (bn == 0.0) {
    PointSourceFit z;
    z.candidate = 0;
    z.position = candidates[0];
    return z;
  }

  PointSourceFit best;
  best.residual = std::numeric_limits<double>::max();
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const Vec2 y = candidates[c];
    Eigen::MatrixXcd A(nr, 3);
    for (int i = 0; i < nr; ++i) {
      const Vec2 diff = receivers[i] - y;
      const double r = norm(diff);
      const auto cf = specfun::cyl01(k * r);
      const Complex h0(cf.j0, cf.y0);
      const Complex h1(cf.j1, cf.y1);
      const Complex grad = Complex(0.0, 0.25 * k) * h1 / r;
      A(i, 0) = Complex(0.0, 0.25) * h0;
      A(i, 1) = grad * diff.x;
      A(i, 2) = grad * diff.y;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv(2) < 1e-13 * sv(0)) continue;
    const Eigen::Vector3cd xi = svd.solve(b);
    const double res = (A * xi - b).norm() / bn;
    if (res < best.residual) {
      best.candidate = static_cast<int>(c);
      best.position = y;
      best.monopole = xi(0);
      best.dipole_x = xi(1);
      best.dipole_y = xi(2);
      best.residual = res;
    }
  }
  if (best.candidate < 0) {
    throw std::runtime_error("imaging: every candidate produced a rank deficient fit");
  }
  return best;
}

Metrics reconstruction_metrics(const std::vector<Vec2>& points,
                               const std::vector<geom::BoundaryCurve>& curves, double tol) {
  if (points.empty()) throw std::invalid_argument("imaging: empty reconstruction");
  if (curves.empty()) throw std::invalid_argument("imaging: empty truth curve list");
  Metrics m;
  m.count = static_cast<int>(points.size());
  double sum = 0.0;
  int within = 0;
  for (const Vec2& p : points) {
    const double d = geom::distance_to_curves(curves, p);
    sum += d;
    m.max_distance = std::max(m.max_distance, d);
    if (d <= tol) ++within;
  }
  m.mean_distance = sum / m.count;
  m.fraction_within = static_cast<double>(within) / m.count;
  return m;
}

Metrics reconstruction_metrics(const Reconstruction& rec,
                               const std::vector<geom::BoundaryCurve>& curves, double tol) {
  std::vector<Vec2> pts;
  pts.reserve(rec.points.size());
  for (const auto& p : rec.points) pts.push_back(p.position);
  return reconstruction_metrics(pts, curves, tol);
}

void write_heatmap(const std::string& path, const SamplingGrid& grid,
                   const std::vector<double>& values, const std::vector<int>& mesh,
                   const std::string& note) {
  check_grid(grid);
  if (static_cast<int>(values.size()) != grid.size()) {
    throw std::invalid_argument("imaging: heatmap value count does not match the grid");
  }
  std::vector<char> member(values.size(), 0);
  if (mesh.empty()) {
    std::fill(member.begin(), member.end(), 1);
  } else {
    for (int cell : mesh) member.at(cell) = 1;
  }
  double vmin = std::numeric_limits<double>::max();
  double vmax = std::numeric_limits<double>::lowest();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!member[i]) continue;
    vmin = std::min(vmin, values[i]);
    vmax = std::max(vmax, values[i]);
  }
  const double span = vmax > vmin ? vmax - vmin : 1.0;

  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("cannot open heatmap file for writing: " + path);
  std::fprintf(f, "P2\n%d %d\n65535\n", grid.nx, grid.ny);
  int per_line = 0;
  for (int iy = grid.ny - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const int cell = grid.index(ix, iy);
      int v = 0;
      if (member[cell]) {
        v = static_cast<int>(std::lround((values[cell] - vmin) / span * 65535.0));
        v = std::clamp(v, 0, 65535);
      }
      std::fprintf(f, "%d%c", v, (++per_line % 16 == 0) ? '\n' : ' ');
    }
  }
  if (per_line % 16 != 0) std::fprintf(f, "\n");
  if (std::fclose(f) != 0) throw std::runtime_error("error closing heatmap file: " + path);

  std::FILE* s = std::fopen((path + ".txt").c_str(), "w");
  if (!s) throw std::runtime_error("cannot open heatmap sidecar for writing: " + path + ".txt");
  std::fprintf(s, "value_min %.17g\nvalue_max %.17g\n", vmin, vmax);
  std::fprintf(s, "bounds %.17g %.17g %.17g %.17g\n", grid.xmin, grid.xmax, grid.ymin, grid.ymax);
  std::fprintf(s, "cells %d %d\n", grid.nx, grid.ny);
  if (!note.empty()) std::fprintf(s, "note %s\n", note.c_str());
  if (std::fclose(s) != 0) throw std::runtime_error("error closing heatmap sidecar: " + path);
}

}  // namespace taperscat::imaging
