#pragma once

#include <string>
#include <vector>

#include "taperscat/geometry.hpp"
#include "taperscat/synthesis.hpp"
#include "taperscat/vec2.hpp"

namespace taperscat::imaging {

// Rectangular sampling lattice; evaluation points sit at cell centers.
struct SamplingGrid {
  double xmin = -2.0;
  double xmax = 2.0;
  double ymin = -2.0;
  double ymax = 2.0;
  int nx = 150;
  int ny = 150;

  double dx() const { return (xmax - xmin) / nx; }
  double dy() const { return (ymax - ymin) / ny; }
  int size() const { return nx * ny; }
  int index(int ix, int iy) const { return iy * nx + ix; }
  Vec2 point(int ix, int iy) const {
    return {xmin + (ix + 0.5) * dx(), ymin + (iy + 0.5) * dy()};
  }
  Vec2 point(int cell) const { return point(cell % nx, cell / nx); }
};

// Strip of grid cells around the beam axis (the line through the origin along
// d): members satisfy |z . perp(d)| <= half_width with
// half_width = max(5 * lambda, 3 * max(dx, dy)).
struct ElongatedMesh {
  Vec2 direction;
  double half_width = 0.0;
  std::vector<int> cells;
};

// Throws when the strip misses the grid, naming the direction.
ElongatedMesh build_elongated_mesh(const SamplingGrid& grid, Vec2 d, double lambda);

// Imaging functional for one beam:
//   I(z) = (1/lambda) | sum_i data_row[i] conj(exp(i (k |x_i - z| + pi/4))) arc_weight |
// where arc_weight = (aperture arc length) / num_receivers. Feeding the kernel
// itself as data gives I = (aperture arc length) / lambda, the calibration value.
double indicator(Vec2 z, const std::vector<Complex>& data_row,
                 const std::vector<Vec2>& receivers, double k, double lambda,
                 double arc_weight);

struct IndicatorMap {
  ElongatedMesh mesh;
  std::vector<double> values;  // aligned with mesh.cells, all >= 0
  int direction_index = -1;
};

// Strip mesh plus indicator values for one measured direction. Uses the noisy
// matrix unless use_clean is set.
IndicatorMap indicator_map(const synthesis::ScatteringDataset& ds, int direction,
                           const SamplingGrid& grid, bool use_clean = false);

struct Peak {
  int cell = -1;
  Vec2 position;
  double value = 0.0;
};

// Greedy non-maximum suppression: repeatedly select the largest remaining
// value (lowest cell index on ties), discarding every mesh cell within
// min_separation (a length; <= 0 selects the default of three grid cells) of
// a selected one. Stops after max_peaks selections or exhaustion; cells with
// value 0 carry no signal and are never selected. Results are in descending
// value order; *underfull is set when fewer than max_peaks survive.
std::vector<Peak> local_maxima(const SamplingGrid& grid, const std::vector<int>& cells,
                               const std::vector<double>& values, int max_peaks,
                               double min_separation = 0.0, bool* underfull = nullptr);
std::vector<Peak> local_maxima(const SamplingGrid& grid, const IndicatorMap& map, int max_peaks,
                               double min_separation = 0.0, bool* underfull = nullptr);

struct ReconstructedPoint {
  Vec2 position;
  int direction = -1;
  double value = 0.0;
  int subdomain = -1;  // set by the separated-domain variant
};

struct Reconstruction {
  std::vector<ReconstructedPoint> points;      // direction-major order
  std::vector<int> skipped_directions;         // strips that missed the grid
};

// Per direction: elongated mesh, indicator on it, up to peaks_per_direction
// maxima tagged with the direction index. Directions whose strip misses the
// grid are skipped and recorded.
Reconstruction reconstruct(const synthesis::ScatteringDataset& ds, const SamplingGrid& grid,
                           int peaks_per_direction, bool use_clean = false);

struct Rect {
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  bool contains(Vec2 p) const {
    return p.x >= xmin && p.x < xmax && p.y >= ymin && p.y < ymax;
  }
};

// Aggregate indicator A(z) = max over directions whose strip covers z of
// I(z; d_j); cells covered by no strip get 0. argmax_direction (optional)
// receives the direction attaining the maximum, -1 where A = 0.
std::vector<double> aggregate_indicator(const synthesis::ScatteringDataset& ds,
                                        const SamplingGrid& grid, bool use_clean = false,
                                        std::vector<int>* argmax_direction = nullptr);

// Multi-obstacle variant: form the aggregate on the full grid, then extract
// up to per_domain_count maxima separately inside each rectangular subdomain
// (cells outside every rectangle are ignored). Points carry the aggregate's
// argmax direction and the subdomain index.
Reconstruction separated_domain_reconstruct(const synthesis::ScatteringDataset& ds,
                                            const SamplingGrid& grid,
                                            const std::vector<Rect>& subdomains,
                                            int per_domain_count, bool use_clean = false);

struct PointSourceFit {
  int candidate = -1;
  Vec2 position;
  Complex monopole;          // coefficient of Phi(., y)
  Complex dipole_x;          // coefficients of grad_y Phi(., y)
  Complex dipole_y;
  double residual = 0.0;     // relative least-squares misfit in [0, 1]
};

// Least-squares fit of a measured row to a monopole plus dipole source at
// each candidate location; returns the candidate with the smallest relative
// residual (first index on ties). Rank-deficient candidates are skipped;
// identically zero data yields the first candidate with zero coefficients.
PointSourceFit point_source_fit(const std::vector<Complex>& data_row,
                                const std::vector<Vec2>& receivers, double k,
                                const std::vector<Vec2>& candidates);

struct Metrics {
  int count = 0;
  double mean_distance = 0.0;
  double max_distance = 0.0;
  double fraction_within = 0.0;
};

// Distance statistics of the recovered points against the true boundary.
// Throws on an empty reconstruction or empty truth.
Metrics reconstruction_metrics(const std::vector<Vec2>& points,
                               const std::vector<geom::BoundaryCurve>& curves, double tol);
Metrics reconstruction_metrics(const Reconstruction& rec,
                               const std::vector<geom::BoundaryCurve>& curves, double tol);

// 16-bit PGM (P2). Values are min-max normalized over the mesh cells; cells
// outside the mesh map to 0. Row order is ymax down to ymin. A sidecar
// path + ".txt" records the value range, grid bounds, and note.
void write_heatmap(const std::string& path, const SamplingGrid& grid,
                   const std::vector<double>& values, const std::vector<int>& mesh = {},
                   const std::string& note = "");

}  // namespace taperscat::imaging
