#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "taperscat/geometry.hpp"
#include "taperscat/vec2.hpp"

namespace taperscat::synthesis {

// Acquisition setup: for each of num_directions tapered beams, record the
// scattered field at num_receivers points on an arc of radius `radius`.
//
// Direction j points at polar angle psi_j = 2*pi*j/num_directions +
// pi/num_directions; the half step keeps every beam off the coordinate axes,
// so the per-beam width lambda_j = g*|d_{j,2}| never vanishes. Receiver i
// sits at polar angle aperture_start + aperture_extent * i / num_receivers.
struct MeasurementConfig {
  std::vector<geom::BoundaryCurve> curves;
  std::string shape;  // registry name, informational
  double k = 25.0;
  double g = 0.01;
  int n_quadrature = 512;
  int num_directions = 128;
  int num_receivers = 256;
  double radius = 5.0;
  double aperture_start = 0.0;
  double aperture_extent = 2.0 * 3.14159265358979323846;
  double noise_level = 0.05;  // in [0, 1)
  std::uint64_t seed = 42;
};

struct ScatteringDataset {
  std::string shape;
  std::vector<geom::BoundaryCurve> curves;
  double k = 0.0;
  double g = 0.0;
  double radius = 0.0;
  double aperture_start = 0.0;
  double aperture_extent = 0.0;
  double noise_level = 0.0;
  std::uint64_t seed = 0;
  int n_quadrature = 0;
  int num_directions = 0;
  int num_receivers = 0;
  std::vector<Vec2> directions;
  std::vector<Vec2> receivers;
  std::vector<double> per_direction_lambda;  // g * |d_{j,2}|
  std::vector<std::vector<Complex>> clean;   // [direction][receiver]
  std::vector<std::vector<Complex>> noisy;

  Vec2 direction(int j) const { return directions.at(j); }
  double lambda(int j) const { return per_direction_lambda.at(j); }
  Vec2 receiver(int i) const { return receivers.at(i); }
};

std::vector<Vec2> build_receivers(const MeasurementConfig& cfg);

// Unit vectors (cos psi_j, sin psi_j), psi_j = 2*pi*j/n + pi/n.
std::vector<Vec2> build_directions(int num_directions);

// Deterministic uniform draw on (-1, 1), keyed by (seed, direction, receiver,
// draw index). Counter-based, so results never depend on evaluation order.
double uniform_pm1(std::uint64_t seed, int direction, int receiver, int draw);

// noisy = clean + noise_level * r1 * |clean| * exp(i pi r2), entrywise.
// |noisy - clean| <= noise_level * |clean| always; zero entries stay zero.
Complex perturb_entry(Complex clean, double noise_level, std::uint64_t seed, int direction,
                      int receiver);
std::vector<std::vector<Complex>> add_noise(const std::vector<std::vector<Complex>>& clean,
                                            double noise_level, std::uint64_t seed);

// Full forward sweep: one factorization of the boundary system, one scattered
// field evaluation matrix, then one right-hand side per direction. Directions
// are distributed over a worker pool; output is byte-identical for any
// TAPERSCAT_THREADS value.
ScatteringDataset synthesize(const MeasurementConfig& cfg);

// Text serialization ("taperscat-ds-1"), 17 significant digits, bit-exact
// round trip.
void save_dataset(const ScatteringDataset& ds, const std::string& path);
ScatteringDataset load_dataset(const std::string& path);

}  // namespace taperscat::synthesis
