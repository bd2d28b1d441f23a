#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "taperscat/geometry.hpp"
#include "taperscat/vec2.hpp"

namespace taperscat::forward {

using IncidentFn = std::function<Complex(Vec2)>;

// Combined-field density phi with u^s = (DL - i eta SL) phi, eta = k.
// For several obstacles the density is one coupled vector, concatenated in
// curve order, n values per curve.
struct DensitySolution {
  std::vector<geom::BoundaryCurve> curves;
  double k = 0.0;
  double eta = 0.0;
  int n_per_curve = 0;
  std::vector<geom::CurveNodes> nodes;
  std::vector<Complex> density;
  std::vector<Complex> boundary_incident;  // u^i at the nodes
};

// Nystrom discretization of (I/2 + K - i eta S) phi = -u^i with the
// product quadrature for the logarithmic singularity. The factorization is
// built once; solve() is const and safe to call from several threads.
// eta_override < 0 selects the default coupling eta = k; eta = 0 degrades
// the equation to the bare double-layer form, which loses unique solvability
// at interior resonances (kept as a diagnostic hook, do not use otherwise).
class NystromSolver {
 public:
  NystromSolver(std::vector<geom::BoundaryCurve> curves, double k, int n_per_curve,
                double eta_override = -1.0);
  ~NystromSolver();
  NystromSolver(NystromSolver&&) noexcept;
  NystromSolver& operator=(NystromSolver&&) noexcept;

  DensitySolution solve(const IncidentFn& ui) const;

  double wavenumber() const;
  double eta() const;
  int unknowns() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

DensitySolution solve_density(const std::vector<geom::BoundaryCurve>& curves,
                              const IncidentFn& ui, double k, int n_per_curve);

// Scattered field at an exterior point (throws on interior / on-boundary x).
Complex eval_scattered(const DensitySolution& sol, Vec2 x);

// On-boundary traces of u^s obtained from the jump relations of the layer
// representation; dnus additionally needs the hypersingular operator, which
// is evaluated in its regularized tangential form.
struct BoundaryTraces {
  std::vector<Complex> us;
  std::vector<Complex> dnus;
};
BoundaryTraces boundary_traces(const DensitySolution& sol);

// u^s(x) from the representation over the boundary traces. With
// illum_threshold > 0 the integral is restricted to nodes where
// |u^i| >= illum_threshold * max |u^i|.
Complex greens_rep_eval(const DensitySolution& sol, const BoundaryTraces& traces, Vec2 x,
                        double illum_threshold = 0.0);
Complex greens_rep_eval(const DensitySolution& sol, Vec2 x, double illum_threshold = 0.0);

// Separation-of-variables reference for the sound-soft circle of radius a
// centered at the origin under a plane wave from direction d:
//   u^s(x) = -sum_{|m| <= nterms} i^m J_m(ka)/H_m(ka) H_m(k|x|) e^{i m (theta_x - theta_d)}
Complex mie_series_reference(double a, double k, Vec2 d, Vec2 x, int nterms);

}  // namespace taperscat::forward
