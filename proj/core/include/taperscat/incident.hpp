#pragma once

#include "taperscat/vec2.hpp"

namespace taperscat::incident {

// Tapered beam of Thorsos type, propagating along the unit direction d:
//
//   u^i(x) = exp(i k (x.d) (1 + w(x))) * exp(-(x.d_perp)^2 / lambda^2)
//   w(x)   = (2 (x.d_perp)^2 / lambda^2 - 1) / (k lambda)^2
//
// with d = (sin theta, -cos theta), d_perp = (-d2, d1), lambda = g |d2|.
// It solves Delta u + k^2 u = k^2 F exactly, with F given by eval_F.
struct TaperedWave {
  double k = 0.0;
  double g = 0.0;
  Vec2 d{0.0, -1.0};
  double theta = 0.0;
  double lambda = 0.0;
};

// theta is the incidence angle; d = (sin theta, -cos theta).
TaperedWave make_tapered(double k, double g, double theta);

// From a unit direction with d1*d2 != 0.
TaperedWave make_tapered_dir(double k, double g, Vec2 d);

double eval_w(const TaperedWave& w, Vec2 x);
Complex eval_tapered(const TaperedWave& w, Vec2 x);

// Source density F with Delta u^i + k^2 u^i = k^2 F.
Complex eval_F(const TaperedWave& w, Vec2 x);

Complex eval_plane(double k, Vec2 d, Vec2 x);

// Phi(x, y) = (i/4) H_0^(1)(k |x - y|), x != y.
Complex eval_point_source(double k, Vec2 y, Vec2 x);

// Normalized 5-point residual |Delta_h u + k^2 u - k^2 F| / (k^2 (|u| + |F|)).
// Rejects points where the Gaussian factor is below 1e-30.
double pde_residual(const TaperedWave& w, Vec2 x, double h);

}  // namespace taperscat::incident
