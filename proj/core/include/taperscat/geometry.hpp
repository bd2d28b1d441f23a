#pragma once

#include <string>
#include <vector>

#include "taperscat/vec2.hpp"

namespace taperscat::geom {

enum class ShapeKind { circle, kite, l_leaf, peanut, pear };

// Smooth closed curve x(t), t in [0, 2pi), counterclockwise.
//   circle:  center + r (cos t, sin t),                params = {r}
//   kite:    center + (cos t + 0.65 cos 2t - 0.65, 1.5 sin t)
//   l_leaf:  center + (1 + 0.2 cos Lt)(cos t, sin t),  params = {L}
//   peanut:  center + sqrt(3 cos^2 t + 1)(cos(t+pi/4), sin(t+pi/4))
//   pear:    center + (1 + 0.15 cos 3t)(cos t, sin t)
struct BoundaryCurve {
  ShapeKind kind = ShapeKind::circle;
  std::vector<double> params;
  Vec2 center{0.0, 0.0};
};

Vec2 position(const BoundaryCurve& c, double t);
Vec2 derivative(const BoundaryCurve& c, double t);
Vec2 second_derivative(const BoundaryCurve& c, double t);

// Unit outward normal (x2', -x1')/|x'|; outward for counterclockwise curves.
Vec2 outward_normal(const BoundaryCurve& c, double t);

// Everything the quadrature needs at the n equispaced parameters 2*pi*j/n.
struct CurveNodes {
  std::vector<double> t;
  std::vector<Vec2> x;
  std::vector<Vec2> dx;
  std::vector<Vec2> ddx;
  std::vector<double> speed;  // |x'|
  std::vector<Vec2> nu;       // unit outward normal
};

// n must be even and >= 8.
CurveNodes sample_nodes(const BoundaryCurve& c, int n);

// Euclidean distance from p to the curve: dense parameter scan followed by
// golden-section refinement of the bracketing interval.
double distance_to_curve(const BoundaryCurve& c, Vec2 p);
double distance_to_curves(const std::vector<BoundaryCurve>& cs, Vec2 p);

// Strict interior test (winding number of a dense inscribed polygon).
bool contains(const BoundaryCurve& c, Vec2 p);

// Named obstacle configurations; "multi" maps to three disjoint curves.
std::vector<BoundaryCurve> shape_registry(const std::string& name);
std::vector<std::string> shape_names();

// Stable serialization names for ShapeKind.
std::string kind_name(ShapeKind k);
ShapeKind kind_from_name(const std::string& name);

}  // namespace taperscat::geom
