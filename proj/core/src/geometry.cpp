#include "taperscat/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace taperscat::geom {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Polar {
  double rho;
  double drho;
  double ddrho;
  double alpha0;  // phase offset of the angular argument
};

// peanut/pear/l_leaf are all center + rho(t) (cos(t+a0), sin(t+a0))
Polar polar_data(const BoundaryCurve& c, double t) {
  switch (c.kind) {
    case ShapeKind::l_leaf: {
      const double L = c.params.at(0);
      return {1.0 + 0.2 * std::cos(L * t), -0.2 * L * std::sin(L * t),
              -0.2 * L * L * std::cos(L * t), 0.0};
    }
    case ShapeKind::pear:
      return {1.0 + 0.15 * std::cos(3.0 * t), -0.45 * std::sin(3.0 * t),
              -1.35 * std::cos(3.0 * t), 0.0};
    case ShapeKind::peanut: {
      const double rho = std::sqrt(3.0 * std::cos(t) * std::cos(t) + 1.0);
      const double drho = -1.5 * std::sin(2.0 * t) / rho;
      const double ddrho = -3.0 * std::cos(2.0 * t) / rho - drho * drho / rho;
      return {rho, drho, ddrho, 0.25 * kPi};
    }
    default:
      throw std::logic_error("polar_data on non-polar shape");
  }
}

bool is_polar(ShapeKind k) {
  return k == ShapeKind::l_leaf || k == ShapeKind::pear || k == ShapeKind::peanut;
}

}  // namespace

Vec2 position(const BoundaryCurve& c, double t) {
  switch (c.kind) {
    case ShapeKind::circle: {
      const double r = c.params.at(0);
      return c.center + Vec2{r * std::cos(t), r * std::sin(t)};
    }
    case ShapeKind::kite:
      return c.center + Vec2{std::cos(t) + 0.65 * std::cos(2.0 * t) - 0.65, 1.5 * std::sin(t)};
    default: {
      const Polar p = polar_data(c, t);
      const double a = t + p.alpha0;
      return c.center + Vec2{p.rho * std::cos(a), p.rho * std::sin(a)};
    }
  }
}

Vec2 derivative(const BoundaryCurve& c, double t) {
  switch (c.kind) {
    case ShapeKind::circle: {
      const double r = c.params.at(0);
      return {-r * std::sin(t), r * std::cos(t)};
    }
    case ShapeKind::kite:
      return {-std::sin(t) - 1.3 * std::sin(2.0 * t), 1.5 * std::cos(t)};
    default: {
      const Polar p = polar_data(c, t);
      const double a = t + p.alpha0;
      const double ca = std::cos(a), sa = std::sin(a);
      return {p.drho * ca - p.rho * sa, p.drho * sa + p.rho * ca};
    }
  }
}

Vec2 second_derivative(const BoundaryCurve& c, double t) {
  switch (c.kind) {
    case ShapeKind::circle: {
      const double r = c.params.at(0);
      return {-r * std::cos(t), -r * std::sin(t)};
    }
    case ShapeKind::kite:
      return {-std::cos(t) - 2.6 * std::cos(2.0 * t), -1.5 * std::sin(t)};
    default: {
      const Polar p = polar_data(c, t);
      const double a = t + p.alpha0;
      const double ca = std::cos(a), sa = std::sin(a);
      return {(p.ddrho - p.rho) * ca - 2.0 * p.drho * sa,
              (p.ddrho - p.rho) * sa + 2.0 * p.drho * ca};
    }
  }
}

Vec2 outward_normal(const BoundaryCurve& c, double t) {
  const Vec2 d = derivative(c, t);
  const double s = norm(d);
  return {d.y / s, -d.x / s};
}

CurveNodes sample_nodes(const BoundaryCurve& c, int n) {
  if (n < 8 || (n % 2) != 0) {
    throw std::invalid_argument("sample_nodes: n must be even and >= 8");
  }
  CurveNodes out;
  out.t.resize(n);
  out.x.resize(n);
  out.dx.resize(n);
  out.ddx.resize(n);
  out.speed.resize(n);
  out.nu.resize(n);
  for (int j = 0; j < n; ++j) {
    const double t = 2.0 * kPi * j / n;
    out.t[j] = t;
    out.x[j] = position(c, t);
    out.dx[j] = derivative(c, t);
    out.ddx[j] = second_derivative(c, t);
    out.speed[j] = norm(out.dx[j]);
    out.nu[j] = {out.dx[j].y / out.speed[j], -out.dx[j].x / out.speed[j]};
  }
  return out;
}

double distance_to_curve(const BoundaryCurve& c, Vec2 p) {
  constexpr int kScan = 4096;
  double best = 1e300;
  int besti = 0;
  for (int i = 0; i < kScan; ++i) {
    const double t = 2.0 * kPi * i / kScan;
    const Vec2 d = position(c, t) - p;
    const double q = dot(d, d);
    if (q < best) {
      best = q;
      besti = i;
    }
  }
  // golden-section refinement on the bracketing parameter interval
  double a = 2.0 * kPi * (besti - 1) / kScan;
  double b = 2.0 * kPi * (besti + 1) / kScan;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  auto f = [&](double t) {
    const Vec2 d = position(c, t) - p;
    return dot(d, d);
  };
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 60; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  return std::sqrt(std::min(f1, f2));
}

double distance_to_curves(const std::vector<BoundaryCurve>& cs, Vec2 p) {
  if (cs.empty()) throw std::invalid_argument("distance_to_curves: empty curve list");
  double best = 1e300;
  for (const auto& c : cs) best = std::min(best, distance_to_curve(c, p));
  return best;
}

bool contains(const BoundaryCurve& c, Vec2 p) {
  // Even-odd crossing count on a dense inscribed polygon.
  constexpr int kScan = 4096;
  bool inside = false;
  Vec2 prev = position(c, 2.0 * kPi * (kScan - 1) / kScan);
  for (int i = 0; i < kScan; ++i) {
    const Vec2 cur = position(c, 2.0 * kPi * i / kScan);
    if ((cur.y > p.y) != (prev.y > p.y)) {
      const double xint = cur.x + (p.y - cur.y) * (prev.x - cur.x) / (prev.y - cur.y);
      if (p.x < xint) inside = !inside;
    }
    prev = cur;
  }
  return inside;
}

std::vector<BoundaryCurve> shape_registry(const std::string& name) {
  if (name == "circle") return {{ShapeKind::circle, {1.0}, {0.0, 0.0}}};
  if (name == "kite") return {{ShapeKind::kite, {}, {0.0, 0.0}}};
  if (name == "leaf3") return {{ShapeKind::l_leaf, {3.0}, {0.0, 0.0}}};
  if (name == "leaf4") return {{ShapeKind::l_leaf, {4.0}, {0.0, 0.0}}};
  if (name == "leaf5") return {{ShapeKind::l_leaf, {5.0}, {0.0, 0.0}}};
  if (name == "peanut") return {{ShapeKind::peanut, {}, {-2.0, 2.0}}};
  if (name == "pear") return {{ShapeKind::pear, {}, {3.0, 2.0}}};
  if (name == "multi") {
    return {{ShapeKind::peanut, {}, {-2.0, 2.0}},
            {ShapeKind::kite, {}, {0.0, -3.0}},
            {ShapeKind::pear, {}, {3.0, 2.0}}};
  }
  throw std::invalid_argument("unknown shape name: " + name);
}

std::vector<std::string> shape_names() {
  return {"circle", "kite", "leaf3", "leaf4", "leaf5", "peanut", "pear", "multi"};
}

std::string kind_name(ShapeKind k) {
  switch (k) {
    case ShapeKind::circle: return "circle";
    case ShapeKind::kite: return "kite";
    case ShapeKind::l_leaf: return "l_leaf";
    case ShapeKind::peanut: return "peanut";
    case ShapeKind::pear: return "pear";
  }
  throw std::invalid_argument("unknown shape kind");
}

ShapeKind kind_from_name(const std::string& name) {
  if (name == "circle") return ShapeKind::circle;
  if (name == "kite") return ShapeKind::kite;
  if (name == "l_leaf") return ShapeKind::l_leaf;
  if (name == "peanut") return ShapeKind::peanut;
  if (name == "pear") return ShapeKind::pear;
  throw std::invalid_argument("unknown shape kind name: " + name);
}

}  // namespace taperscat::geom
