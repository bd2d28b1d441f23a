#include "taperscat/incident.hpp"

#include <cmath>
#include <stdexcept>

#include "taperscat/specfun.hpp"

namespace taperscat::incident {

namespace {

// Beyond this the Gaussian factor underflows; short-circuit to 0 so the huge
// polynomial prefactors in F never meet an infinity.
constexpr double kExpCutoff = 1400.0;

void check_wave(double k, double g, Vec2 d) {
  if (!(k > 0.0)) throw std::invalid_argument("tapered wave: k must be > 0");
  if (!(g > 0.0)) throw std::invalid_argument("tapered wave: g must be > 0");
  if (std::abs(norm(d) - 1.0) > 1e-12) {
    throw std::invalid_argument("tapered wave: direction must be unit length");
  }
  if (d.x == 0.0 || d.y == 0.0) {
    throw std::invalid_argument("tapered wave: axis-aligned directions (d1*d2 = 0) are excluded");
  }
}

}  // namespace

TaperedWave make_tapered(double k, double g, double theta) {
  const Vec2 d{std::sin(theta), -std::cos(theta)};
  check_wave(k, g, d);
  return {k, g, d, theta, g * std::abs(d.y)};
}

TaperedWave make_tapered_dir(double k, double g, Vec2 d) {
  check_wave(k, g, d);
  const double theta = std::atan2(d.x, -d.y);
  return {k, g, d, theta, g * std::abs(d.y)};
}

double eval_w(const TaperedWave& w, Vec2 x) {
  const double s = dot(x, perp(w.d));
  const double l2 = w.lambda * w.lambda;
  return (2.0 * s * s / l2 - 1.0) / (w.k * w.k * l2);
}

Complex eval_tapered(const TaperedWave& w, Vec2 x) {
  const double s = dot(x, perp(w.d));
  const double l2 = w.lambda * w.lambda;
  const double e = s * s / l2;
  if (e > kExpCutoff) return {0.0, 0.0};
  const double xi = dot(x, w.d);
  const double ww = (2.0 * e - 1.0) / (w.k * w.k * l2);
  return std::polar(std::exp(-e), w.k * xi * (1.0 + ww));
}

Complex eval_F(const TaperedWave& w, Vec2 x) {
  const double s = dot(x, perp(w.d));
  const double l2 = w.lambda * w.lambda;
  const double e = s * s / l2;
  if (e > kExpCutoff) return {0.0, 0.0};
  const double xi = dot(x, w.d);
  const double k = w.k;
  const double k4l4 = k * k * k * k * l2 * l2;
  const double ww = (2.0 * e - 1.0) / (k * k * l2);
  const Complex brace(-ww * ww - 16.0 * xi * xi * s * s / (k4l4 * l2 * l2),
                      4.0 * k * xi / k4l4 * (1.0 - 4.0 * e));
  return eval_tapered(w, x) * brace;
}

Complex eval_plane(double k, Vec2 d, Vec2 x) {
  return std::polar(1.0, k * dot(x, d));
}

Complex eval_point_source(double k, Vec2 y, Vec2 x) {
  const double r = norm(x - y);
  if (r <= 0.0) throw std::domain_error("point source evaluated at its own location");
  const Complex h = specfun::hankel1(0, k * r);
  return Complex(0.0, 0.25) * h;
}

double pde_residual(const TaperedWave& w, Vec2 x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("pde_residual: h must be > 0");
  const double s = dot(x, perp(w.d));
  const double e = s * s / (w.lambda * w.lambda);
  if (std::exp(-e) < 1e-30) {
    throw std::domain_error("pde_residual: Gaussian factor below 1e-30; field is pure underflow here");
  }
  const Complex u = eval_tapered(w, x);
  const Complex lap = (eval_tapered(w, {x.x + h, x.y}) + eval_tapered(w, {x.x - h, x.y}) +
                       eval_tapered(w, {x.x, x.y + h}) + eval_tapered(w, {x.x, x.y - h}) -
                       4.0 * u) /
                      (h * h);
  const double k2 = w.k * w.k;
  const Complex F = eval_F(w, x);
  return std::abs(lap + k2 * u - k2 * F) / (k2 * (std::abs(u) + std::abs(F)) + 1e-300);
}

}  // namespace taperscat::incident
