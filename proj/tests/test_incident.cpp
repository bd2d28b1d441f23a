#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "taperscat/incident.hpp"
#include "taperscat/specfun.hpp"

using namespace taperscat;
namespace in = taperscat::incident;

namespace {
constexpr double kPi = 3.14159265358979323846;

// points spread along and slightly across the beam axis, all with a live
// Gaussian factor
std::vector<Vec2> beam_points(const in::TaperedWave& w, int count) {
  std::vector<Vec2> pts;
  const Vec2 dp = perp(w.d);
  for (int i = 0; pts.size() < static_cast<std::size_t>(count) && i < 100000; ++i) {
    const double along = -2.0 + 4.0 * i / 997.0;
    const double across = 0.4 * w.lambda * std::sin(31.0 * i);
    const Vec2 x = along * w.d + across * dp;
    const double s = dot(x, dp);
    if (std::exp(-s * s / (w.lambda * w.lambda)) < 1e-12) continue;
    pts.push_back(x);
  }
  return pts;
}
}  // namespace

TEST_CASE("construction fixes direction, angle, and width together") {
  const auto w = in::make_tapered(25.0, 0.1, kPi / 3.0);
  CHECK(w.d.x == doctest::Approx(std::sin(kPi / 3.0)).epsilon(1e-15));
  CHECK(w.d.y == doctest::Approx(-std::cos(kPi / 3.0)).epsilon(1e-15));
  CHECK(std::abs(norm(w.d) - 1.0) < 1e-15);
  CHECK(w.lambda == doctest::Approx(0.1 * std::abs(w.d.y)).epsilon(1e-15));

  // direction-based construction recovers the same wave
  const auto w2 = in::make_tapered_dir(25.0, 0.1, w.d);
  CHECK(w2.theta == doctest::Approx(w.theta).epsilon(1e-14));
  CHECK(w2.lambda == doctest::Approx(w.lambda).epsilon(1e-15));

  const double c = std::cos(0.37), s = std::sin(0.37);
  const auto w3 = in::make_tapered_dir(10.0, 0.05, {c, s});
  CHECK(w3.lambda == doctest::Approx(0.05 * std::abs(s)).epsilon(1e-14));
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(in::make_tapered(0.0, 0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(in::make_tapered(-5.0, 0.1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(in::make_tapered(5.0, 0.0, 1.0), std::invalid_argument);
  // axis-aligned directions have zero width and are excluded
  CHECK_THROWS_AS(in::make_tapered(5.0, 0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(in::make_tapered(5.0, 0.1, kPi / 2.0), std::invalid_argument);
  CHECK_THROWS_AS(in::make_tapered_dir(5.0, 0.1, {1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(in::make_tapered_dir(5.0, 0.1, {0.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(in::make_tapered_dir(5.0, 0.1, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("field value decomposes into phase and Gaussian factors") {
  const auto w = in::make_tapered(25.0, 0.1, 0.9);
  for (int i = 0; i < 40; ++i) {
    const Vec2 x{-1.0 + 0.05 * i, 0.3 - 0.02 * i};
    const double s = dot(x, perp(w.d));
    const double xi = dot(x, w.d);
    const double expected_w = (2.0 * s * s / (w.lambda * w.lambda) - 1.0) /
                              (w.k * w.k * w.lambda * w.lambda);
    CHECK(in::eval_w(w, x) == doctest::Approx(expected_w).epsilon(1e-12));
    const Complex u = in::eval_tapered(w, x);
    const double gauss = std::exp(-s * s / (w.lambda * w.lambda));
    CHECK(std::abs(u) == doctest::Approx(gauss).epsilon(1e-12));
    // the large phase k xi (1 + w) makes the comparison sensitive at the
    // last-ulps level, hence the slack
    const Complex phase = std::polar(1.0, w.k * xi * (1.0 + expected_w));
    CHECK(std::abs(u - gauss * phase) < 1e-10 * (gauss + 1e-30));
  }
  // on the beam axis the modulus is exactly the unit Gaussian peak
  const Vec2 on_axis = 0.7 * w.d;
  CHECK(std::abs(in::eval_tapered(w, on_axis)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("field underflows to exact zero far off axis") {
  const auto w = in::make_tapered(25.0, 0.1, 0.9);
  const Vec2 far = 1e6 * perp(w.d);
  CHECK(in::eval_tapered(w, far) == Complex(0.0, 0.0));
  CHECK(in::eval_F(w, far) == Complex(0.0, 0.0));
  CHECK_THROWS_AS(in::pde_residual(w, far, 1e-4), std::domain_error);
}

TEST_CASE("inhomogeneous Helmholtz equation is satisfied to discretization order") {
  const auto w = in::make_tapered(25.0, 0.1, kPi / 3.0);
  const auto pts = beam_points(w, 50);
  REQUIRE(pts.size() == 50);
  double worst4 = 0.0;
  for (const auto& x : pts) worst4 = std::max(worst4, in::pde_residual(w, x, 1e-4));
  CHECK(worst4 <= 1e-3);

  // five-point truncation is O(h^2): widening h tenfold grows the residual
  // by about a hundred
  double worst3 = 0.0;
  for (const auto& x : pts) worst3 = std::max(worst3, in::pde_residual(w, x, 1e-3));
  CHECK(worst3 >= 30.0 * worst4);
  CHECK(worst3 <= 300.0 * worst4);
}

TEST_CASE("the equation also holds for other parameter combinations") {
  for (const auto& [k, g, th] : {std::tuple{5.0, 0.5, 0.7}, std::tuple{25.0, 0.01, 2.0},
                                 std::tuple{20.0, 0.3, -0.9}}) {
    const auto w = in::make_tapered(k, g, th);
    const auto pts = beam_points(w, 20);
    double worst = 0.0;
    for (const auto& x : pts) worst = std::max(worst, in::pde_residual(w, x, 1e-4));
    CAPTURE(k);
    CAPTURE(g);
    CHECK(worst <= 1e-3);
  }
}

TEST_CASE("plane wave and point source helpers") {
  const Vec2 d{std::sin(0.4), -std::cos(0.4)};
  const Vec2 x{1.2, -0.3};
  const Complex p = in::eval_plane(25.0, d, x);
  CHECK(std::abs(p) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::arg(p) == doctest::Approx(std::remainder(25.0 * dot(x, d), 2.0 * kPi)).epsilon(1e-12));

  const Vec2 y{0.1, 0.2};
  const Complex ps = in::eval_point_source(25.0, y, x);
  const Complex ref = Complex(0.0, 0.25) * specfun::hankel1(0, 25.0 * norm(x - y));
  CHECK(std::abs(ps - ref) == 0.0);
  CHECK_THROWS_AS(in::eval_point_source(25.0, y, y), std::domain_error);
}

TEST_CASE("pde_residual validates its step size") {
  const auto w = in::make_tapered(25.0, 0.1, 0.5);
  CHECK_THROWS_AS(in::pde_residual(w, {0.0, 0.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(in::pde_residual(w, {0.0, 0.0}, -1e-4), std::invalid_argument);
}
