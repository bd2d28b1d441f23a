#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "taperscat/synthesis.hpp"

using namespace taperscat;
namespace sy = taperscat::synthesis;
namespace gm = taperscat::geom;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

sy::MeasurementConfig small_config() {
  sy::MeasurementConfig cfg;
  cfg.curves = gm::shape_registry("circle");
  cfg.shape = "circle";
  cfg.k = 5.0;
  cfg.g = 0.5;
  cfg.n_quadrature = 64;
  cfg.num_directions = 8;
  cfg.num_receivers = 16;
  cfg.radius = 5.0;
  cfg.noise_level = 0.05;
  cfg.seed = 7;
  return cfg;
}

bool identical(const std::vector<std::vector<Complex>>& a,
               const std::vector<std::vector<Complex>>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j].size() != b[j].size()) return false;
    for (std::size_t i = 0; i < a[j].size(); ++i) {
      if (a[j][i] != b[j][i]) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("incident directions sit on half-step polar angles") {
  const auto d4 = sy::build_directions(4);
  REQUIRE(d4.size() == 4);
  const double c = std::sqrt(0.5);
  CHECK(d4[0].x == doctest::Approx(c).epsilon(1e-14));
  CHECK(d4[0].y == doctest::Approx(c).epsilon(1e-14));
  CHECK(d4[1].x == doctest::Approx(-c).epsilon(1e-14));
  CHECK(d4[1].y == doctest::Approx(c).epsilon(1e-14));
  CHECK(d4[2].x == doctest::Approx(-c).epsilon(1e-14));
  CHECK(d4[2].y == doctest::Approx(-c).epsilon(1e-14));
  CHECK(d4[3].x == doctest::Approx(c).epsilon(1e-14));
  CHECK(d4[3].y == doctest::Approx(-c).epsilon(1e-14));

  // the half-step offset keeps every direction clear of the axes, so the
  // beam width g*|d_y| never collapses
  for (int nd : {4, 8, 128, 256}) {
    const auto ds = sy::build_directions(nd);
    const double bound = std::sin(kPi / nd) * std::cos(kPi / nd) * (1.0 - 1e-12);
    for (const auto& d : ds) {
      CHECK(std::abs(norm(d) - 1.0) < 1e-14);
      CHECK(std::abs(d.x * d.y) >= bound);
    }
  }
  CHECK_THROWS_AS(sy::build_directions(0), std::invalid_argument);
}

TEST_CASE("receivers cover the aperture arc uniformly") {
  auto cfg = small_config();
  cfg.num_receivers = 4;
  const auto r = sy::build_receivers(cfg);
  REQUIRE(r.size() == 4);
  CHECK(norm(r[0] - Vec2{5.0, 0.0}) < 1e-12);
  CHECK(norm(r[1] - Vec2{0.0, 5.0}) < 1e-12);
  CHECK(norm(r[2] - Vec2{-5.0, 0.0}) < 1e-12);
  CHECK(norm(r[3] - Vec2{0.0, -5.0}) < 1e-12);

  cfg.aperture_start = 1.0;
  cfg.aperture_extent = kPi;
  const auto half = sy::build_receivers(cfg);
  for (int i = 0; i < 4; ++i) {
    const double th = 1.0 + kPi * i / 4.0;
    CHECK(norm(half[i] - Vec2{5.0 * std::cos(th), 5.0 * std::sin(th)}) < 1e-12);
  }
}

TEST_CASE("counter-based draws are deterministic and well distributed") {
  CHECK(sy::uniform_pm1(42, 3, 5, 0) == sy::uniform_pm1(42, 3, 5, 0));
  CHECK(sy::uniform_pm1(42, 3, 5, 0) != sy::uniform_pm1(42, 3, 5, 1));
  CHECK(sy::uniform_pm1(42, 3, 5, 0) != sy::uniform_pm1(43, 3, 5, 0));
  CHECK(sy::uniform_pm1(42, 3, 5, 0) != sy::uniform_pm1(42, 5, 3, 0));
  double mean = 0.0;
  int count = 0;
  for (int j = 0; j < 100; ++j) {
    for (int i = 0; i < 100; ++i) {
      const double v = sy::uniform_pm1(42, j, i, 0);
      CHECK(v > -1.0);
      CHECK(v < 1.0);
      mean += v;
      ++count;
    }
  }
  CHECK(std::abs(mean / count) < 0.02);
}

TEST_CASE("noise respects the relative bound and never invents signal") {
  const Complex clean(0.3, -0.8);
  for (double delta : {0.05, 0.10, 0.20}) {
    for (int j = 0; j < 50; ++j) {
      const Complex noisy = sy::perturb_entry(clean, delta, 42, j, 11);
      CHECK(std::abs(noisy - clean) <= delta * std::abs(clean) * (1.0 + 1e-12));
    }
  }
  // zero entries stay exactly zero: the perturbation is multiplicative
  CHECK(sy::perturb_entry(Complex(0.0, 0.0), 0.2, 42, 1, 2) == Complex(0.0, 0.0));
  // zero noise level leaves the value bit-identical
  CHECK(sy::perturb_entry(clean, 0.0, 42, 1, 2) == clean);

  std::vector<std::vector<Complex>> m{{Complex(1.0, 0.0), Complex(0.0, 0.0)},
                                      {Complex(0.0, -2.0), Complex(0.5, 0.5)}};
  const auto noisy = sy::add_noise(m, 0.1, 9);
  CHECK(noisy[0][1] == Complex(0.0, 0.0));
  CHECK(std::abs(noisy[1][0] - m[1][0]) <= 0.1 * 2.0 * (1.0 + 1e-12));
  CHECK(identical(sy::add_noise(m, 0.1, 9), noisy));  // repeatable
  CHECK(identical(sy::add_noise(m, 0.0, 9), m));      // delta = 0 is the identity
  CHECK_THROWS_AS(sy::add_noise(m, 1.0, 9), std::invalid_argument);
  CHECK_THROWS_AS(sy::add_noise(m, -0.1, 9), std::invalid_argument);
}

TEST_CASE("synthesize populates every dataset field consistently") {
  const auto cfg = small_config();
  const auto ds = sy::synthesize(cfg);
  CHECK(ds.shape == "circle");
  CHECK(ds.k == cfg.k);
  CHECK(ds.g == cfg.g);
  CHECK(ds.radius == cfg.radius);
  CHECK(ds.noise_level == cfg.noise_level);
  CHECK(ds.seed == cfg.seed);
  CHECK(ds.n_quadrature == cfg.n_quadrature);
  CHECK(ds.num_directions == 8);
  CHECK(ds.num_receivers == 16);
  REQUIRE(ds.directions.size() == 8);
  REQUIRE(ds.receivers.size() == 16);
  REQUIRE(ds.clean.size() == 8);
  REQUIRE(ds.noisy.size() == 8);
  for (int j = 0; j < 8; ++j) {
    CHECK(ds.lambda(j) == cfg.g * std::abs(ds.direction(j).y));
    REQUIRE(ds.clean[j].size() == 16);
    REQUIRE(ds.noisy[j].size() == 16);
    for (int i = 0; i < 16; ++i) {
      CHECK(std::abs(ds.noisy[j][i] - ds.clean[j][i]) <=
            cfg.noise_level * std::abs(ds.clean[j][i]) * (1.0 + 1e-12));
    }
  }
  // the noisy block is exactly the reference noise applied to the clean block
  CHECK(identical(ds.noisy, sy::add_noise(ds.clean, cfg.noise_level, cfg.seed)));
}

TEST_CASE("narrow beams still deliver measurable signal on every row") {
  sy::MeasurementConfig cfg;
  cfg.curves = gm::shape_registry("circle");
  cfg.shape = "circle";
  cfg.k = 25.0;
  cfg.g = 0.01;
  cfg.n_quadrature = 256;
  cfg.num_directions = 8;
  cfg.num_receivers = 32;
  cfg.radius = 5.0;
  cfg.noise_level = 0.0;
  const auto ds = sy::synthesize(cfg);
  for (int j = 0; j < 8; ++j) {
    double rowmax = 0.0;
    for (const auto& v : ds.clean[j]) rowmax = std::max(rowmax, std::abs(v));
    CAPTURE(j);
    CHECK(rowmax > 1e-6);
  }
}

TEST_CASE("synthesis output is independent of the worker count") {
  const auto cfg = small_config();
  const char* saved = std::getenv("TAPERSCAT_THREADS");
  const std::string restore = saved ? saved : "";

  setenv("TAPERSCAT_THREADS", "1", 1);
  const auto one = sy::synthesize(cfg);
  setenv("TAPERSCAT_THREADS", "4", 1);
  const auto four = sy::synthesize(cfg);
  if (saved) {
    setenv("TAPERSCAT_THREADS", restore.c_str(), 1);
  } else {
    unsetenv("TAPERSCAT_THREADS");
  }
  CHECK(identical(one.clean, four.clean));
  CHECK(identical(one.noisy, four.noisy));
  // and a repeat run is bitwise reproducible outright
  const auto again = sy::synthesize(cfg);
  CHECK(identical(one.clean, again.clean));
  CHECK(identical(one.noisy, again.noisy));
}

TEST_CASE("dataset files round-trip bit-exactly") {
  const auto cfg = small_config();
  const auto ds = sy::synthesize(cfg);
  const std::string p1 = "ds_roundtrip_a.txt";
  const std::string p2 = "ds_roundtrip_b.txt";
  sy::save_dataset(ds, p1);
  const auto back = sy::load_dataset(p1);
  CHECK(back.shape == ds.shape);
  CHECK(back.k == ds.k);
  CHECK(back.g == ds.g);
  CHECK(back.radius == ds.radius);
  CHECK(back.aperture_start == ds.aperture_start);
  CHECK(back.aperture_extent == ds.aperture_extent);
  CHECK(back.noise_level == ds.noise_level);
  CHECK(back.seed == ds.seed);
  CHECK(back.n_quadrature == ds.n_quadrature);
  REQUIRE(back.curves.size() == ds.curves.size());
  for (std::size_t c = 0; c < ds.curves.size(); ++c) {
    CHECK(back.curves[c].kind == ds.curves[c].kind);
    CHECK(back.curves[c].center.x == ds.curves[c].center.x);
    CHECK(back.curves[c].center.y == ds.curves[c].center.y);
    CHECK(back.curves[c].params == ds.curves[c].params);
  }
  REQUIRE(back.directions.size() == ds.directions.size());
  for (std::size_t j = 0; j < ds.directions.size(); ++j) {
    CHECK(back.directions[j].x == ds.directions[j].x);
    CHECK(back.directions[j].y == ds.directions[j].y);
    CHECK(back.per_direction_lambda[j] == ds.per_direction_lambda[j]);
  }
  for (std::size_t i = 0; i < ds.receivers.size(); ++i) {
    CHECK(back.receivers[i].x == ds.receivers[i].x);
    CHECK(back.receivers[i].y == ds.receivers[i].y);
  }
  CHECK(identical(back.clean, ds.clean));
  CHECK(identical(back.noisy, ds.noisy));

  // a save of the reloaded dataset is byte-identical to the first file
  sy::save_dataset(back, p2);
  CHECK(slurp(p1) == slurp(p2));
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("load_dataset rejects foreign and truncated files") {
  const std::string p = "ds_bad.txt";
  {
    std::ofstream out(p);
    out << "not-a-dataset 1 2 3\n";
  }
  CHECK_THROWS_AS(sy::load_dataset(p), std::runtime_error);
  {
    std::ofstream out(p);
    out << "taperscat-ds-1\nshape circle\nk 5\n";  // cut off early
  }
  CHECK_THROWS_AS(sy::load_dataset(p), std::runtime_error);
  std::remove(p.c_str());
  CHECK_THROWS_AS(sy::load_dataset("no_such_file.txt"), std::runtime_error);
}

TEST_CASE("configuration validation") {
  auto cfg = small_config();
  cfg.curves.clear();
  CHECK_THROWS_AS(sy::synthesize(cfg), std::invalid_argument);

  cfg = small_config();
  cfg.noise_level = 1.0;
  CHECK_THROWS_AS(sy::synthesize(cfg), std::invalid_argument);
  cfg.noise_level = -0.05;
  CHECK_THROWS_AS(sy::synthesize(cfg), std::invalid_argument);

  cfg = small_config();
  cfg.radius = 0.5;  // inside the unit circle
  CHECK_THROWS_AS(sy::synthesize(cfg), std::invalid_argument);
  try {
    sy::synthesize(cfg);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("circumscribed") != std::string::npos);
  }

  cfg = small_config();
  cfg.aperture_extent = 0.0;
  CHECK_THROWS_AS(sy::synthesize(cfg), std::invalid_argument);
  cfg.aperture_extent = 7.0;
  CHECK_THROWS_AS(sy::synthesize(cfg), std::invalid_argument);

  cfg = small_config();
  cfg.num_receivers = 1;
  CHECK_THROWS_AS(sy::synthesize(cfg), std::invalid_argument);
}
