#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "dtbh/distributions.hpp"
#include "dtbh/random.hpp"
#include "test_support.hpp"

using dtbh::DensityModel;
using dtbh::Point;
using dtbh::RandomStream;

TEST_CASE("standard normal density and distribution at the origin") {
  auto g = DensityModel::gaussian(0.0, 1.0);
  CHECK(g.pdf(Point(0.0)) == doctest::Approx(0.3989423).epsilon(1e-6));
  CHECK(g.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("exponential rate-2 density, distribution and survival") {
  auto e = DensityModel::exponential(2.0);
  CHECK(e.pdf(Point(0.5)) == doctest::Approx(0.7357589).epsilon(1e-6));
  CHECK(e.cdf(0.5) == doctest::Approx(0.6321206).epsilon(1e-6));
  CHECK(1.0 - e.cdf(0.5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
  CHECK(e.pdf(Point(-0.25)) == 0.0);
  CHECK(e.cdf(-0.25) == 0.0);
}

TEST_CASE("quantile inverts the distribution function") {
  std::vector<DensityModel> models = {
      DensityModel::gaussian(0.0, 1.0),
      DensityModel::gaussian(1.5, 0.25),
      DensityModel::exponential(2.0),
      DensityModel::uniform_cube(1),
      DensityModel::mixture({{0.3, DensityModel::gaussian(-1.0, 0.5)},
                             {0.7, DensityModel::gaussian(2.0, 1.0)}}),
      dtbh::testing::triangular_density(),
  };
  for (const auto& m : models) {
    for (double u : {0.001, 0.1, 0.37, 0.5, 0.78, 0.95, 0.999}) {
      CHECK(m.cdf(m.quantile(u)) == doctest::Approx(u).epsilon(1e-7));
    }
  }
}

TEST_CASE("gaussian cdf is symmetric and matches erfc tails") {
  auto g = DensityModel::gaussian(0.0, 1.0);
  CHECK(g.cdf(1.959963985) == doctest::Approx(0.975).epsilon(1e-8));
  CHECK(g.cdf(-1.959963985) == doctest::Approx(0.025).epsilon(1e-8));
  for (double x : {0.3, 1.0, 2.5}) {
    CHECK(g.cdf(x) + g.cdf(-x) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("mixture density and distribution are weighted sums") {
  auto a = DensityModel::gaussian(0.0, 1.0);
  auto b = DensityModel::exponential(2.0);
  auto mix = DensityModel::mixture({{0.25, a}, {0.75, b}});
  for (double x : {0.1, 0.5, 1.3}) {
    CHECK(mix.pdf(Point(x)) ==
          doctest::Approx(0.25 * a.pdf(Point(x)) + 0.75 * b.pdf(Point(x)))
              .epsilon(1e-12));
    CHECK(mix.cdf(x) ==
          doctest::Approx(0.25 * a.cdf(x) + 0.75 * b.cdf(x)).epsilon(1e-12));
  }
}

TEST_CASE("uniform cube in one and two dimensions") {
  auto u1 = DensityModel::uniform_cube(1);
  CHECK(u1.pdf(Point(0.4)) == 1.0);
  CHECK(u1.pdf(Point(1.4)) == 0.0);
  CHECK(u1.cdf(0.25) == doctest::Approx(0.25));
  auto u2 = DensityModel::uniform_cube(2);
  CHECK(u2.dimension() == 2);
  CHECK(u2.pdf(Point(0.3, 0.9)) == 1.0);
  CHECK(u2.pdf(Point(0.3, 1.1)) == 0.0);
}

TEST_CASE("tabulated model renormalizes and integrates cell masses") {
  auto t = DensityModel::tabulated({2.0, 6.0, 2.0, 2.0}, 1);
  // Total raw mass is 3, so normalized values are {2/3, 2, 2/3, 2/3}.
  CHECK(t.pdf(Point(0.1)) == doctest::Approx(2.0 / 3.0));
  CHECK(t.pdf(Point(0.3)) == doctest::Approx(2.0));
  CHECK(t.cdf(0.25) == doctest::Approx(1.0 / 6.0));
  CHECK(t.cdf(0.5) == doctest::Approx(1.0 / 6.0 + 0.5));
  CHECK(t.cdf(1.0) == doctest::Approx(1.0));
  CHECK(t.quantile(t.cdf(0.37)) == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("triangular table matches its closed-form distribution") {
  auto tri = dtbh::testing::triangular_density();
  for (double x : {0.1, 0.25, 0.5, 0.8}) {
    const double exact =
        x <= 0.5 ? 2.0 * x * x : 1.0 - 2.0 * (1.0 - x) * (1.0 - x);
    CHECK(tri.cdf(x) == doctest::Approx(exact).epsilon(1e-6));
  }
}

TEST_CASE("sampling matches first and second moments") {
  RandomStream rng(20240817);
  const int n = 200000;

  auto g = DensityModel::gaussian(2.0, 3.0);
  std::vector<double> xs(n);
  for (auto& x : xs) x = g.sample1(rng);
  CHECK(dtbh::testing::sample_mean(xs) == doctest::Approx(2.0).epsilon(0.02));
  CHECK(dtbh::testing::sample_stddev(xs) == doctest::Approx(3.0).epsilon(0.02));

  auto e = DensityModel::exponential(2.0);
  for (auto& x : xs) x = e.sample1(rng);
  CHECK(dtbh::testing::sample_mean(xs) == doctest::Approx(0.5).epsilon(0.02));

  auto tri = dtbh::testing::triangular_density();
  for (auto& x : xs) x = tri.sample1(rng);
  CHECK(dtbh::testing::sample_mean(xs) == doctest::Approx(0.5).epsilon(0.02));
  CHECK(dtbh::testing::sample_stddev(xs) ==
        doctest::Approx(std::sqrt(1.0 / 24.0)).epsilon(0.03));
}

TEST_CASE("radial model normalizes over the square and decays with radius") {
  auto cone = DensityModel::radial2d(
      [](double r) { return std::max(0.0, 1.0 - r / 0.3); });
  CHECK(cone.dimension() == 2);
  // Mass check by midpoint sum at an unrelated resolution.
  const int n = 300;
  double mass = 0.0;
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      mass += cone.pdf(Point((ix + 0.5) / n, (iy + 0.5) / n));
    }
  }
  mass /= n * n;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
  // The cone supported on radius 0.3 has volume pi * 0.3^2 / 3, so the peak
  // density is its reciprocal.
  CHECK(cone.pdf(Point(0.5, 0.5)) ==
        doctest::Approx(3.0 / (3.14159265358979 * 0.09)).epsilon(1e-3));
  CHECK(cone.pdf(Point(0.5, 0.85)) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(cone.pdf(Point(0.5, 0.65)) > cone.pdf(Point(0.5, 0.75)));
}

TEST_CASE("radial sampling concentrates near the center") {
  auto bump = DensityModel::radial2d(
      [](double r) { return std::exp(-0.5 * r * r / (0.1 * 0.1)); });
  RandomStream rng(7);
  int inside = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    Point p = bump.sample(rng);
    const double dx = p.x() - 0.5, dy = p.y() - 0.5;
    if (dx * dx + dy * dy <= 0.2 * 0.2) ++inside;
  }
  // P(R <= 2 sigma) = 1 - exp(-2) ~= 0.8647 for the untruncated kernel.
  CHECK(static_cast<double>(inside) / n ==
        doctest::Approx(0.8647).epsilon(0.02));
}

TEST_CASE("product model factorizes and samples independently") {
  auto pr = DensityModel::product(DensityModel::gaussian(0.0, 1.0),
                                  DensityModel::gaussian(1.0, 2.0));
  CHECK(pr.dimension() == 2);
  auto gx = DensityModel::gaussian(0.0, 1.0);
  auto gy = DensityModel::gaussian(1.0, 2.0);
  CHECK(pr.pdf(Point(0.3, -0.7)) ==
        doctest::Approx(gx.pdf(Point(0.3)) * gy.pdf(Point(-0.7)))
            .epsilon(1e-12));
  RandomStream rng(99);
  std::vector<double> xs, ys;
  for (int i = 0; i < 100000; ++i) {
    Point p = pr.sample(rng);
    xs.push_back(p.x());
    ys.push_back(p.y());
  }
  CHECK(dtbh::testing::sample_mean(xs) == doctest::Approx(0.0).epsilon(0.02));
  CHECK(dtbh::testing::sample_mean(ys) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(dtbh::testing::sample_stddev(ys) == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("shifted model translates density, distribution and support") {
  auto s = DensityModel::shifted(DensityModel::exponential(2.0), 2.8);
  auto e = DensityModel::exponential(2.0);
  CHECK(s.pdf(Point(3.3)) == doctest::Approx(e.pdf(Point(0.5))).epsilon(1e-12));
  CHECK(s.cdf(3.3) == doctest::Approx(e.cdf(0.5)).epsilon(1e-12));
  CHECK(s.support().lo == doctest::Approx(2.8));
  CHECK(s.quantile(0.5) == doctest::Approx(e.quantile(0.5) + 2.8));
}

TEST_CASE("zero-spread gaussian samples its mean but refuses densities") {
  auto d = DensityModel::gaussian(2.8, 0.0);
  CHECK(d.degenerate());
  RandomStream rng(1);
  CHECK(d.sample1(rng) == 2.8);
  CHECK_THROWS_AS(d.pdf(Point(2.8)), dtbh::NumericError);
  CHECK_THROWS_AS(d.cdf(2.8), dtbh::NumericError);
}

TEST_CASE("invalid constructions are rejected") {
  CHECK_THROWS_AS(DensityModel::exponential(0.0), dtbh::ConfigError);
  CHECK_THROWS_AS(DensityModel::exponential(-1.0), dtbh::ConfigError);
  CHECK_THROWS_AS(DensityModel::uniform_cube(3), dtbh::ConfigError);
  CHECK_THROWS_AS(
      DensityModel::mixture({{0.4, DensityModel::gaussian(0.0, 1.0)},
                             {0.4, DensityModel::gaussian(1.0, 1.0)}}),
      dtbh::ConfigError);
  CHECK_THROWS_AS(
      DensityModel::mixture({{-0.1, DensityModel::gaussian(0.0, 1.0)},
                             {1.1, DensityModel::gaussian(1.0, 1.0)}}),
      dtbh::ConfigError);
  CHECK_THROWS_AS(DensityModel::tabulated({1.0, -2.0}, 1), dtbh::ConfigError);
  CHECK_THROWS_AS(DensityModel::tabulated({1.0, 2.0, 3.0}, 2),
                  dtbh::ConfigError);
  // A profile that increases with radius must be refused.
  CHECK_THROWS_AS(DensityModel::radial2d([](double r) { return r; }),
                  dtbh::ConfigError);
}

TEST_CASE("gaussian support covers eight standard deviations") {
  auto g = DensityModel::gaussian(1.0, 2.0);
  CHECK(g.support().lo == doctest::Approx(1.0 - 16.0));
  CHECK(g.support().hi == doctest::Approx(1.0 + 16.0));
}

TEST_CASE("random streams are deterministic and decorrelated") {
  RandomStream a(42, 3, 1), b(42, 3, 1), c(42, 4, 1);
  bool all_equal = true;
  bool any_equal_cross = false;
  for (int i = 0; i < 100; ++i) {
    const double ua = a.uniform();
    if (ua != b.uniform()) all_equal = false;
    if (ua == c.uniform()) any_equal_cross = true;
  }
  CHECK(all_equal);
  CHECK_FALSE(any_equal_cross);
}

TEST_CASE("uniform draws stay inside the half-open unit interval") {
  RandomStream rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = rng.uniform_pos();
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
}
