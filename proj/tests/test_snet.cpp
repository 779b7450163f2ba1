#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "dtbh/metrics.hpp"
#include "dtbh/snet.hpp"

using dtbh::DensityModel;
using dtbh::Point;
using dtbh::RandomStream;
using dtbh::Scenario;
using dtbh::SensingMode;

namespace {

Scenario small_scenario() {
  Scenario sc;
  sc.grid_width = 21;
  sc.grid_height = 21;
  sc.num_objects = 1;
  sc.object_positions = std::vector<Point>{Point(10.0, 10.0)};
  return sc;
}

int sensor_index(const Scenario& sc, int x, int y) {
  return y * sc.grid_width + x;
}

}  // namespace

TEST_CASE("labels follow the effective-radius rule") {
  auto sc = small_scenario();
  const auto sensors = dtbh::sensor_positions(sc);
  RandomStream rng(1);
  const auto objects = dtbh::place_objects(sc, rng);
  const auto labels = dtbh::ground_truth(sc, sensors, objects);
  CHECK(labels[static_cast<std::size_t>(sensor_index(sc, 10, 12))]);   // d = 2
  CHECK(!labels[static_cast<std::size_t>(sensor_index(sc, 10, 13))]);  // d = 3
  CHECK(labels[static_cast<std::size_t>(sensor_index(sc, 10, 10))]);   // d = 0
  CHECK(!labels[static_cast<std::size_t>(sensor_index(sc, 12, 12))]);  // d = 2.83
}

TEST_CASE("no objects means every sensor is a null") {
  Scenario sc;
  sc.grid_width = 8;
  sc.grid_height = 8;
  sc.num_objects = 0;
  RandomStream rng(2);
  const auto field = dtbh::sample_field(sc, rng);
  CHECK(field.objects.empty());
  CHECK(field.m1() == 0);
  CHECK(std::none_of(field.labels.begin(), field.labels.end(),
                     [](bool b) { return b; }));
}

TEST_CASE("explicit object lists pass through and are validated") {
  auto sc = small_scenario();
  RandomStream rng(3);
  const auto objects = dtbh::place_objects(sc, rng);
  REQUIRE(objects.size() == 1);
  CHECK(objects[0].x() == 10.0);
  CHECK(objects[0].y() == 10.0);

  sc.num_objects = 2;  // list length no longer matches
  CHECK_THROWS_AS(dtbh::place_objects(sc, rng), dtbh::ConfigError);

  sc.num_objects = 1;
  sc.object_positions = std::vector<Point>{Point(40.0, 10.0)};  // off the hull
  CHECK_THROWS_AS(dtbh::place_objects(sc, rng), dtbh::ConfigError);
}

TEST_CASE("random placement is in bounds and reproducible") {
  Scenario sc;
  sc.grid_width = 100;
  sc.grid_height = 100;
  sc.num_objects = 10;
  RandomStream a(42), b(42), c(43);
  const auto oa = dtbh::place_objects(sc, a);
  const auto ob = dtbh::place_objects(sc, b);
  const auto oc = dtbh::place_objects(sc, c);
  REQUIRE(oa.size() == 10);
  bool same = true, differ = false;
  for (std::size_t i = 0; i < oa.size(); ++i) {
    CHECK(oa[i].x() >= 0.0);
    CHECK(oa[i].x() <= 99.0);
    CHECK(oa[i].y() >= 0.0);
    CHECK(oa[i].y() <= 99.0);
    same = same && oa[i].x() == ob[i].x() && oa[i].y() == ob[i].y();
    differ = differ || oa[i].x() != oc[i].x();
  }
  CHECK(same);
  CHECK(differ);
}

TEST_CASE("noise-free ideal sensing gives exact levels") {
  auto sc = small_scenario();
  sc.null_noise = DensityModel::gaussian(0.0, 0.0);
  sc.alt_noise = DensityModel::gaussian(0.0, 0.0);
  RandomStream rng(4);
  const auto field = dtbh::sample_field(sc, rng);
  CHECK(field.observations[static_cast<std::size_t>(sensor_index(sc, 10, 10))] ==
        doctest::Approx(2.8));
  CHECK(field.observations[static_cast<std::size_t>(sensor_index(sc, 0, 0))] ==
        doctest::Approx(0.0));
  CHECK(field.m1() ==
        static_cast<int>(std::count(field.labels.begin(), field.labels.end(),
                                    true)));
}

TEST_CASE("path gain formula at zero and at four pixels") {
  CHECK(dtbh::received_power(0.0, 2.8, 2.0) == doctest::Approx(2.8));
  CHECK(dtbh::received_power(4.0, 2.8, 2.0) == doctest::Approx(0.112));
  CHECK(dtbh::received_power(1.0, 1.0, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("interference reaches beyond the effective radius") {
  auto sc = small_scenario();
  sc.sensing = SensingMode::physics;
  sc.null_noise = DensityModel::gaussian(0.0, 0.0);
  sc.alt_noise = DensityModel::gaussian(0.0, 0.0);
  RandomStream rng(5);
  const auto field = dtbh::sample_field(sc, rng);
  // A null sensor four pixels out hears the far-field term only.
  CHECK(field.observations[static_cast<std::size_t>(sensor_index(sc, 10, 14))] ==
        doctest::Approx(0.112).epsilon(1e-12));
  // The sensor on top of the object hears the full signal.
  CHECK(field.observations[static_cast<std::size_t>(sensor_index(sc, 10, 10))] ==
        doctest::Approx(2.8).epsilon(1e-12));
  // Far-field power decays monotonically with distance.
  double prev = 1e9;
  for (int d = 3; d <= 10; ++d) {
    const double obs =
        field.observations[static_cast<std::size_t>(sensor_index(sc, 10, 10 + d))];
    CHECK(obs >= 0.0);
    CHECK(obs <= prev + 1e-12);
    prev = obs;
  }
}

TEST_CASE("non-ideal sensing perturbs both labels within their ranges") {
  Scenario sc;
  sc.grid_width = 40;
  sc.grid_height = 40;
  sc.num_objects = 4;
  sc.sensing = SensingMode::nonideal;
  sc.null_noise = DensityModel::gaussian(0.0, 0.0);
  sc.alt_noise = DensityModel::gaussian(0.0, 0.0);
  RandomStream rng(6);
  const auto field = dtbh::sample_field(sc, rng);
  double null_min = 1e9, null_max = -1e9;
  for (std::size_t i = 0; i < field.labels.size(); ++i) {
    if (field.labels[i]) {
      CHECK(field.observations[i] >= 2.7 - 1e-12);
      CHECK(field.observations[i] <= 2.8 + 1e-12);
    } else {
      CHECK(field.observations[i] >= 0.0 - 1e-12);
      CHECK(field.observations[i] <= 0.1 + 1e-12);
      null_min = std::min(null_min, field.observations[i]);
      null_max = std::max(null_max, field.observations[i]);
    }
  }
  // The offsets genuinely spread over the configured interval.
  CHECK(null_min < 0.02);
  CHECK(null_max > 0.08);
}

TEST_CASE("ideal null observations pool to the noise law") {
  Scenario sc;
  sc.grid_width = 100;
  sc.grid_height = 100;
  sc.num_objects = 0;
  RandomStream rng(7);
  const auto field = dtbh::sample_field(sc, rng);
  auto noise = sc.null_noise;
  const double ks = dtbh::ks_statistic(
      field.observations, [&](double y) { return noise.cdf(y); });
  CHECK(ks < 0.01);
}

TEST_CASE("detector models are the ideal pair") {
  Scenario sc;
  sc.theta = 2.8;
  sc.alt_noise = DensityModel::gaussian(0.0, 0.05);
  const auto g0 = dtbh::assumed_null(sc);
  const auto g1 = dtbh::assumed_alt(sc);
  CHECK(g0.cdf(0.5) == doctest::Approx(sc.null_noise.cdf(0.5)));
  CHECK(g1.cdf(2.8) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(g1.cdf(2.8 + 0.05) == doctest::Approx(0.8413447).epsilon(1e-6));
}

TEST_CASE("labels are independent of the sensing mode") {
  Scenario sc;
  sc.grid_width = 30;
  sc.grid_height = 30;
  sc.num_objects = 3;
  for (auto mode :
       {SensingMode::ideal, SensingMode::nonideal, SensingMode::physics}) {
    Scenario sm = sc;
    sm.sensing = mode;
    RandomStream rng(8);
    const auto field = dtbh::sample_field(sm, rng);
    // Same seed, same placement, same labels regardless of observation mode.
    RandomStream rng2(8);
    const auto objects = dtbh::place_objects(sm, rng2);
    for (std::size_t i = 0; i < objects.size(); ++i) {
      CHECK(field.objects[i].x() == objects[i].x());
    }
    const auto labels =
        dtbh::ground_truth(sm, dtbh::sensor_positions(sm), objects);
    CHECK(labels == field.labels);
  }
}

TEST_CASE("scenario validation rejects bad geometry") {
  Scenario sc;
  sc.r_eff = 0.0;
  CHECK_THROWS_AS(sc.validate(), dtbh::ConfigError);
  sc = Scenario{};
  sc.theta = -1.0;
  CHECK_THROWS_AS(sc.validate(), dtbh::ConfigError);
  sc = Scenario{};
  sc.grid_width = 0;
  CHECK_THROWS_AS(sc.validate(), dtbh::ConfigError);
  sc = Scenario{};
  sc.num_objects = -1;
  CHECK_THROWS_AS(sc.validate(), dtbh::ConfigError);
}
