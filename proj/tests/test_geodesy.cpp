#include <doctest.h>

#include <cmath>
#include <random>

#include "geoloc/error.hpp"
#include "geoloc/geodesy.hpp"
#include "oracles.hpp"

using namespace geoloc;

namespace {

GeoPoint random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> z(-1.0, 1.0);
  std::uniform_real_distribution<double> lon(-180.0, 180.0);
  return make_geo_point(rad2deg(std::asin(z(rng))), lon(rng));
}

void check_on_circle(const GeoPoint& p, const GeoCircle& c) {
  CHECK(std::abs(orthodromic_distance(c.center, p) - c.radius_m) <= 1.0);
}

}  // namespace

TEST_CASE("make_geo_point normalizes longitude and rejects bad latitude") {
  CHECK(make_geo_point(10, 190).lon == doctest::Approx(-170));
  CHECK(make_geo_point(10, -180).lon == 180.0);
  CHECK(make_geo_point(10, 540).lon == 180.0);
  CHECK(make_geo_point(10, -181).lon == doctest::Approx(179));
  CHECK_THROWS_AS(make_geo_point(90.5, 0), ValidationError);
  CHECK_THROWS_AS(make_geo_point(NAN, 0), ValidationError);
}

TEST_CASE("orthodromic_distance fixed cases") {
  const GeoPoint a{48.1, 11.6};
  CHECK(orthodromic_distance(a, a) == 0.0);
  const double antipodal = orthodromic_distance({0, 0}, {0, 180});
  CHECK(std::abs(antipodal - 20015114.4) <= 0.1);
  CHECK(std::abs(antipodal - kPi * kEarthRadiusM) / (kPi * kEarthRadiusM) <= 1e-6);
  // Pole to pole.
  CHECK(orthodromic_distance({90, 0}, {-90, 0}) == doctest::Approx(kPi * kEarthRadiusM).epsilon(1e-12));
}

TEST_CASE("orthodromic_distance matches the haversine oracle on random pairs") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_point(rng);
    const auto b = random_point(rng);
    const double ours = orthodromic_distance(a, b);
    const double ref = oracle::haversine_m(a, b);
    CHECK(std::abs(ours - ref) <= 1e-6 * ref);
  }
}

TEST_CASE("orthodromic_distance is a metric under random sampling") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_point(rng);
    const auto b = random_point(rng);
    const auto c = random_point(rng);
    CHECK(orthodromic_distance(a, b) == orthodromic_distance(b, a));
    CHECK(orthodromic_distance(a, c) <= orthodromic_distance(a, b) + orthodromic_distance(b, c) + 1e-6);
  }
}

TEST_CASE("destination_point") {
  const GeoPoint o{0, 0};
  CHECK(destination_point(o, 37, 0.0) == o);
  const auto pole = destination_point(o, 0, kPi * kEarthRadiusM / 2);
  CHECK(std::abs(pole.lat - 90.0) <= 1e-9);

  const auto east = destination_point(o, 90, kPi * kEarthRadiusM / 2);
  CHECK(std::abs(east.lat) <= 1e-9);
  CHECK(std::abs(east.lon - 90.0) <= 1e-9);

  SUBCASE("round trip distance") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> bearing(-180, 180);
    std::uniform_real_distribution<double> dist(0, kPi * kEarthRadiusM);
    for (int i = 0; i < 1000; ++i) {
      const auto start = random_point(rng);
      const double d = dist(rng);
      const auto end = destination_point(start, bearing(rng), d);
      CHECK(std::abs(orthodromic_distance(start, end) - d) <= 0.5);
    }
  }
}

TEST_CASE("initial_bearing agrees with destination_point") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto a = random_point(rng);
    const auto b = random_point(rng);
    const double d = orthodromic_distance(a, b);
    if (d < 1000 || d > 0.99 * kPi * kEarthRadiusM) continue;
    const auto end = destination_point(a, initial_bearing(a, b), d);
    CHECK(orthodromic_distance(end, b) <= 0.5);
  }
}

TEST_CASE("spherical_centroid") {
  const GeoPoint pts[] = {{10, 0}, {-10, 0}};
  const auto c = spherical_centroid(pts);
  CHECK(std::abs(c.lat) <= 1e-12);
  CHECK(std::abs(c.lon) <= 1e-12);
  const GeoPoint opposite[] = {{0, 0}, {0, 180}};
  CHECK(spherical_centroid(opposite) == GeoPoint{0, 0});
}

TEST_CASE("circle_intersections: non-overlapping, tangent, contained") {
  const GeoPoint c1{45, 5};
  const GeoPoint c2 = destination_point(c1, 60, 1'000'000);

  const auto none = circle_intersections({c1, 400'000}, {c2, 400'000});
  REQUIRE(std::holds_alternative<NonOverlapping>(none));
  CHECK(std::abs(std::get<NonOverlapping>(none).gap_m - 200'000) <= kIntersectionToleranceM);

  const auto touch = circle_intersections({c1, 500'000}, {c2, 500'000});
  REQUIRE(std::holds_alternative<Tangent>(touch));
  const auto mid = destination_point(c1, initial_bearing(c1, c2), 500'000);
  CHECK(orthodromic_distance(std::get<Tangent>(touch).point, mid) <= 1e-3);

  const auto inside = circle_intersections({c1, 100'000}, {c2, 2'000'000});
  REQUIRE(std::holds_alternative<Contained>(inside));
  CHECK(std::get<Contained>(inside).inner == 0);
  const auto inside_rev = circle_intersections({c2, 2'000'000}, {c1, 100'000});
  CHECK(std::get<Contained>(inside_rev).inner == 1);

  // Internal tangency: small circle touches the big one from inside.
  const auto internal = circle_intersections({c1, 1'300'000}, {c2, 300'000});
  REQUIRE(std::holds_alternative<Tangent>(internal));
  const auto p = std::get<Tangent>(internal).point;
  CHECK(std::abs(orthodromic_distance(c1, p) - 1'300'000) <= 1.0);
  CHECK(std::abs(orthodromic_distance(c2, p) - 300'000) <= 1.0);
}

TEST_CASE("circle_intersections: concentric circles") {
  const GeoPoint c{10, 10};
  CHECK_THROWS_AS(circle_intersections({c, 1000}, {c, 1000}), DegenerateGeometry);
  const auto r = circle_intersections({c, 1000}, {c, 5000});
  REQUIRE(std::holds_alternative<Contained>(r));
  CHECK(std::get<Contained>(r).inner == 0);
}

TEST_CASE("circle_intersections: equatorial pair against a latitude scan") {
  const GeoCircle a{{0, 0}, 700'000};
  const GeoCircle b{{0, 10}, 700'000};
  const auto r = circle_intersections(a, b);
  REQUIRE(std::holds_alternative<Pair>(r));
  const auto pair = std::get<Pair>(r);

  // Oracle: along lon = 5 the circle of a is crossed at the latitude where
  // the haversine distance equals the radius.
  const double lat = oracle::bisect(
      [&](double phi) { return oracle::haversine_m(0, 0, phi, 5) - 700'000; }, 0.0, 10.0);

  CHECK(pair.first.lat > 0);
  CHECK(std::abs(pair.first.lat + pair.second.lat) <= 1e-6);
  CHECK(std::abs(pair.first.lon - 5.0) <= 1e-6);
  CHECK(std::abs(pair.second.lon - 5.0) <= 1e-6);
  CHECK(std::abs(pair.first.lat - lat) <= 1e-6);
}

TEST_CASE("circle_intersections: random pairs lie on both circles and are order independent") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> radius(1'000, 3'000'000);
  int pairs = 0;
  for (int i = 0; i < 2000; ++i) {
    const auto c1 = random_point(rng);
    const auto c2 = destination_point(c1, radius(rng) / 10000, radius(rng));
    const GeoCircle a{c1, radius(rng)};
    const GeoCircle b{c2, radius(rng)};
    IntersectionResult r1, r2;
    try {
      r1 = circle_intersections(a, b);
      r2 = circle_intersections(b, a);
    } catch (const DegenerateGeometry&) {
      continue;
    }
    REQUIRE(r1.index() == r2.index());
    if (const auto* p = std::get_if<Pair>(&r1)) {
      ++pairs;
      check_on_circle(p->first, a);
      check_on_circle(p->first, b);
      check_on_circle(p->second, a);
      check_on_circle(p->second, b);
      CHECK(orthodromic_distance(p->first, p->second) > 0);
      CHECK(p->first == std::get<Pair>(r2).first);
      CHECK(p->second == std::get<Pair>(r2).second);
      CHECK(p->first.lat >= p->second.lat);
    }
  }
  CHECK(pairs > 200);
}

TEST_CASE("make_geo_circle bounds") {
  CHECK_NOTHROW(make_geo_circle({0, 0}, 0));
  CHECK_NOTHROW(make_geo_circle({0, 0}, kMaxRadiusM));
  CHECK_THROWS_AS(make_geo_circle({0, 0}, -1), ValidationError);
  CHECK_THROWS_AS(make_geo_circle({0, 0}, kMaxRadiusM * 1.001), ValidationError);
}
