#include "geoloc/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <tuple>
#include <utility>

#include <Eigen/Geometry>

#include "geoloc/error.hpp"

namespace geoloc {

double normalize_lon(double lon_deg) {
  double x = std::fmod(lon_deg + 180.0, 360.0);
  if (x < 0.0) x += 360.0;
  x -= 180.0;
  return x == -180.0 ? 180.0 : x;
}

GeoPoint make_geo_point(double lat_deg, double lon_deg) {
  if (!std::isfinite(lat_deg) || !std::isfinite(lon_deg)) {
    throw ValidationError("coordinates must be finite");
  }
  if (lat_deg < -90.0 || lat_deg > 90.0) {
    std::ostringstream os;
    os << "latitude " << lat_deg << " outside [-90, 90]";
    throw ValidationError(os.str());
  }
  return GeoPoint{lat_deg, normalize_lon(lon_deg)};
}

Eigen::Vector3d to_unit_vector(const GeoPoint& p) {
  const double phi = deg2rad(p.lat);
  const double lambda = deg2rad(p.lon);
  return {std::cos(phi) * std::cos(lambda), std::cos(phi) * std::sin(lambda), std::sin(phi)};
}

GeoPoint from_unit_vector(const Eigen::Vector3d& v) {
  const double lat = rad2deg(std::atan2(v.z(), std::hypot(v.x(), v.y())));
  const double lon = rad2deg(std::atan2(v.y(), v.x()));
  return GeoPoint{lat, normalize_lon(lon)};
}

double central_angle(const GeoPoint& a, const GeoPoint& b) {
  const Eigen::Vector3d ua = to_unit_vector(a);
  const Eigen::Vector3d ub = to_unit_vector(b);
  return std::atan2(ua.cross(ub).norm(), ua.dot(ub));
}

double orthodromic_distance(const GeoPoint& a, const GeoPoint& b) {
  return kEarthRadiusM * central_angle(a, b);
}

double initial_bearing(const GeoPoint& a, const GeoPoint& b) {
  const double phi1 = deg2rad(a.lat);
  const double phi2 = deg2rad(b.lat);
  const double dlambda = deg2rad(b.lon - a.lon);
  const double y = std::sin(dlambda) * std::cos(phi2);
  const double x = std::cos(phi1) * std::sin(phi2) - std::sin(phi1) * std::cos(phi2) * std::cos(dlambda);
  return normalize_lon(rad2deg(std::atan2(y, x)));
}

GeoPoint destination_point(const GeoPoint& origin, double bearing_deg, double distance_m) {
  const double phi = deg2rad(origin.lat);
  const double lambda = deg2rad(origin.lon);
  const double theta = deg2rad(bearing_deg);
  const double delta = distance_m / kEarthRadiusM;

  // Local frame at the origin; east/north stay defined at the poles because
  // they are taken relative to the origin's meridian.
  const Eigen::Vector3d up = to_unit_vector(origin);
  const Eigen::Vector3d north(-std::sin(phi) * std::cos(lambda), -std::sin(phi) * std::sin(lambda),
                              std::cos(phi));
  const Eigen::Vector3d east(-std::sin(lambda), std::cos(lambda), 0.0);
  const Eigen::Vector3d dir = north * std::cos(theta) + east * std::sin(theta);
  return from_unit_vector(up * std::cos(delta) + dir * std::sin(delta));
}

GeoPoint spherical_centroid(std::span<const GeoPoint> points) {
  if (points.empty()) throw ValidationError("centroid of an empty point set");
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& p : points) sum += to_unit_vector(p);
  if (sum.norm() < 1e-12 * static_cast<double>(points.size())) return points.front();
  return from_unit_vector(sum.normalized());
}

GeoCircle make_geo_circle(const GeoPoint& center, double radius_m) {
  if (!std::isfinite(radius_m) || radius_m < 0.0 || radius_m > kMaxRadiusM) {
    std::ostringstream os;
    os << "circle radius " << radius_m << " m outside [0, pi*R]";
    throw ValidationError(os.str());
  }
  return GeoCircle{center, radius_m};
}

namespace {

bool northern_first(const GeoPoint& a, const GeoPoint& b) {
  if (a.lat != b.lat) return a.lat > b.lat;
  return a.lon < b.lon;
}

// Canonical argument order so that results are bitwise symmetric.
bool canonical_less(const GeoCircle& a, const GeoCircle& b) {
  return std::tie(a.center.lat, a.center.lon, a.radius_m) < std::tie(b.center.lat, b.center.lon, b.radius_m);
}

}  // namespace

IntersectionResult circle_intersections(const GeoCircle& c1_in, const GeoCircle& c2_in) {
  const bool swapped = canonical_less(c2_in, c1_in);
  const GeoCircle& c1 = swapped ? c2_in : c1_in;
  const GeoCircle& c2 = swapped ? c1_in : c2_in;

  const double tau = kIntersectionToleranceM;
  const double d = orthodromic_distance(c1.center, c2.center);
  const double r1 = c1.radius_m;
  const double r2 = c2.radius_m;
  const double diff = std::abs(r1 - r2);
  // Which of the caller's arguments is the smaller circle.
  const int inner_in = c1_in.radius_m < c2_in.radius_m ? 0 : 1;

  if (d < 1e-6) {
    if (diff <= tau) throw DegenerateGeometry("concentric circles of equal radius intersect everywhere");
    return Contained{inner_in, diff - d};
  }
  if (r1 + r2 + d > 2.0 * kMaxRadiusM + tau) {
    throw DegenerateGeometry("circles wrap around the antipode");
  }
  if (d > r1 + r2 + tau) return NonOverlapping{d - r1 - r2};
  if (d < diff - tau) return Contained{inner_in, diff - d};

  const double bearing12 = initial_bearing(c1.center, c2.center);
  if (std::abs(d - (r1 + r2)) <= tau) {
    return Tangent{destination_point(c1.center, bearing12, (d + r1 - r2) / 2.0)};
  }
  if (std::abs(d - diff) <= tau) {
    // Internal tangency: the touching point lies beyond the smaller circle,
    // on the ray from the larger center through the smaller one.
    const GeoCircle& big = r1 >= r2 ? c1 : c2;
    const GeoCircle& small = r1 >= r2 ? c2 : c1;
    const double bearing = initial_bearing(big.center, small.center);
    return Tangent{destination_point(big.center, bearing, (big.radius_m + d + small.radius_m) / 2.0)};
  }

  // Triangle with sides r1, d (adjacent to the angle at c1) and r2 (opposite).
  const double a1 = r1 / kEarthRadiusM;
  const double ad = d / kEarthRadiusM;
  const double a2 = r2 / kEarthRadiusM;
  const double s = (a1 + ad + a2) / 2.0;
  const double sin_num = std::max(0.0, std::sin(s - a1) * std::sin(s - ad));
  const double cos_num = std::max(0.0, std::sin(s) * std::sin(s - a2));
  const double half_angle = std::atan2(std::sqrt(sin_num), std::sqrt(cos_num));
  const double angle_deg = rad2deg(2.0 * half_angle);

  GeoPoint p = destination_point(c1.center, bearing12 + angle_deg, r1);
  GeoPoint q = destination_point(c1.center, bearing12 - angle_deg, r1);
  if (!northern_first(p, q)) std::swap(p, q);
  return Pair{p, q};
}

}  // namespace geoloc
