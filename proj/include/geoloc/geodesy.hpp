#pragma once

#include <numbers>
#include <span>
#include <variant>

#include <Eigen/Core>

namespace geoloc {

/// WGS84 mean Earth radius in meters; all great-circle math uses this sphere.
inline constexpr double kEarthRadiusM = 6371008.8;
inline constexpr double kPi = std::numbers::pi;
/// Half circumference, the largest meaningful circle radius.
inline constexpr double kMaxRadiusM = kPi * kEarthRadiusM;
/// Classification tolerance for circle intersections.
inline constexpr double kIntersectionToleranceM = 1.0;

inline constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Geographic position in degrees. Latitude in [-90, 90], longitude in
/// (-180, 180]. Use make_geo_point() to obtain a validated, normalized value.
struct GeoPoint {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Maps any finite longitude into (-180, 180].
double normalize_lon(double lon_deg);

/// Validates latitude and normalizes longitude. Throws ValidationError.
GeoPoint make_geo_point(double lat_deg, double lon_deg);

Eigen::Vector3d to_unit_vector(const GeoPoint& p);
GeoPoint from_unit_vector(const Eigen::Vector3d& v);

/// Central angle between two points in radians, via atan2(|a x b|, a . b),
/// which stays accurate for coincident and antipodal points alike.
double central_angle(const GeoPoint& a, const GeoPoint& b);

/// Great-circle distance in meters.
double orthodromic_distance(const GeoPoint& a, const GeoPoint& b);

/// Initial bearing from a to b, degrees clockwise from north in (-180, 180].
double initial_bearing(const GeoPoint& a, const GeoPoint& b);

/// Point reached from origin after travelling distance_m along the great
/// circle leaving at the given bearing.
GeoPoint destination_point(const GeoPoint& origin, double bearing_deg, double distance_m);

/// Normalized sum of unit vectors. Falls back to the first point when the
/// vectors cancel out. Precondition: points non-empty.
GeoPoint spherical_centroid(std::span<const GeoPoint> points);

struct GeoCircle {
  GeoPoint center;
  double radius_m = 0.0;
};

/// Validates 0 <= radius_m <= pi * R.
GeoCircle make_geo_circle(const GeoPoint& center, double radius_m);

struct NonOverlapping {
  double gap_m;  // distance between the perimeters along the center geodesic
};
struct Contained {
  int inner;     // 0 if the first argument lies inside the second, else 1
  double gap_m;  // |r1 - r2| - d
};
struct Tangent {
  GeoPoint point;
};
struct Pair {
  GeoPoint first;   // northern point (tie: smaller longitude)
  GeoPoint second;
};

using IntersectionResult = std::variant<NonOverlapping, Contained, Tangent, Pair>;

/// Classifies two circles and computes their intersection points.
///
/// With d the distance between the centers and tau = 1 m:
///   NonOverlapping  d > r1 + r2 + tau
///   Contained       d < |r1 - r2| - tau
///   Tangent         d within tau of r1 + r2 or of |r1 - r2|
///   Pair            otherwise; points found with the spherical half-angle
///                   formula for the angle at the first center.
///
/// Identical centers with equal radii throw DegenerateGeometry; with unequal
/// radii the result is Contained. Circles whose radii reach around the back of
/// the sphere (r1 + r2 + d > 2 pi R) also throw DegenerateGeometry.
/// The result does not depend on argument order.
IntersectionResult circle_intersections(const GeoCircle& c1, const GeoCircle& c2);

}  // namespace geoloc
