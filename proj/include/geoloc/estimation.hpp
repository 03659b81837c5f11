#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "geoloc/geodesy.hpp"
#include "geoloc/lateration.hpp"

namespace geoloc {

struct GridSearchConfig {
  double eps0_m = 100'000.0;  // initial grid spacing
  double eps_min_m = 500.0;   // stop once the spacing falls below this
  int extent = 3;             // grid offsets run over [-extent, extent] steps
};

/// Throws ValidationError unless 0 < eps_min_m <= eps0_m and extent >= 1.
void validate(const GridSearchConfig& cfg);

struct OutlierFilterConfig {
  int rounds = 3;
  double drop_fraction = 0.25;
  std::size_t min_kept = 3;
};

void validate(const OutlierFilterConfig& cfg);

/// Mean great-circle distance (meters) from x to the points.
double mean_distance_m(const GeoPoint& x, std::span<const GeoPoint> points);

struct GridSearchTrace {
  std::size_t moves = 0;
  std::size_t halvings = 0;
  std::vector<double> objectives;  // objective after each accepted move or halving
};

/// Local grid search for the point minimizing the mean distance to the cloud.
///
/// Around the incumbent a (2*extent+1)^2 grid with spacing eps (meters,
/// converted to latitude/longitude offsets) is evaluated. The best strictly
/// improving grid point becomes the incumbent (ties: north-most, then
/// west-most). Without improvement eps is halved; the search ends when eps
/// drops below eps_min. The default seed is the spherical centroid.
GeoPoint grid_center(std::span<const GeoPoint> points, const GridSearchConfig& cfg = {},
                     std::optional<GeoPoint> seed = std::nullopt, GridSearchTrace* trace = nullptr);

struct FilterResult {
  std::vector<CandidatePoint> kept;
  std::vector<CandidatePoint> dropped;
};

/// Repeatedly centers the kept set and drops the ceil(fraction * |kept|)
/// points farthest from the center, never going below min_kept points.
FilterResult filter_outliers(std::span<const CandidatePoint> points, const OutlierFilterConfig& cfg = {},
                             const GridSearchConfig& grid = {});

struct EstimationConfig {
  LaterationConfig lateration;
  OutlierFilterConfig filter;
  GridSearchConfig grid;
};

struct EstimatedLocation {
  GeoPoint point;
  std::vector<CandidatePoint> kept_points;
  std::vector<CandidatePoint> dropped_points;
  double mean_residual_km = 0.0;  // mean distance from point to the kept cloud
  std::vector<std::string> skipped_pairs;
};

/// Candidate cloud from all circle pairs, outlier filter, then grid center of
/// the kept points. Throws ValidationError for fewer than two circles or when
/// every pair was dropped.
EstimatedLocation estimate_target(std::span<const LabeledCircle> circles, const EstimationConfig& cfg = {});

}  // namespace geoloc
