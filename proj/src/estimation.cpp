#include "geoloc/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "geoloc/error.hpp"

namespace geoloc {

void validate(const GridSearchConfig& cfg) {
  if (!(cfg.eps_min_m > 0.0) || !(cfg.eps0_m >= cfg.eps_min_m) || cfg.extent < 1) {
    throw ValidationError("grid search needs 0 < eps_min <= eps0 and extent >= 1");
  }
}

void validate(const OutlierFilterConfig& cfg) {
  if (cfg.rounds < 0 || !(cfg.drop_fraction >= 0.0 && cfg.drop_fraction < 1.0) || cfg.min_kept < 1) {
    throw ValidationError("outlier filter needs rounds >= 0, drop fraction in [0, 1), min_kept >= 1");
  }
}

namespace {

Eigen::Matrix3Xd unit_vectors(std::span<const GeoPoint> points) {
  Eigen::Matrix3Xd out(3, static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = to_unit_vector(points[i]);
  return out;
}

// Mean great-circle distance from x to the cloud given as unit vectors.
double mean_distance_m(const GeoPoint& x, const Eigen::Matrix3Xd& cloud) {
  const Eigen::Vector3d u = to_unit_vector(x);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < cloud.cols(); ++i) {
    const Eigen::Vector3d v = cloud.col(i);
    sum += kEarthRadiusM * std::atan2(u.cross(v).norm(), u.dot(v));
  }
  return sum / static_cast<double>(cloud.cols());
}

}  // namespace

double mean_distance_m(const GeoPoint& x, std::span<const GeoPoint> points) {
  return mean_distance_m(x, unit_vectors(points));
}

namespace {

constexpr std::size_t kMaxMoves = 100'000;

GeoPoint offset(const GeoPoint& origin, double north_m, double east_m) {
  const double lat = std::clamp(origin.lat + rad2deg(north_m / kEarthRadiusM), -90.0, 90.0);
  const double coslat = std::max(std::cos(deg2rad(origin.lat)), 1e-6);
  const double lon = origin.lon + rad2deg(east_m / (kEarthRadiusM * coslat));
  return GeoPoint{lat, normalize_lon(lon)};
}

}  // namespace

GeoPoint grid_center(std::span<const GeoPoint> points, const GridSearchConfig& cfg, std::optional<GeoPoint> seed,
                     GridSearchTrace* trace) {
  if (points.empty()) throw ValidationError("cannot center an empty point cloud");
  validate(cfg);

  const Eigen::Matrix3Xd cloud = unit_vectors(points);
  GeoPoint best = seed ? *seed : spherical_centroid(points);
  double best_obj = mean_distance_m(best, cloud);
  double eps = cfg.eps0_m;
  std::size_t moves = 0;
  while (eps >= cfg.eps_min_m) {
    bool found = false;
    GeoPoint cand_best = best;
    double cand_obj = best_obj;
    for (int i = -cfg.extent; i <= cfg.extent; ++i) {
      for (int j = -cfg.extent; j <= cfg.extent; ++j) {
        if (i == 0 && j == 0) continue;
        const GeoPoint g = offset(best, i * eps, j * eps);
        const double obj = mean_distance_m(g, cloud);
        if (!(obj < best_obj)) continue;
        const bool wins = !found || obj < cand_obj ||
                          (obj == cand_obj &&
                           (g.lat > cand_best.lat || (g.lat == cand_best.lat && g.lon < cand_best.lon)));
        if (wins) {
          cand_best = g;
          cand_obj = obj;
          found = true;
        }
      }
    }
    if (found && moves < kMaxMoves) {
      best = cand_best;
      best_obj = cand_obj;
      ++moves;
      if (trace) {
        ++trace->moves;
        trace->objectives.push_back(best_obj);
      }
    } else {
      eps /= 2.0;
      if (trace) {
        ++trace->halvings;
        trace->objectives.push_back(best_obj);
      }
    }
  }
  return best;
}

namespace {

std::vector<GeoPoint> positions_of(std::span<const CandidatePoint> pts) {
  std::vector<GeoPoint> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(p.point);
  return out;
}

}  // namespace

FilterResult filter_outliers(std::span<const CandidatePoint> points, const OutlierFilterConfig& cfg,
                             const GridSearchConfig& grid) {
  validate(cfg);
  FilterResult out;
  out.kept.assign(points.begin(), points.end());
  for (int round = 0; round < cfg.rounds; ++round) {
    if (out.kept.size() <= cfg.min_kept) break;
    const auto cloud = positions_of(out.kept);
    const GeoPoint center = grid_center(cloud, grid);

    const auto want = static_cast<std::size_t>(std::ceil(cfg.drop_fraction * static_cast<double>(out.kept.size())));
    const std::size_t drop = std::min(want, out.kept.size() - cfg.min_kept);
    if (drop == 0) break;

    std::vector<std::size_t> order(out.kept.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> dist(out.kept.size());
    for (std::size_t i = 0; i < dist.size(); ++i) dist[i] = orthodromic_distance(center, cloud[i]);
    // Farthest first; equal distances keep input order.
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });

    std::vector<bool> remove(out.kept.size(), false);
    for (std::size_t r = 0; r < drop; ++r) remove[order[r]] = true;
    std::vector<CandidatePoint> next;
    next.reserve(out.kept.size() - drop);
    for (std::size_t i = 0; i < out.kept.size(); ++i) {
      (remove[i] ? out.dropped : next).push_back(out.kept[i]);
    }
    out.kept = std::move(next);
  }
  return out;
}

EstimatedLocation estimate_target(std::span<const LabeledCircle> circles, const EstimationConfig& cfg) {
  auto cloud = all_candidates(circles, cfg.lateration);
  if (cloud.points.empty()) throw ValidationError("no candidate points: every circle pair was dropped");

  auto filtered = filter_outliers(cloud.points, cfg.filter, cfg.grid);
  const auto kept = positions_of(filtered.kept);

  EstimatedLocation est;
  est.point = grid_center(kept, cfg.grid);
  est.mean_residual_km = mean_distance_m(est.point, kept) / 1000.0;
  est.kept_points = std::move(filtered.kept);
  est.dropped_points = std::move(filtered.dropped);
  est.skipped_pairs = std::move(cloud.skipped);
  return est;
}

}  // namespace geoloc
