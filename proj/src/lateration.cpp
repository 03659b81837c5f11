#include "geoloc/lateration.hpp"

#include <algorithm>

#include "geoloc/error.hpp"

namespace geoloc {

std::string_view to_string(CandidateCase c) {
  switch (c) {
    case CandidateCase::kMidpointGap:
      return "midpoint_gap";
    case CandidateCase::kContainedTangent:
      return "contained_tangent";
    case CandidateCase::kTangent:
      return "tangent";
    case CandidateCase::kPairBranch:
      return "pair_branch";
  }
  return "unknown";
}

GeoCircle build_circle(const GeoPoint& landmark, const LatencyModel& model, const Measurement& measurement,
                       double per_hop_ms) {
  const double km = predict_distance_km(model, effective_latency(measurement, per_hop_ms).latency_ms);
  return make_geo_circle(landmark, std::min(km * 1000.0, kMaxRadiusM));
}

namespace {

// Shrinks the larger circle until it touches the smaller one from inside.
GeoPoint shrink_to_tangency(const GeoCircle& big, const GeoCircle& small) {
  const double d = orthodromic_distance(big.center, small.center);
  double lo = std::max(d, small.radius_m);  // circles meet here
  double hi = big.radius_m;                 // strictly contained here
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const auto res = circle_intersections(GeoCircle{big.center, mid}, small);
    if (const auto* t = std::get_if<Tangent>(&res)) return t->point;
    if (std::holds_alternative<Contained>(res)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  throw DegenerateGeometry("radius reduction did not reach tangency");
}

}  // namespace

std::vector<CandidatePoint> pair_candidates(const LabeledCircle& a_in, const LabeledCircle& b_in,
                                            const LaterationConfig& cfg) {
  const bool swap = b_in.landmark_id < a_in.landmark_id;
  const LabeledCircle& a = swap ? b_in : a_in;
  const LabeledCircle& b = swap ? a_in : b_in;
  const std::pair<NodeId, NodeId> ids{a.landmark_id, b.landmark_id};

  if (orthodromic_distance(a.circle.center, b.circle.center) < 1e-6) {
    throw DegenerateGeometry("landmarks \"" + ids.first + "\" and \"" + ids.second + "\" share a center");
  }

  std::vector<CandidatePoint> out;
  const auto res = circle_intersections(a.circle, b.circle);
  if (const auto* gap = std::get_if<NonOverlapping>(&res)) {
    if (gap->gap_m > cfg.gap_max_km * 1000.0) return out;
    const double bearing = initial_bearing(a.circle.center, b.circle.center);
    out.push_back({destination_point(a.circle.center, bearing, a.circle.radius_m + gap->gap_m / 2.0), ids,
                   CandidateCase::kMidpointGap});
  } else if (const auto* c = std::get_if<Contained>(&res)) {
    const GeoCircle& small = c->inner == 0 ? a.circle : b.circle;
    const GeoCircle& big = c->inner == 0 ? b.circle : a.circle;
    out.push_back({shrink_to_tangency(big, small), ids, CandidateCase::kContainedTangent});
  } else if (const auto* t = std::get_if<Tangent>(&res)) {
    out.push_back({t->point, ids, CandidateCase::kTangent});
  } else {
    const auto& pair = std::get<Pair>(res);
    out.push_back({pair.first, ids, CandidateCase::kPairBranch});
    out.push_back({pair.second, ids, CandidateCase::kPairBranch});
  }
  return out;
}

CandidateCloud all_candidates(std::span<const LabeledCircle> circles_in, const LaterationConfig& cfg) {
  if (circles_in.size() < 2) throw ValidationError("need >= 2 circles");
  std::vector<LabeledCircle> circles(circles_in.begin(), circles_in.end());
  std::stable_sort(circles.begin(), circles.end(),
                   [](const LabeledCircle& x, const LabeledCircle& y) { return x.landmark_id < y.landmark_id; });

  CandidateCloud cloud;
  for (std::size_t i = 0; i < circles.size(); ++i) {
    for (std::size_t j = i + 1; j < circles.size(); ++j) {
      try {
        auto pts = pair_candidates(circles[i], circles[j], cfg);
        cloud.points.insert(cloud.points.end(), pts.begin(), pts.end());
      } catch (const DegenerateGeometry& e) {
        cloud.skipped.push_back(circles[i].landmark_id + "/" + circles[j].landmark_id + ": " + e.what());
      }
    }
  }
  return cloud;
}

}  // namespace geoloc
