#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "geoloc/geodesy.hpp"
#include "geoloc/latency_model.hpp"
#include "geoloc/topology.hpp"

namespace geoloc {

enum class CandidateCase { kMidpointGap, kContainedTangent, kTangent, kPairBranch };

std::string_view to_string(CandidateCase c);

struct CandidatePoint {
  GeoPoint point;
  std::pair<NodeId, NodeId> source_pair;  // ascending ids
  CandidateCase case_tag = CandidateCase::kPairBranch;
  double weight = 1.0;
};

struct LabeledCircle {
  NodeId landmark_id;
  GeoCircle circle;
};

struct LaterationConfig {
  /// Non-overlapping pairs whose perimeter gap exceeds this are dropped.
  double gap_max_km = 1000.0;
};

/// Circle around the landmark whose radius is the distance predicted for the
/// measurement's effective latency, capped at pi * R. DomainError propagates.
GeoCircle build_circle(const GeoPoint& landmark, const LatencyModel& model, const Measurement& measurement,
                       double per_hop_ms = kDefaultPerHopMs);

/// Candidate target points for one pair of circles:
///   non-overlapping  midpoint of the perimeter gap on the center geodesic
///                    (nothing when the gap exceeds gap_max_km)
///   contained        larger radius shrunk by bisection until the circles
///                    touch; the touching point
///   tangent          the touching point
///   two points       both points
/// Throws DegenerateGeometry for coincident centers.
std::vector<CandidatePoint> pair_candidates(const LabeledCircle& a, const LabeledCircle& b,
                                            const LaterationConfig& cfg = {});

struct CandidateCloud {
  std::vector<CandidatePoint> points;
  /// Human-readable reasons for pairs that produced an error.
  std::vector<std::string> skipped;
};

/// Union of pair_candidates over all unordered pairs, ordered by ascending
/// landmark id pair. Throws ValidationError for fewer than two circles.
CandidateCloud all_candidates(std::span<const LabeledCircle> circles, const LaterationConfig& cfg = {});

}  // namespace geoloc
