#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "geoloc/estimation.hpp"
#include "geoloc/latency_model.hpp"
#include "geoloc/lateration.hpp"
#include "geoloc/placement.hpp"
#include "geoloc/simulator.hpp"
#include "geoloc/topology.hpp"

namespace geoloc {

using Json = nlohmann::ordered_json;

Json topology_to_json(const Topology& t);
void write_topology_edge_list(const Topology& t, std::ostream& edges, std::ostream& nodes);

/// {"landmarks":[ids], "positions":{id:{lat,lon}}, "assignment":{node:landmark},
///  "objective":{"max_hop":..,"mean_hop":..}}
Json landmark_set_to_json(const Topology& t, const LandmarkSet& ls);

struct LandmarkFile {
  std::vector<NodeId> landmarks;
  std::map<NodeId, GeoPoint> positions;  // may be empty when the file has none
};

LandmarkFile read_landmarks_json(std::istream& in);

/// {"per_hop_ms":.., "models":{id:{"p","q","n","m","fit_rss","sample_count","lat","lon"}}}
Json models_to_json(const std::map<NodeId, LatencyModel>& models, const std::map<NodeId, GeoPoint>& positions,
                    double per_hop_ms);

struct ModelFile {
  std::map<NodeId, LatencyModel> models;
  std::map<NodeId, GeoPoint> positions;
  double per_hop_ms = kDefaultPerHopMs;
};

ModelFile read_models_json(std::istream& in);

struct MeasurementFile {
  std::vector<Measurement> measurements;
  /// Known target positions from "# truth,<target_id>,<lat>,<lon>" lines.
  std::map<NodeId, GeoPoint> truths;
};

/// Rows "landmark_id,target_id,hops,rtt1,rtt2,...". An optional header row
/// starting with "landmark_id" and '#' comment lines are skipped. Errors name
/// the line number.
MeasurementFile read_measurements_csv(std::istream& in);
void write_measurements_csv(std::ostream& out, std::span<const Measurement> measurements,
                            const std::map<NodeId, GeoPoint>& truths = {});

Json candidate_to_json(const CandidatePoint& c);
Json estimate_to_json(const NodeId& target, const EstimatedLocation& est);

/// FeatureCollection with the estimate, the kept and dropped candidates
/// (property "role") and, when given, the circles (center points with a
/// "radius_m" property).
Json estimate_to_geojson(const EstimatedLocation& est, std::span<const LabeledCircle> circles = {});

Json report_to_json(const ExperimentReport& r);
/// One row per target and method:
/// method,target_id,true_lat,true_lon,est_lat,est_lon,error_km
void write_report_csv(std::ostream& out, std::span<const ExperimentReport> reports);

Json world_to_json(const SimWorld& w);

/// Stable textual dump used for every JSON file the tools write.
std::string dump(const Json& j);

}  // namespace geoloc
