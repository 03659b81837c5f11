#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geoloc/estimation.hpp"
#include "geoloc/latency_model.hpp"
#include "geoloc/placement.hpp"
#include "geoloc/topology.hpp"

namespace geoloc {

struct DelayParams {
  double propagation_speed_km_per_ms = 200.0;
  double per_hop_ms = kDefaultPerHopMs;
  /// Mean of the exponential queuing delay added to each probe; none if empty.
  std::optional<double> exponential_mean_ms;
  int samples_per_probe = 10;
};

void validate(const DelayParams& params);

struct BoundingBox {
  double lat_min;
  double lat_max;
  double lon_min;
  double lon_max;
};

inline constexpr BoundingBox kEuropeBox{35.0, 60.0, -10.0, 30.0};

/// Random geometric graph: nodes uniform in the box (in degrees), edges
/// between nodes within connection_radius_km. The radius grows by 25% per
/// retry until the graph is connected. Node ids are "n" plus a zero-padded
/// index. Throws ValidationError when connectivity is out of reach.
Topology generate_topology(std::size_t n_nodes, const BoundingBox& box, double connection_radius_km,
                           std::uint64_t seed);

struct SimWorld {
  Topology topology;
  std::uint64_t seed = 0;
  DelayParams delay;
};

/// A probe endpoint: a topology node, or an off-graph point that reaches the
/// graph through its nearest node over a virtual last-mile hop.
struct Endpoint {
  std::string id;
  std::optional<GeoPoint> position;

  static Endpoint node(std::string node_id) { return {std::move(node_id), std::nullopt}; }
  static Endpoint point(std::string point_id, const GeoPoint& p) { return {std::move(point_id), p}; }
};

struct PathInfo {
  int hops = 0;
  double length_km = 0.0;
};

/// Path with the fewest hops between two endpoints; among those, the one with
/// the smallest summed great-circle edge length.
PathInfo shortest_path(const SimWorld& w, const Endpoint& src, const Endpoint& dst);

/// One-way deterministic delay of the path in ms.
double deterministic_delay_ms(const SimWorld& w, const PathInfo& path);

/// Probes dst from src samples_per_probe times. Each RTT sample is
/// 2 * (deterministic + stochastic draw). The stream seed defaults to one
/// derived from the world seed and both endpoint ids.
Measurement simulate_measurement(const SimWorld& w, const Endpoint& src, const Endpoint& dst,
                                 std::optional<std::uint64_t> stream_seed = std::nullopt);

enum class PlacementStrategy { kDragoon, kTwoApprox, kRandom, kShortestPing };

std::string_view to_string(PlacementStrategy s);
/// Parses "dragoon", "two_approx", "random", "shortest_ping_only".
PlacementStrategy parse_strategy(std::string_view s);

struct ExperimentConfig {
  std::size_t k = 10;
  PlacementStrategy strategy = PlacementStrategy::kDragoon;
  std::size_t n_targets = 50;
  std::uint64_t seed = 1;
  /// Per-hop correction applied by the locator (not the simulator's truth).
  double per_hop_ms = kDefaultPerHopMs;
  EstimationConfig estimation;
};

struct TargetResult {
  NodeId target;
  GeoPoint truth;
  std::optional<GeoPoint> estimate;
  double error_km = 0.0;
  std::size_t circles = 0;
  std::string failure;  // empty on success
};

struct ErrorSummary {
  std::size_t located = 0;
  std::size_t failed = 0;
  double median_km = 0.0;
  double mean_km = 0.0;
  double p90_km = 0.0;
};

struct ExperimentReport {
  std::string method;
  std::uint64_t world_seed = 0;
  std::uint64_t experiment_seed = 0;
  std::vector<NodeId> landmarks;
  /// Landmarks left out because their calibration fit failed, with the reason.
  std::map<NodeId, std::string> uncalibrated;
  std::vector<TargetResult> targets;
  ErrorSummary summary;
};

/// Median, mean and nearest-rank 90th percentile of the located targets.
ErrorSummary summarize(const std::vector<TargetResult>& targets);

/// Places k landmarks, calibrates them from the full inter-landmark mesh,
/// then probes n_targets seeded random target nodes from every landmark and
/// locates them. Shortest-ping places with Dragoon and answers with the
/// position of the landmark with the smallest RTT. Targets are chosen from the
/// experiment seed alone, so every strategy sees the same targets.
ExperimentReport run_experiment(const SimWorld& w, const ExperimentConfig& cfg);

/// Calibration mesh: every ordered landmark pair, probed in the world.
std::vector<Measurement> calibration_mesh(const SimWorld& w, const std::vector<NodeId>& landmarks,
                                          std::uint64_t seed);

/// Landmarks chosen by the strategy (random draws from the given seed).
std::vector<NodeId> place_landmarks(const Topology& t, std::size_t k, PlacementStrategy s, std::uint64_t seed);

/// Seeded sample of n distinct target nodes.
std::vector<NodeId> pick_targets(const Topology& t, std::size_t n, std::uint64_t seed);

}  // namespace geoloc
