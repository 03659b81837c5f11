#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "geoloc/topology.hpp"

namespace geoloc {

/// (max hop, mean hop) from every node to its closest landmark. Ordering is
/// lexicographic; the mean is compared through the exact integer hop total.
struct PlacementObjective {
  int max_hop = 0;
  long long total_hop = 0;
  std::size_t node_count = 0;

  double mean_hop() const {
    return node_count == 0 ? 0.0 : static_cast<double>(total_hop) / static_cast<double>(node_count);
  }

  friend bool operator==(const PlacementObjective& a, const PlacementObjective& b) {
    return a.max_hop == b.max_hop && a.total_hop == b.total_hop;
  }
  friend std::strong_ordering operator<=>(const PlacementObjective& a, const PlacementObjective& b) {
    if (auto c = a.max_hop <=> b.max_hop; c != 0) return c;
    return a.total_hop <=> b.total_hop;
  }
};

struct LandmarkSet {
  std::vector<NodeId> landmarks;           // placement order
  std::map<NodeId, NodeId> assignment;     // node -> closest landmark
  PlacementObjective objective;
};

/// Objective of an arbitrary landmark selection.
PlacementObjective evaluate_placement(const Topology& t, std::span<const NodeId> landmarks);

/// Builds a LandmarkSet with assignment and objective recomputed from scratch.
LandmarkSet make_landmark_set(const Topology& t, std::vector<NodeId> landmarks);

/// Graph 1-center under hop distance: minimal eccentricity, then minimal
/// total hops, then smallest id.
NodeId place_orientation_mark(const Topology& t);

/// Farthest-point (Gonzalez) selection of k landmarks. The first landmark is
/// the node farthest from seed_node; the seed itself is only a reference.
/// Ties go to the smallest id. Throws ValidationError unless 1 <= k <= |V|.
LandmarkSet two_approx(const Topology& t, std::size_t k, const NodeId& seed_node);

struct RefineMove {
  std::size_t iteration = 0;
  std::size_t slot = 0;  // position in the landmark list
  NodeId from;
  NodeId to;
  PlacementObjective before;
  PlacementObjective after;
};

using RefineObserver = std::function<void(const RefineMove&)>;

/// Iterative neighbor-move refinement.
///
/// Each iteration visits the landmarks in list order. A landmark tries every
/// adjacent node not occupied by another landmark and moves to the candidate
/// with the best objective if that strictly beats the current one (ties
/// between candidates go to the smaller id). Each landmark moves at most once
/// per iteration; the loop ends after an iteration without moves.
LandmarkSet refine(const Topology& t, const LandmarkSet& initial, const RefineObserver& observer = {});

/// Orientation mark, farthest-point initialization, then refinement.
LandmarkSet dragoon_place(const Topology& t, std::size_t k, const RefineObserver& observer = {});

}  // namespace geoloc
