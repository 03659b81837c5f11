#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "geoloc/geodesy.hpp"

namespace geoloc {

using NodeId = std::string;
using Edge = std::pair<NodeId, NodeId>;

struct Node {
  NodeId id;
  GeoPoint position;
};

/// Immutable, validated, connected simple graph with geographic node
/// positions. Nodes are stored sorted by id, so node indices follow the
/// lexicographic id order and every derived result is independent of the
/// order nodes appeared in the input.
class Topology {
 public:
  /// Validates and builds. Throws ValidationError on duplicate ids, self
  /// loops, duplicate edges, dangling endpoints, bad coordinates or a
  /// disconnected graph.
  static Topology build(std::vector<Node> nodes, std::vector<Edge> edges);

  std::size_t size() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(std::size_t index) const { return nodes_[index]; }
  const NodeId& id(std::size_t index) const { return nodes_[index].id; }
  const GeoPoint& position(std::size_t index) const { return nodes_[index].position; }

  /// Neighbor indices in ascending order.
  std::span<const std::size_t> neighbors(std::size_t index) const { return adjacency_[index]; }
  std::size_t degree(std::size_t index) const { return adjacency_[index].size(); }

  std::optional<std::size_t> find(std::string_view id) const;
  /// Throws ValidationError naming the id when it is unknown.
  std::size_t index_of(std::string_view id) const;

  /// Edges as (smaller id, larger id) pairs in ascending order.
  std::vector<Edge> edges() const;

 private:
  Topology() = default;

  std::vector<Node> nodes_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::size_t edge_count_ = 0;
};

enum class TopologyFormat { kJson, kEdgeList };

/// Topology JSON: {"nodes":[{"id":..,"lat":..,"lon":..}],"edges":[[id,id],..]}.
Topology load_topology_json(std::istream& in);

/// Edge list: one "id id" pair per line; node sidecar: one "id lat lon" per
/// line. Blank lines and lines starting with '#' are ignored.
Topology load_topology_edge_list(std::istream& edges, std::istream& nodes);

/// Hop counts from a set of sources to every node.
class HopMatrix {
 public:
  HopMatrix(std::vector<std::size_t> sources, Eigen::MatrixXi hops)
      : sources_(std::move(sources)), hops_(std::move(hops)) {}

  /// Source node indices, one per row.
  const std::vector<std::size_t>& sources() const { return sources_; }
  /// Rows follow sources(), columns follow node indices.
  const Eigen::MatrixXi& matrix() const { return hops_; }

  int at(const Topology& t, std::string_view source, std::string_view target) const;
  std::map<NodeId, int> row(const Topology& t, std::string_view source) const;

 private:
  std::vector<std::size_t> sources_;
  Eigen::MatrixXi hops_;
};

/// Breadth-first hop counts from each source. Throws ValidationError on an
/// unknown source id.
HopMatrix hop_distances(const Topology& t, std::span<const NodeId> sources);

/// All-pairs hop counts indexed by node index.
Eigen::MatrixXi all_pairs_hops(const Topology& t);

/// BFS row from a single node index.
std::vector<int> bfs_hops(const Topology& t, std::size_t source);

/// Maps every node to the landmark with the fewest hops; ties go to the
/// lexicographically smallest landmark id.
std::map<NodeId, NodeId> assign_to_closest(const Topology& t, std::span<const NodeId> landmarks);

}  // namespace geoloc
