#include "geoloc/topology.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "geoloc/error.hpp"

namespace geoloc {

namespace {

constexpr int kUnreached = -1;

std::string in_quotes(std::string_view s) { return "\"" + std::string(s) + "\""; }

}  // namespace

Topology Topology::build(std::vector<Node> nodes, std::vector<Edge> edges) {
  if (nodes.empty()) throw ValidationError("topology has no nodes");

  for (auto& n : nodes) {
    try {
      n.position = make_geo_point(n.position.lat, n.position.lon);
    } catch (const ValidationError& e) {
      throw ValidationError("node " + in_quotes(n.id) + ": " + e.what());
    }
  }
  std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (nodes[i].id == nodes[i - 1].id) throw ValidationError("duplicate node id " + in_quotes(nodes[i].id));
  }

  Topology t;
  t.nodes_ = std::move(nodes);
  t.adjacency_.resize(t.nodes_.size());

  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& [a, b] = edges[e];
    const auto ia = t.find(a);
    const auto ib = t.find(b);
    if (!ia) throw ValidationError("edge " + std::to_string(e) + " references unknown node " + in_quotes(a));
    if (!ib) throw ValidationError("edge " + std::to_string(e) + " references unknown node " + in_quotes(b));
    if (*ia == *ib) throw ValidationError("self-loop on node " + in_quotes(a));
    const auto key = std::minmax(*ia, *ib);
    if (!seen.insert(key).second) {
      throw ValidationError("duplicate edge " + in_quotes(a) + " - " + in_quotes(b));
    }
    t.adjacency_[*ia].push_back(*ib);
    t.adjacency_[*ib].push_back(*ia);
  }
  t.edge_count_ = seen.size();
  for (auto& adj : t.adjacency_) std::sort(adj.begin(), adj.end());

  const auto reach = bfs_hops(t, 0);
  const auto unreached = std::find(reach.begin(), reach.end(), kUnreached);
  if (unreached != reach.end()) {
    const auto count = std::count(reach.begin(), reach.end(), kUnreached);
    throw ValidationError("topology is disconnected: node " +
                          in_quotes(t.id(static_cast<std::size_t>(unreached - reach.begin()))) + " and " +
                          std::to_string(count - 1) + " other node(s) unreachable from " + in_quotes(t.id(0)));
  }
  return t;
}

std::optional<std::size_t> Topology::find(std::string_view id) const {
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                                   [](const Node& n, std::string_view v) { return n.id < v; });
  if (it == nodes_.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

std::size_t Topology::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw ValidationError("unknown node id " + in_quotes(id));
}

std::vector<Edge> Topology::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (std::size_t u = 0; u < size(); ++u) {
    for (std::size_t v : adjacency_[u]) {
      if (u < v) out.emplace_back(id(u), id(v));
    }
  }
  return out;
}

Topology load_topology_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("topology JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw ParseError("topology JSON: missing \"nodes\" array");
  }

  std::vector<Node> nodes;
  const auto& jn = doc["nodes"];
  for (std::size_t i = 0; i < jn.size(); ++i) {
    const auto& n = jn[i];
    const std::string where = "topology JSON: nodes[" + std::to_string(i) + "]";
    if (!n.is_object()) throw ParseError(where + " is not an object");
    if (!n.contains("id") || !n["id"].is_string()) throw ParseError(where + ".id missing or not a string");
    for (const char* key : {"lat", "lon"}) {
      if (!n.contains(key) || !n[key].is_number()) {
        throw ParseError(where + "." + key + " missing or not a number");
      }
    }
    nodes.push_back(Node{n["id"].get<std::string>(), GeoPoint{n["lat"].get<double>(), n["lon"].get<double>()}});
  }

  std::vector<Edge> edges;
  if (doc.contains("edges")) {
    const auto& je = doc["edges"];
    if (!je.is_array()) throw ParseError("topology JSON: \"edges\" is not an array");
    for (std::size_t i = 0; i < je.size(); ++i) {
      const auto& e = je[i];
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
        throw ParseError("topology JSON: edges[" + std::to_string(i) + "] is not a pair of ids");
      }
      edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
  }
  return Topology::build(std::move(nodes), std::move(edges));
}

namespace {

// Splits a whitespace-separated line; skips blanks and '#' comments.
bool tokenize(const std::string& line, std::vector<std::string>& out) {
  out.clear();
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) {
    if (out.empty() && tok.front() == '#') return false;
    out.push_back(tok);
  }
  return !out.empty();
}

double parse_number(const std::string& tok, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(where + ": \"" + tok + "\" is not a number");
  }
}

}  // namespace

Topology load_topology_edge_list(std::istream& edges_in, std::istream& nodes_in) {
  std::vector<Node> nodes;
  std::vector<std::string> tok;
  std::string line;
  for (std::size_t lineno = 1; std::getline(nodes_in, line); ++lineno) {
    if (!tokenize(line, tok)) continue;
    const std::string where = "node file line " + std::to_string(lineno);
    if (tok.size() != 3) throw ParseError(where + ": expected \"id lat lon\"");
    nodes.push_back(Node{tok[0], GeoPoint{parse_number(tok[1], where), parse_number(tok[2], where)}});
  }
  std::vector<Edge> edges;
  for (std::size_t lineno = 1; std::getline(edges_in, line); ++lineno) {
    if (!tokenize(line, tok)) continue;
    if (tok.size() != 2) throw ParseError("edge file line " + std::to_string(lineno) + ": expected \"id id\"");
    edges.emplace_back(tok[0], tok[1]);
  }
  return Topology::build(std::move(nodes), std::move(edges));
}

std::vector<int> bfs_hops(const Topology& t, std::size_t source) {
  std::vector<int> dist(t.size(), kUnreached);
  std::deque<std::size_t> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : t.neighbors(u)) {
      if (dist[v] == kUnreached) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

int HopMatrix::at(const Topology& t, std::string_view source, std::string_view target) const {
  const std::size_t s = t.index_of(source);
  const auto row = std::find(sources_.begin(), sources_.end(), s);
  if (row == sources_.end()) throw ValidationError("node \"" + std::string(source) + "\" is not a source");
  return hops_(row - sources_.begin(), static_cast<Eigen::Index>(t.index_of(target)));
}

std::map<NodeId, int> HopMatrix::row(const Topology& t, std::string_view source) const {
  std::map<NodeId, int> out;
  for (std::size_t v = 0; v < t.size(); ++v) out.emplace(t.id(v), at(t, source, t.id(v)));
  return out;
}

HopMatrix hop_distances(const Topology& t, std::span<const NodeId> sources) {
  std::vector<std::size_t> idx;
  idx.reserve(sources.size());
  for (const auto& s : sources) idx.push_back(t.index_of(s));
  Eigen::MatrixXi hops(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(t.size()));
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const auto row = bfs_hops(t, idx[r]);
    hops.row(static_cast<Eigen::Index>(r)) = Eigen::Map<const Eigen::RowVectorXi>(row.data(), row.size());
  }
  return HopMatrix(std::move(idx), std::move(hops));
}

Eigen::MatrixXi all_pairs_hops(const Topology& t) {
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXi hops(n, n);
  for (Eigen::Index s = 0; s < n; ++s) {
    const auto row = bfs_hops(t, static_cast<std::size_t>(s));
    hops.row(s) = Eigen::Map<const Eigen::RowVectorXi>(row.data(), n);
  }
  return hops;
}

std::map<NodeId, NodeId> assign_to_closest(const Topology& t, std::span<const NodeId> landmarks) {
  if (landmarks.empty()) throw ValidationError("assignment needs at least one landmark");
  std::vector<std::size_t> idx;
  for (const auto& l : landmarks) idx.push_back(t.index_of(l));
  // Index order equals id order, so scanning ascending indices and keeping
  // strict improvements yields the smallest-id tie-break.
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());

  std::vector<std::vector<int>> rows;
  rows.reserve(idx.size());
  for (std::size_t l : idx) rows.push_back(bfs_hops(t, l));

  std::map<NodeId, NodeId> out;
  for (std::size_t v = 0; v < t.size(); ++v) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < idx.size(); ++j) {
      if (rows[j][v] < rows[best][v]) best = j;
    }
    out.emplace(t.id(v), t.id(idx[best]));
  }
  return out;
}

}  // namespace geoloc
