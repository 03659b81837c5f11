#include "geoloc/placement.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "geoloc/error.hpp"

namespace geoloc {

namespace {

using Index = Eigen::Index;

PlacementObjective objective_of(const Eigen::MatrixXi& hops, std::span<const std::size_t> landmarks) {
  PlacementObjective obj;
  obj.node_count = static_cast<std::size_t>(hops.cols());
  for (Index v = 0; v < hops.cols(); ++v) {
    int best = std::numeric_limits<int>::max();
    for (std::size_t l : landmarks) best = std::min(best, hops(static_cast<Index>(l), v));
    obj.max_hop = std::max(obj.max_hop, best);
    obj.total_hop += best;
  }
  return obj;
}

std::vector<std::size_t> indices_of(const Topology& t, std::span<const NodeId> ids) {
  std::vector<std::size_t> out;
  out.reserve(ids.size());
  for (const auto& id : ids) out.push_back(t.index_of(id));
  return out;
}

}  // namespace

PlacementObjective evaluate_placement(const Topology& t, std::span<const NodeId> landmarks) {
  if (landmarks.empty()) throw ValidationError("placement needs at least one landmark");
  const auto idx = indices_of(t, landmarks);
  PlacementObjective obj;
  obj.node_count = t.size();
  std::vector<int> best(t.size(), std::numeric_limits<int>::max());
  for (std::size_t l : idx) {
    const auto row = bfs_hops(t, l);
    for (std::size_t v = 0; v < t.size(); ++v) best[v] = std::min(best[v], row[v]);
  }
  for (int b : best) {
    obj.max_hop = std::max(obj.max_hop, b);
    obj.total_hop += b;
  }
  return obj;
}

LandmarkSet make_landmark_set(const Topology& t, std::vector<NodeId> landmarks) {
  auto sorted = landmarks;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("landmarks must be distinct");
  }
  LandmarkSet out;
  out.assignment = assign_to_closest(t, landmarks);
  out.objective = evaluate_placement(t, landmarks);
  out.landmarks = std::move(landmarks);
  return out;
}

NodeId place_orientation_mark(const Topology& t) {
  const Eigen::MatrixXi hops = all_pairs_hops(t);
  std::size_t best = 0;
  int best_ecc = std::numeric_limits<int>::max();
  long long best_total = std::numeric_limits<long long>::max();
  for (Index v = 0; v < hops.rows(); ++v) {
    const int ecc = hops.row(v).maxCoeff();
    const long long total = hops.row(v).cast<long long>().sum();
    // Ascending index order gives the smallest-id tie-break.
    if (ecc < best_ecc || (ecc == best_ecc && total < best_total)) {
      best = static_cast<std::size_t>(v);
      best_ecc = ecc;
      best_total = total;
    }
  }
  return t.id(best);
}

LandmarkSet two_approx(const Topology& t, std::size_t k, const NodeId& seed_node) {
  if (k < 1 || k > t.size()) {
    throw ValidationError("k = " + std::to_string(k) + " must be in [1, " + std::to_string(t.size()) + "]");
  }
  const std::size_t seed = t.index_of(seed_node);

  // Distance from every node to its closest placed landmark; before any
  // landmark exists the seed plays that role.
  std::vector<int> closest = bfs_hops(t, seed);
  std::vector<bool> placed(t.size(), false);
  std::vector<NodeId> landmarks;
  landmarks.reserve(k);

  while (landmarks.size() < k) {
    std::size_t pick = t.size();
    for (std::size_t v = 0; v < t.size(); ++v) {
      if (placed[v]) continue;
      if (pick == t.size() || closest[v] > closest[pick]) pick = v;
    }
    placed[pick] = true;
    landmarks.push_back(t.id(pick));
    // The seed is discarded: after the first pick distances are measured to
    // real landmarks only.
    const auto row = bfs_hops(t, pick);
    if (landmarks.size() == 1) {
      closest = row;
    } else {
      for (std::size_t v = 0; v < t.size(); ++v) closest[v] = std::min(closest[v], row[v]);
    }
  }
  return make_landmark_set(t, std::move(landmarks));
}

LandmarkSet refine(const Topology& t, const LandmarkSet& initial, const RefineObserver& observer) {
  const Eigen::MatrixXi hops = all_pairs_hops(t);
  std::vector<std::size_t> current = indices_of(t, initial.landmarks);
  std::vector<bool> occupied(t.size(), false);
  for (std::size_t l : current) occupied[l] = true;

  PlacementObjective incumbent = objective_of(hops, current);
  for (std::size_t iteration = 0;; ++iteration) {
    bool moved = false;
    for (std::size_t slot = 0; slot < current.size(); ++slot) {
      const std::size_t from = current[slot];
      std::size_t best_to = from;
      PlacementObjective best = incumbent;
      for (std::size_t to : t.neighbors(from)) {
        if (occupied[to]) continue;
        current[slot] = to;
        const auto candidate = objective_of(hops, current);
        if (candidate < best) {
          best = candidate;
          best_to = to;
        }
      }
      current[slot] = from;
      if (best_to == from) continue;

      current[slot] = best_to;
      occupied[from] = false;
      occupied[best_to] = true;
      if (observer) observer(RefineMove{iteration, slot, t.id(from), t.id(best_to), incumbent, best});
      incumbent = best;
      moved = true;
    }
    if (!moved) break;
  }

  std::vector<NodeId> ids;
  ids.reserve(current.size());
  for (std::size_t l : current) ids.push_back(t.id(l));
  return make_landmark_set(t, std::move(ids));
}

LandmarkSet dragoon_place(const Topology& t, std::size_t k, const RefineObserver& observer) {
  const NodeId mark = place_orientation_mark(t);
  return refine(t, two_approx(t, k, mark), observer);
}

}  // namespace geoloc
