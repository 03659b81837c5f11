#include "geoloc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>

#include "geoloc/error.hpp"
#include "geoloc/rng.hpp"

namespace geoloc {

void validate(const DelayParams& p) {
  if (!(p.propagation_speed_km_per_ms > 0.0)) throw ValidationError("propagation speed must be > 0");
  if (!(p.per_hop_ms >= 0.0)) throw ValidationError("per-hop delay must be >= 0");
  if (p.samples_per_probe < 1) throw ValidationError("samples per probe must be >= 1");
  if (p.exponential_mean_ms && !(*p.exponential_mean_ms > 0.0)) {
    throw ValidationError("exponential delay mean must be > 0");
  }
}

namespace {

constexpr int kMaxRadiusGrowth = 40;

std::string node_name(std::size_t i, std::size_t n) {
  std::size_t width = 3;
  for (std::size_t v = n > 0 ? n - 1 : 0; v >= 1000; v /= 10) ++width;
  std::string digits = std::to_string(i);
  return "n" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

bool connected(const std::vector<std::vector<std::size_t>>& adj) {
  std::vector<bool> seen(adj.size(), false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (auto v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        ++count;
        queue.push_back(v);
      }
    }
  }
  return count == adj.size();
}

}  // namespace

Topology generate_topology(std::size_t n_nodes, const BoundingBox& box, double connection_radius_km,
                           std::uint64_t seed) {
  if (n_nodes < 1) throw ValidationError("topology needs at least one node");
  if (!(connection_radius_km > 0.0)) throw ValidationError("connection radius must be > 0");
  if (!(box.lat_min <= box.lat_max) || !(box.lon_min <= box.lon_max) || box.lat_min < -90.0 ||
      box.lat_max > 90.0) {
    throw ValidationError("invalid bounding box");
  }

  Rng rng(derive_seed(seed, "topology"));
  std::vector<Node> nodes;
  nodes.reserve(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    const double lat = rng.uniform(box.lat_min, box.lat_max);
    const double lon = rng.uniform(box.lon_min, box.lon_max);
    nodes.push_back(Node{node_name(i, n_nodes), make_geo_point(lat, lon)});
  }

  std::vector<double> dist(n_nodes * n_nodes, 0.0);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    for (std::size_t j = i + 1; j < n_nodes; ++j) {
      dist[i * n_nodes + j] = dist[j * n_nodes + i] =
          orthodromic_distance(nodes[i].position, nodes[j].position) / 1000.0;
    }
  }

  double radius = connection_radius_km;
  for (int attempt = 0; attempt <= kMaxRadiusGrowth; ++attempt, radius *= 1.25) {
    std::vector<std::vector<std::size_t>> adj(n_nodes);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n_nodes; ++i) {
      for (std::size_t j = i + 1; j < n_nodes; ++j) {
        if (dist[i * n_nodes + j] <= radius) {
          adj[i].push_back(j);
          adj[j].push_back(i);
          edges.emplace_back(nodes[i].id, nodes[j].id);
        }
      }
    }
    if (connected(adj)) return Topology::build(nodes, std::move(edges));
  }
  throw ValidationError("could not generate a connected topology within the radius growth budget");
}

namespace {

std::size_t nearest_node(const Topology& t, const GeoPoint& p) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double d = orthodromic_distance(p, t.position(i));
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

struct Attachment {
  std::size_t node;
  int extra_hops;
  double extra_km;
};

Attachment attach(const Topology& t, const Endpoint& e) {
  if (!e.position) return {t.index_of(e.id), 0, 0.0};
  const std::size_t n = nearest_node(t, *e.position);
  return {n, 1, orthodromic_distance(*e.position, t.position(n)) / 1000.0};
}

}  // namespace

PathInfo shortest_path(const SimWorld& w, const Endpoint& src, const Endpoint& dst) {
  const Topology& t = w.topology;
  const auto a = attach(t, src);
  const auto b = attach(t, dst);

  // Breadth-first layers; among the paths with the fewest hops the one with
  // the smallest great-circle length wins.
  std::vector<int> hops(t.size(), -1);
  std::vector<double> length_km(t.size(), 0.0);
  std::deque<std::size_t> queue{a.node};
  hops[a.node] = 0;
  while (!queue.empty()) {
    const auto u = queue.front();
    if (hops[b.node] >= 0 && hops[u] >= hops[b.node]) break;
    queue.pop_front();
    for (auto v : t.neighbors(u)) {
      const double via = length_km[u] + orthodromic_distance(t.position(u), t.position(v)) / 1000.0;
      if (hops[v] < 0) {
        hops[v] = hops[u] + 1;
        length_km[v] = via;
        queue.push_back(v);
      } else if (hops[v] == hops[u] + 1 && via < length_km[v]) {
        length_km[v] = via;
      }
    }
  }
  if (hops[b.node] < 0) throw ValidationError("endpoint \"" + dst.id + "\" unreachable from \"" + src.id + "\"");

  PathInfo path;
  path.hops = hops[b.node] + a.extra_hops + b.extra_hops;
  path.length_km = length_km[b.node] + a.extra_km + b.extra_km;
  return path;
}

double deterministic_delay_ms(const SimWorld& w, const PathInfo& path) {
  return path.length_km / w.delay.propagation_speed_km_per_ms + w.delay.per_hop_ms * path.hops;
}

Measurement simulate_measurement(const SimWorld& w, const Endpoint& src, const Endpoint& dst,
                                 std::optional<std::uint64_t> stream_seed) {
  validate(w.delay);
  const PathInfo path = shortest_path(w, src, dst);
  const double det = deterministic_delay_ms(w, path);

  Rng rng(stream_seed ? *stream_seed : derive_seed(derive_seed(w.seed, src.id), dst.id));
  Measurement m{src.id, dst.id, {}, path.hops};
  m.rtt_samples_ms.reserve(static_cast<std::size_t>(w.delay.samples_per_probe));
  for (int i = 0; i < w.delay.samples_per_probe; ++i) {
    const double jitter = w.delay.exponential_mean_ms ? rng.exponential(*w.delay.exponential_mean_ms) : 0.0;
    m.rtt_samples_ms.push_back(2.0 * (det + jitter));
  }
  return m;
}

std::string_view to_string(PlacementStrategy s) {
  switch (s) {
    case PlacementStrategy::kDragoon:
      return "dragoon";
    case PlacementStrategy::kTwoApprox:
      return "two_approx";
    case PlacementStrategy::kRandom:
      return "random";
    case PlacementStrategy::kShortestPing:
      return "shortest_ping_only";
  }
  return "unknown";
}

PlacementStrategy parse_strategy(std::string_view s) {
  for (auto v : {PlacementStrategy::kDragoon, PlacementStrategy::kTwoApprox, PlacementStrategy::kRandom,
                 PlacementStrategy::kShortestPing}) {
    if (s == to_string(v)) return v;
  }
  throw ValidationError("unknown placement strategy \"" + std::string(s) + "\"");
}

ErrorSummary summarize(const std::vector<TargetResult>& targets) {
  ErrorSummary s;
  std::vector<double> errors;
  for (const auto& t : targets) {
    if (t.failure.empty()) {
      errors.push_back(t.error_km);
    } else {
      ++s.failed;
    }
  }
  s.located = errors.size();
  if (errors.empty()) return s;
  std::sort(errors.begin(), errors.end());
  const std::size_t n = errors.size();
  s.median_km = n % 2 == 1 ? errors[n / 2] : 0.5 * (errors[n / 2 - 1] + errors[n / 2]);
  s.mean_km = std::accumulate(errors.begin(), errors.end(), 0.0) / static_cast<double>(n);
  const auto rank = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(n)));
  s.p90_km = errors[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

std::vector<NodeId> pick_targets(const Topology& t, std::size_t n, std::uint64_t seed) {
  if (n > t.size()) throw ValidationError("more targets requested than topology nodes");
  std::vector<std::size_t> idx(t.size());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(derive_seed(seed, "targets"));
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(t.id(idx[i]));
  return out;
}

std::vector<NodeId> place_landmarks(const Topology& t, std::size_t k, PlacementStrategy s, std::uint64_t seed) {
  switch (s) {
    case PlacementStrategy::kDragoon:
    case PlacementStrategy::kShortestPing:
      return dragoon_place(t, k).landmarks;
    case PlacementStrategy::kTwoApprox:
      return two_approx(t, k, place_orientation_mark(t)).landmarks;
    case PlacementStrategy::kRandom: {
      if (k < 1 || k > t.size()) throw ValidationError("k out of range for random placement");
      return pick_targets(t, k, derive_seed(seed, "random-placement"));
    }
  }
  throw ValidationError("unknown placement strategy");
}

std::vector<Measurement> calibration_mesh(const SimWorld& w, const std::vector<NodeId>& landmarks,
                                          std::uint64_t seed) {
  std::vector<Measurement> out;
  for (const auto& a : landmarks) {
    for (const auto& b : landmarks) {
      if (a == b) continue;
      const auto stream = derive_seed(derive_seed(derive_seed(seed, "mesh"), a), b);
      out.push_back(simulate_measurement(w, Endpoint::node(a), Endpoint::node(b), stream));
    }
  }
  return out;
}

ExperimentReport run_experiment(const SimWorld& w, const ExperimentConfig& cfg) {
  if (cfg.k < 5) throw ValidationError("experiments need k >= 5 landmarks");
  if (cfg.n_targets < 1) throw ValidationError("experiments need at least one target");
  validate(w.delay);

  const Topology& t = w.topology;
  ExperimentReport report;
  report.method = std::string(to_string(cfg.strategy));
  report.world_seed = w.seed;
  report.experiment_seed = cfg.seed;
  report.landmarks = place_landmarks(t, cfg.k, cfg.strategy, cfg.seed);

  std::map<NodeId, GeoPoint> positions;
  for (const auto& l : report.landmarks) positions.emplace(l, t.position(t.index_of(l)));

  std::map<NodeId, LatencyModel> models;
  if (cfg.strategy != PlacementStrategy::kShortestPing) {
    const auto mesh = calibration_mesh(w, report.landmarks, cfg.seed);
    auto calibration = calibrate_each(report.landmarks, mesh, positions, cfg.per_hop_ms);
    models = std::move(calibration.models);
    report.uncalibrated = std::move(calibration.failures);
  }

  for (const auto& target : pick_targets(t, cfg.n_targets, cfg.seed)) {
    TargetResult r;
    r.target = target;
    r.truth = t.position(t.index_of(target));
    const auto target_seed = derive_seed(derive_seed(cfg.seed, "target"), target);
    try {
      std::vector<LabeledCircle> circles;
      const GeoPoint* nearest = nullptr;
      double best_rtt = std::numeric_limits<double>::infinity();
      for (const auto& l : report.landmarks) {
        const auto meas =
            simulate_measurement(w, Endpoint::node(l), Endpoint::node(target), derive_seed(target_seed, l));
        if (cfg.strategy == PlacementStrategy::kShortestPing) {
          const double rtt = min_rtt_ms(meas);
          if (rtt < best_rtt) {
            best_rtt = rtt;
            nearest = &positions.at(l);
          }
          continue;
        }
        const auto model = models.find(l);
        if (model == models.end()) continue;
        try {
          circles.push_back({l, build_circle(positions.at(l), model->second, meas, cfg.per_hop_ms)});
        } catch (const DomainError&) {
          // Latency below this landmark's calibrated domain: no circle.
        }
      }
      if (cfg.strategy == PlacementStrategy::kShortestPing) {
        r.estimate = *nearest;
        r.circles = 0;
      } else {
        r.circles = circles.size();
        r.estimate = estimate_target(circles, cfg.estimation).point;
      }
      r.error_km = orthodromic_distance(*r.estimate, r.truth) / 1000.0;
    } catch (const Error& e) {
      r.estimate.reset();
      r.error_km = std::numeric_limits<double>::quiet_NaN();
      r.failure = e.what();
    }
    report.targets.push_back(std::move(r));
  }
  report.summary = summarize(report.targets);
  return report;
}

}  // namespace geoloc
