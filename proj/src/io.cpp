#include "geoloc/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "geoloc/error.hpp"

namespace geoloc {

namespace {

Json point_json(const GeoPoint& p) { return Json{{"lat", p.lat}, {"lon", p.lon}}; }

Json geojson_point(const GeoPoint& p) {
  return Json{{"type", "Point"}, {"coordinates", Json::array({p.lon, p.lat})}};
}

Json feature(const GeoPoint& p, Json properties) {
  return Json{{"type", "Feature"}, {"geometry", geojson_point(p)}, {"properties", std::move(properties)}};
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

Json parse_json(std::istream& in, const std::string& what) {
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(what + ": " + e.what());
  }
}

double number_field(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key) || !obj[key].is_number()) {
    throw ParseError(where + "." + key + " missing or not a number");
  }
  return obj[key].get<double>();
}

}  // namespace

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json topology_to_json(const Topology& t) {
  Json nodes = Json::array();
  for (const auto& n : t.nodes()) nodes.push_back(Json{{"id", n.id}, {"lat", n.position.lat}, {"lon", n.position.lon}});
  Json edges = Json::array();
  for (const auto& [a, b] : t.edges()) edges.push_back(Json::array({a, b}));
  return Json{{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

void write_topology_edge_list(const Topology& t, std::ostream& edges, std::ostream& nodes) {
  for (const auto& n : t.nodes()) nodes << n.id << ' ' << fmt("%.17g", n.position.lat) << ' ' << fmt("%.17g", n.position.lon) << '\n';
  for (const auto& [a, b] : t.edges()) edges << a << ' ' << b << '\n';
}

Json landmark_set_to_json(const Topology& t, const LandmarkSet& ls) {
  Json positions = Json::object();
  for (const auto& l : ls.landmarks) positions[l] = point_json(t.position(t.index_of(l)));
  Json assignment = Json::object();
  for (const auto& [node, lm] : ls.assignment) assignment[node] = lm;
  return Json{{"landmarks", ls.landmarks},
              {"positions", std::move(positions)},
              {"assignment", std::move(assignment)},
              {"objective", Json{{"max_hop", ls.objective.max_hop}, {"mean_hop", ls.objective.mean_hop()}}}};
}

LandmarkFile read_landmarks_json(std::istream& in) {
  const Json doc = parse_json(in, "landmarks JSON");
  if (!doc.is_object() || !doc.contains("landmarks") || !doc["landmarks"].is_array()) {
    throw ParseError("landmarks JSON: missing \"landmarks\" array");
  }
  LandmarkFile out;
  for (const auto& id : doc["landmarks"]) {
    if (!id.is_string()) throw ParseError("landmarks JSON: landmark ids must be strings");
    out.landmarks.push_back(id.get<std::string>());
  }
  if (doc.contains("positions")) {
    for (const auto& [id, p] : doc["positions"].items()) {
      const std::string where = "landmarks JSON: positions." + id;
      out.positions.emplace(id, make_geo_point(number_field(p, "lat", where), number_field(p, "lon", where)));
    }
  }
  return out;
}

Json models_to_json(const std::map<NodeId, LatencyModel>& models, const std::map<NodeId, GeoPoint>& positions,
                    double per_hop_ms) {
  Json jm = Json::object();
  for (const auto& [id, m] : models) {
    Json entry{{"p", m.p}, {"q", m.q}, {"n", m.n}, {"m", m.m}, {"fit_rss", m.fit_rss}, {"sample_count", m.sample_count}};
    if (auto it = positions.find(id); it != positions.end()) {
      entry["lat"] = it->second.lat;
      entry["lon"] = it->second.lon;
    }
    jm[id] = std::move(entry);
  }
  return Json{{"per_hop_ms", per_hop_ms}, {"models", std::move(jm)}};
}

ModelFile read_models_json(std::istream& in) {
  const Json doc = parse_json(in, "models JSON");
  if (!doc.is_object() || !doc.contains("models") || !doc["models"].is_object()) {
    throw ParseError("models JSON: missing \"models\" object");
  }
  ModelFile out;
  if (doc.contains("per_hop_ms")) out.per_hop_ms = number_field(doc, "per_hop_ms", "models JSON");
  for (const auto& [id, e] : doc["models"].items()) {
    const std::string where = "models JSON: models." + id;
    LatencyModel m;
    m.p = number_field(e, "p", where);
    m.q = number_field(e, "q", where);
    m.n = number_field(e, "n", where);
    m.m = number_field(e, "m", where);
    m.fit_rss = e.contains("fit_rss") ? number_field(e, "fit_rss", where) : 0.0;
    m.sample_count = e.contains("sample_count") ? static_cast<std::size_t>(number_field(e, "sample_count", where)) : 0;
    out.models.emplace(id, m);
    if (e.contains("lat") || e.contains("lon")) {
      out.positions.emplace(id, make_geo_point(number_field(e, "lat", where), number_field(e, "lon", where)));
    }
  }
  return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double csv_number(const std::string& tok, std::size_t lineno, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size() || !std::isfinite(v)) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError("measurement CSV line " + std::to_string(lineno) + ": " + what + " \"" + tok +
                     "\" is not a valid number");
  }
}

}  // namespace

MeasurementFile read_measurements_csv(std::istream& in) {
  MeasurementFile out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line.front() == '#') {
      const auto f = split_csv(line.substr(1));
      if (!f.empty() && f[0] == "truth") {
        if (f.size() != 4) throw ParseError("measurement CSV line " + std::to_string(lineno) + ": malformed truth line");
        out.truths[f[1]] = make_geo_point(csv_number(f[2], lineno, "latitude"), csv_number(f[3], lineno, "longitude"));
      }
      continue;
    }
    const auto f = split_csv(line);
    if (!f.empty() && f[0] == "landmark_id") continue;
    const std::string where = "measurement CSV line " + std::to_string(lineno);
    if (f.size() < 4) throw ParseError(where + ": expected landmark_id,target_id,hops,rtt1[,rtt2...]");
    if (f[0].empty() || f[1].empty()) throw ParseError(where + ": empty id");
    Measurement m;
    m.landmark_id = f[0];
    m.target_id = f[1];
    const double hops = csv_number(f[2], lineno, "hop count");
    if (hops < 0 || hops != std::floor(hops)) throw ParseError(where + ": hop count must be a non-negative integer");
    m.hop_count = static_cast<int>(hops);
    for (std::size_t i = 3; i < f.size(); ++i) m.rtt_samples_ms.push_back(csv_number(f[i], lineno, "RTT"));
    try {
      validate(m);
    } catch (const ValidationError& e) {
      throw ParseError(where + ": " + e.what());
    }
    out.measurements.push_back(std::move(m));
  }
  return out;
}

void write_measurements_csv(std::ostream& out, std::span<const Measurement> measurements,
                            const std::map<NodeId, GeoPoint>& truths) {
  for (const auto& [id, p] : truths) out << "# truth," << id << ',' << fmt("%.17g", p.lat) << ',' << fmt("%.17g", p.lon) << '\n';
  out << "landmark_id,target_id,hops,rtt_ms...\n";
  for (const auto& m : measurements) {
    out << m.landmark_id << ',' << m.target_id << ',' << m.hop_count;
    for (double s : m.rtt_samples_ms) out << ',' << fmt("%.17g", s);
    out << '\n';
  }
}

Json candidate_to_json(const CandidatePoint& c) {
  return Json{{"lat", c.point.lat},
              {"lon", c.point.lon},
              {"pair", Json::array({c.source_pair.first, c.source_pair.second})},
              {"case", std::string(to_string(c.case_tag))},
              {"weight", c.weight}};
}

Json estimate_to_json(const NodeId& target, const EstimatedLocation& est) {
  Json kept = Json::array();
  for (const auto& c : est.kept_points) kept.push_back(candidate_to_json(c));
  Json dropped = Json::array();
  for (const auto& c : est.dropped_points) dropped.push_back(candidate_to_json(c));
  return Json{{"target_id", target},
              {"lat", est.point.lat},
              {"lon", est.point.lon},
              {"mean_residual_km", est.mean_residual_km},
              {"kept", std::move(kept)},
              {"dropped", std::move(dropped)},
              {"skipped_pairs", est.skipped_pairs}};
}

Json estimate_to_geojson(const EstimatedLocation& est, std::span<const LabeledCircle> circles) {
  Json features = Json::array();
  features.push_back(feature(est.point, Json{{"role", "estimate"}, {"mean_residual_km", est.mean_residual_km}}));
  for (const auto& c : est.kept_points) {
    features.push_back(feature(c.point, Json{{"role", "kept"},
                                             {"case", std::string(to_string(c.case_tag))},
                                             {"pair", Json::array({c.source_pair.first, c.source_pair.second})}}));
  }
  for (const auto& c : est.dropped_points) {
    features.push_back(feature(c.point, Json{{"role", "dropped"},
                                             {"case", std::string(to_string(c.case_tag))},
                                             {"pair", Json::array({c.source_pair.first, c.source_pair.second})}}));
  }
  for (const auto& c : circles) {
    features.push_back(feature(c.circle.center,
                               Json{{"role", "circle"}, {"landmark_id", c.landmark_id}, {"radius_m", c.circle.radius_m}}));
  }
  return Json{{"type", "FeatureCollection"}, {"features", std::move(features)}};
}

Json report_to_json(const ExperimentReport& r) {
  Json targets = Json::array();
  for (const auto& t : r.targets) {
    Json row{{"target_id", t.target}, {"true_lat", t.truth.lat}, {"true_lon", t.truth.lon}};
    if (t.estimate) {
      row["est_lat"] = t.estimate->lat;
      row["est_lon"] = t.estimate->lon;
      row["error_km"] = t.error_km;
    } else {
      row["est_lat"] = nullptr;
      row["est_lon"] = nullptr;
      row["error_km"] = nullptr;
    }
    row["circles"] = t.circles;
    if (!t.failure.empty()) row["failure"] = t.failure;
    targets.push_back(std::move(row));
  }
  return Json{{"method", r.method},
              {"world_seed", r.world_seed},
              {"experiment_seed", r.experiment_seed},
              {"landmarks", r.landmarks},
              {"uncalibrated", Json(r.uncalibrated)},
              {"summary",
               Json{{"located", r.summary.located},
                    {"failed", r.summary.failed},
                    {"median_km", r.summary.median_km},
                    {"mean_km", r.summary.mean_km},
                    {"p90_km", r.summary.p90_km}}},
              {"targets", std::move(targets)}};
}

void write_report_csv(std::ostream& out, std::span<const ExperimentReport> reports) {
  out << "method,target_id,true_lat,true_lon,est_lat,est_lon,error_km\n";
  for (const auto& r : reports) {
    for (const auto& t : r.targets) {
      out << r.method << ',' << t.target << ',' << fmt("%.6f", t.truth.lat) << ',' << fmt("%.6f", t.truth.lon) << ',';
      if (t.estimate) {
        out << fmt("%.6f", t.estimate->lat) << ',' << fmt("%.6f", t.estimate->lon) << ',' << fmt("%.3f", t.error_km);
      } else {
        out << ",,";
      }
      out << '\n';
    }
  }
}

Json world_to_json(const SimWorld& w) {
  Json delay{{"propagation_speed_km_per_ms", w.delay.propagation_speed_km_per_ms},
             {"per_hop_ms", w.delay.per_hop_ms},
             {"samples_per_probe", w.delay.samples_per_probe}};
  if (w.delay.exponential_mean_ms) {
    delay["stochastic"] = Json{{"kind", "exponential"}, {"mean_ms", *w.delay.exponential_mean_ms}};
  } else {
    delay["stochastic"] = Json{{"kind", "none"}};
  }
  return Json{{"seed", w.seed}, {"delay", std::move(delay)}, {"topology", topology_to_json(w.topology)}};
}

}  // namespace geoloc
