#include "geoloc/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "geoloc/error.hpp"
#include "geoloc/io.hpp"
#include "geoloc/rng.hpp"
#include "geoloc/simulator.hpp"

namespace geoloc::cli {

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open \"" + path + "\" for reading");
  return in;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open \"" + path + "\" for writing");
  out << content;
  if (!out.flush()) throw IoError("failed writing \"" + path + "\"");
}

// Writes to the file when a path is given, otherwise to stdout.
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
  } else {
    write_file(path, content);
  }
}

Topology read_topology(const std::string& path, const std::string& nodes_path) {
  auto in = open_input(path);
  if (nodes_path.empty()) return load_topology_json(in);
  auto nodes = open_input(nodes_path);
  return load_topology_edge_list(in, nodes);
}

struct Options {
  // shared
  std::string topology;
  std::string nodes;
  std::string out;
  std::size_t k = 10;
  std::string algorithm = "dragoon";
  std::uint64_t seed = 1;
  double per_hop_ms = kDefaultPerHopMs;
  // estimation
  double eps0_m = GridSearchConfig{}.eps0_m;
  double eps_min_m = GridSearchConfig{}.eps_min_m;
  double gap_max_km = LaterationConfig{}.gap_max_km;
  int filter_rounds = OutlierFilterConfig{}.rounds;
  double drop_fraction = OutlierFilterConfig{}.drop_fraction;
  // fit / locate
  std::string measurements;
  std::string landmarks;
  std::string models;
  std::string geojson;
  // simulate / eval
  std::size_t n_nodes = 100;
  double radius_km = 400.0;
  std::size_t n_targets = 50;
  double noise_ms = 2.0;
  int samples = 10;
  double speed = 200.0;
  std::string csv;
};

EstimationConfig estimation_config(const Options& o) {
  EstimationConfig cfg;
  cfg.grid.eps0_m = o.eps0_m;
  cfg.grid.eps_min_m = o.eps_min_m;
  cfg.lateration.gap_max_km = o.gap_max_km;
  cfg.filter.rounds = o.filter_rounds;
  cfg.filter.drop_fraction = o.drop_fraction;
  validate(cfg.grid);
  validate(cfg.filter);
  if (!(cfg.lateration.gap_max_km >= 0.0)) throw ValidationError("--gap-max-km must be >= 0");
  return cfg;
}

void check_per_hop(double v) {
  if (!(v >= 0.0)) throw ValidationError("--per-hop-ms must be >= 0");
}

SimWorld make_world(const Options& o) {
  DelayParams delay;
  delay.propagation_speed_km_per_ms = o.speed;
  delay.per_hop_ms = o.per_hop_ms;
  delay.samples_per_probe = o.samples;
  if (o.noise_ms > 0.0) delay.exponential_mean_ms = o.noise_ms;
  if (o.noise_ms < 0.0) throw ValidationError("--noise-ms must be >= 0");
  validate(delay);
  return SimWorld{generate_topology(o.n_nodes, kEuropeBox, o.radius_km, o.seed), o.seed, delay};
}

int cmd_place(const Options& o, std::ostream& out) {
  if (o.k < 1) throw ValidationError("--k must be >= 1");
  const Topology t = read_topology(o.topology, o.nodes);
  LandmarkSet ls;
  if (o.algorithm == "dragoon") {
    ls = dragoon_place(t, o.k);
  } else if (o.algorithm == "two_approx") {
    ls = two_approx(t, o.k, place_orientation_mark(t));
  } else {
    throw ValidationError("--algorithm must be dragoon or two_approx");
  }
  const std::string json = dump(landmark_set_to_json(t, ls));
  emit(o.out, json, out);
  if (!o.out.empty()) {
    out << "algorithm=" << o.algorithm << " landmarks=" << ls.landmarks.size()
        << " max_hop=" << ls.objective.max_hop << " mean_hop=" << ls.objective.mean_hop() << "\n";
  }
  return kExitOk;
}

int cmd_fit(const Options& o, std::ostream& out) {
  check_per_hop(o.per_hop_ms);
  auto lin = open_input(o.landmarks);
  LandmarkFile lf = read_landmarks_json(lin);
  if (lf.positions.size() < lf.landmarks.size()) {
    if (o.topology.empty()) throw ValidationError("landmark file lacks positions; pass --topology");
    const Topology t = read_topology(o.topology, o.nodes);
    for (const auto& l : lf.landmarks) lf.positions.emplace(l, t.position(t.index_of(l)));
  }
  auto min = open_input(o.measurements);
  const MeasurementFile mf = read_measurements_csv(min);
  const auto models = calibrate_all(lf.landmarks, mf.measurements, lf.positions, o.per_hop_ms);
  emit(o.out, dump(models_to_json(models, lf.positions, o.per_hop_ms)), out);
  return kExitOk;
}

int cmd_locate(const Options& o, std::ostream& out) {
  const EstimationConfig cfg = estimation_config(o);
  auto min = open_input(o.models);
  const ModelFile models = read_models_json(min);
  const double per_hop = o.per_hop_ms >= 0.0 ? o.per_hop_ms : models.per_hop_ms;
  auto tin = open_input(o.measurements);
  const MeasurementFile mf = read_measurements_csv(tin);

  std::map<NodeId, std::vector<const Measurement*>> by_target;
  for (const auto& m : mf.measurements) by_target[m.target_id].push_back(&m);
  if (by_target.empty()) throw ValidationError("no target measurements");

  Json estimates = Json::array();
  Json features = Json::array();
  for (const auto& [target, meas] : by_target) {
    std::vector<LabeledCircle> circles;
    for (const Measurement* m : meas) {
      const auto model = models.models.find(m->landmark_id);
      const auto pos = models.positions.find(m->landmark_id);
      if (model == models.models.end() || pos == models.positions.end()) {
        throw ValidationError("no model with position for landmark \"" + m->landmark_id + "\"");
      }
      circles.push_back({m->landmark_id, build_circle(pos->second, model->second, *m, per_hop)});
    }
    if (circles.size() < 2) throw ValidationError("target \"" + target + "\": need >= 2 circles");
    const EstimatedLocation est = estimate_target(circles, cfg);
    Json row = estimate_to_json(target, est);
    if (auto truth = mf.truths.find(target); truth != mf.truths.end()) {
      row["true_lat"] = truth->second.lat;
      row["true_lon"] = truth->second.lon;
      row["error_km"] = orthodromic_distance(truth->second, est.point) / 1000.0;
    }
    estimates.push_back(std::move(row));
    for (auto f : estimate_to_geojson(est, circles)["features"]) {
      f["properties"]["target_id"] = target;
      features.push_back(std::move(f));
    }
  }
  emit(o.out, dump(Json{{"estimates", std::move(estimates)}}), out);
  if (!o.geojson.empty()) {
    write_file(o.geojson, dump(Json{{"type", "FeatureCollection"}, {"features", std::move(features)}}));
  }
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  if (o.k < 5) throw ValidationError("--k must be >= 5 for calibration");
  if (o.n_targets < 1) throw ValidationError("--n-targets must be >= 1");
  if (o.out.empty()) throw ValidationError("--out directory is required");
  const SimWorld w = make_world(o);
  const PlacementStrategy strategy = parse_strategy(o.algorithm);
  const auto landmarks = place_landmarks(w.topology, o.k, strategy, o.seed);

  std::error_code ec;
  std::filesystem::create_directories(o.out, ec);
  if (ec) throw IoError("cannot create directory \"" + o.out + "\": " + ec.message());
  const std::filesystem::path dir(o.out);

  write_file((dir / "world.json").string(), dump(world_to_json(w)));
  write_file((dir / "topology.json").string(), dump(topology_to_json(w.topology)));
  write_file((dir / "landmarks.json").string(),
             dump(landmark_set_to_json(w.topology, make_landmark_set(w.topology, landmarks))));

  std::ostringstream cal;
  write_measurements_csv(cal, calibration_mesh(w, landmarks, o.seed));
  write_file((dir / "calibration.csv").string(), cal.str());

  std::vector<Measurement> probes;
  std::map<NodeId, GeoPoint> truths;
  for (const auto& target : pick_targets(w.topology, o.n_targets, o.seed)) {
    truths.emplace(target, w.topology.position(w.topology.index_of(target)));
    const auto target_seed = derive_seed(derive_seed(o.seed, "target"), target);
    for (const auto& l : landmarks) {
      probes.push_back(simulate_measurement(w, Endpoint::node(l), Endpoint::node(target), derive_seed(target_seed, l)));
    }
  }
  std::ostringstream tgt;
  write_measurements_csv(tgt, probes, truths);
  write_file((dir / "targets.csv").string(), tgt.str());

  out << "world seed=" << o.seed << " nodes=" << w.topology.size() << " edges=" << w.topology.edge_count()
      << " landmarks=" << landmarks.size() << " targets=" << truths.size() << " -> " << o.out << "\n";
  return kExitOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  if (o.n_targets < 1) throw ValidationError("--n-targets must be >= 1");
  if (o.k < 5) throw ValidationError("--k must be >= 5 for calibration");
  check_per_hop(o.per_hop_ms);
  const SimWorld w = make_world(o);

  std::vector<PlacementStrategy> strategies;
  std::stringstream ss(o.algorithm);
  for (std::string name; std::getline(ss, name, ',');) strategies.push_back(parse_strategy(name));
  if (strategies.empty()) throw ValidationError("--algorithm lists no strategy");

  std::vector<ExperimentReport> reports;
  Json jr = Json::array();
  for (auto s : strategies) {
    ExperimentConfig cfg;
    cfg.k = o.k;
    cfg.strategy = s;
    cfg.n_targets = o.n_targets;
    cfg.seed = o.seed;
    cfg.per_hop_ms = o.per_hop_ms;
    cfg.estimation = estimation_config(o);
    reports.push_back(run_experiment(w, cfg));
    jr.push_back(report_to_json(reports.back()));
  }
  emit(o.out, dump(Json{{"world", Json{{"seed", w.seed}, {"nodes", w.topology.size()}, {"edges", w.topology.edge_count()}}},
                        {"reports", std::move(jr)}}),
       out);
  if (!o.csv.empty()) {
    std::ostringstream csv;
    write_report_csv(csv, reports);
    write_file(o.csv, csv.str());
  }
  if (!o.out.empty()) {
    for (const auto& r : reports) {
      out << r.method << ": located=" << r.summary.located << " failed=" << r.summary.failed
          << " median_km=" << r.summary.median_km << " mean_km=" << r.summary.mean_km
          << " p90_km=" << r.summary.p90_km << "\n";
    }
  }
  return kExitOk;
}

void add_estimation_flags(CLI::App* sub, Options& o) {
  sub->add_option("--eps0-m", o.eps0_m, "initial grid spacing in meters");
  sub->add_option("--eps-min-m", o.eps_min_m, "final grid spacing in meters");
  sub->add_option("--gap-max-km", o.gap_max_km, "drop non-overlapping circle pairs with a larger gap");
  sub->add_option("--filter-rounds", o.filter_rounds, "outlier filter rounds");
  sub->add_option("--drop-fraction", o.drop_fraction, "fraction of points dropped per filter round");
}

void add_world_flags(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed, "world and experiment seed");
  sub->add_option("--n-nodes", o.n_nodes, "topology size");
  sub->add_option("--radius-km", o.radius_km, "connection radius of the generated topology");
  sub->add_option("--k", o.k, "number of landmarks");
  sub->add_option("--n-targets", o.n_targets, "number of targets");
  sub->add_option("--noise-ms", o.noise_ms, "mean exponential queuing delay, 0 for none");
  sub->add_option("--samples", o.samples, "RTT samples per probe");
  sub->add_option("--speed-km-per-ms", o.speed, "propagation speed");
  sub->add_option("--per-hop-ms", o.per_hop_ms, "per-hop processing delay");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Latency-based IP geolocation toolkit", "geoloc"};
  app.require_subcommand(1);
  Options o;

  auto* place = app.add_subcommand("place", "place landmarks on a topology");
  place->add_option("--topology", o.topology, "topology JSON, or edge list with --nodes")->required();
  place->add_option("--nodes", o.nodes, "node sidecar file for an edge-list topology");
  place->add_option("--k", o.k, "number of landmarks")->required();
  place->add_option("--algorithm", o.algorithm, "dragoon | two_approx");
  place->add_option("--out", o.out, "landmark JSON output (default stdout)");

  auto* fit = app.add_subcommand("fit", "fit per-landmark latency models");
  fit->add_option("--measurements", o.measurements, "inter-landmark measurement CSV")->required();
  fit->add_option("--landmarks", o.landmarks, "landmark JSON")->required();
  fit->add_option("--topology", o.topology, "topology supplying landmark positions");
  fit->add_option("--nodes", o.nodes, "node sidecar file for an edge-list topology");
  fit->add_option("--per-hop-ms", o.per_hop_ms, "per-hop delay correction");
  fit->add_option("--out", o.out, "model JSON output (default stdout)");

  auto* locate = app.add_subcommand("locate", "estimate target locations");
  double locate_per_hop = -1.0;
  locate->add_option("--models", o.models, "model JSON")->required();
  locate->add_option("--measurements", o.measurements, "target measurement CSV")->required();
  locate->add_option("--per-hop-ms", locate_per_hop, "per-hop delay correction (default: value in model file)");
  locate->add_option("--out", o.out, "estimate JSON output (default stdout)");
  locate->add_option("--geojson", o.geojson, "GeoJSON output");
  add_estimation_flags(locate, o);

  auto* simulate = app.add_subcommand("simulate", "generate a synthetic world and measurement files");
  add_world_flags(simulate, o);
  simulate->add_option("--algorithm", o.algorithm, "landmark placement strategy");
  simulate->add_option("--out", o.out, "output directory")->required();

  auto* eval = app.add_subcommand("eval", "run seeded localization experiments");
  add_world_flags(eval, o);
  eval->add_option("--algorithm", o.algorithm, "comma-separated strategies");
  eval->add_option("--out", o.out, "report JSON output (default stdout)");
  eval->add_option("--csv", o.csv, "per-target CSV output");
  add_estimation_flags(eval, o);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (*place) return cmd_place(o, out);
    if (*fit) return cmd_fit(o, out);
    if (*locate) {
      o.per_hop_ms = locate_per_hop;
      if (o.per_hop_ms < 0.0 && locate->count("--per-hop-ms") > 0) throw ValidationError("--per-hop-ms must be >= 0");
      return cmd_locate(o, out);
    }
    if (*simulate) return cmd_simulate(o, out);
    if (*eval) return cmd_eval(o, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace geoloc::cli
