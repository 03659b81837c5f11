#include <doctest.h>

#include <sstream>

#include "geoloc/error.hpp"
#include "geoloc/io.hpp"

using namespace geoloc;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("topology JSON and edge list round trip") {
  const auto t = generate_topology(30, kEuropeBox, 500, 2);
  std::istringstream json(dump(topology_to_json(t)));
  const auto back = load_topology_json(json);
  CHECK(back.edges() == t.edges());
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(back.position(i) == t.position(i));

  std::ostringstream edges, nodes;
  write_topology_edge_list(t, edges, nodes);
  std::istringstream ei(edges.str()), ni(nodes.str());
  const auto back2 = load_topology_edge_list(ei, ni);
  CHECK(back2.edges() == t.edges());
  for (std::size_t i = 0; i < t.size(); ++i) CHECK(back2.position(i) == t.position(i));
}

TEST_CASE("landmark JSON round trip") {
  const auto t = generate_topology(30, kEuropeBox, 500, 2);
  const auto ls = dragoon_place(t, 4);
  const auto j = landmark_set_to_json(t, ls);
  CHECK(j["objective"]["max_hop"] == ls.objective.max_hop);
  std::istringstream in(dump(j));
  const auto f = read_landmarks_json(in);
  CHECK(f.landmarks == ls.landmarks);
  CHECK(f.positions.size() == 4);
}

TEST_CASE("models JSON round trip is exact") {
  std::map<NodeId, LatencyModel> models{{"a", {123.456789012345, 0.0123, 1.0, -7.25, 3.5, 9}},
                                        {"b", {1e-3, 1e3, 1.0, 1.0 / 3.0, 0, 4}}};
  std::map<NodeId, GeoPoint> pos{{"a", {48.1, 11.6}}, {"b", {-33.9, 151.2}}};
  std::istringstream in(dump(models_to_json(models, pos, 0.15)));
  const auto f = read_models_json(in);
  CHECK(f.per_hop_ms == 0.15);
  CHECK(f.models.at("a").p == models.at("a").p);
  CHECK(f.models.at("b").m == models.at("b").m);
  CHECK(f.models.at("a").sample_count == 9);
  CHECK(f.positions.at("b") == pos.at("b"));
}

TEST_CASE("measurement CSV") {
  SUBCASE("round trip with truths") {
    const std::vector<Measurement> ms{{"l1", "t1", {10.123456789, 11.5}, 3}, {"l2", "t1", {0.1 + 0.2}, 0}};
    std::ostringstream out;
    write_measurements_csv(out, ms, {{"t1", {45.5, -3.25}}});
    std::istringstream in(out.str());
    const auto f = read_measurements_csv(in);
    REQUIRE(f.measurements.size() == 2);
    CHECK(f.measurements[0].rtt_samples_ms == ms[0].rtt_samples_ms);
    CHECK(f.measurements[1].rtt_samples_ms[0] == 0.1 + 0.2);
    CHECK(f.measurements[0].hop_count == 3);
    CHECK(f.truths.at("t1") == GeoPoint{45.5, -3.25});
  }
  SUBCASE("malformed rows name the line") {
    const char* bad[] = {
        "landmark_id,target_id,hops,rtt_ms\na,b,1,2.0\na,b,x,2.0\n",
        "a,b,1,2.0\n\na,b,1\n",
        "a,b,1,2.0\na,b,1,-4\n",
        "a,b,1,2.0\na,b,1,abc\n",
    };
    const char* line[] = {"line 3", "line 3", "line 2", "line 2"};
    for (int i = 0; i < 4; ++i) {
      std::istringstream in(bad[i]);
      const auto msg = error_of([&] { read_measurements_csv(in); });
      CAPTURE(bad[i]);
      CHECK(msg.find(line[i]) != std::string::npos);
    }
  }
}

TEST_CASE("estimate JSON and GeoJSON") {
  const std::vector<LabeledCircle> circles{{"a", {{50, 2}, 600'000}}, {"b", {{44, 12}, 700'000}},
                                           {"c", {{51, 14}, 600'000}}};
  const auto est = estimate_target(circles);
  const auto j = estimate_to_json("t", est);
  CHECK(j["target_id"] == "t");
  CHECK(j["kept"].size() == est.kept_points.size());

  const auto g = estimate_to_geojson(est, circles);
  CHECK(g["type"] == "FeatureCollection");
  std::map<std::string, int> roles;
  for (const auto& f : g["features"]) roles[f["properties"]["role"].get<std::string>()]++;
  CHECK(roles["estimate"] == 1);
  CHECK(roles["circle"] == 3);
  CHECK(roles["kept"] == static_cast<int>(est.kept_points.size()));
  CHECK(roles["dropped"] == static_cast<int>(est.dropped_points.size()));
  // GeoJSON coordinates are [lon, lat].
  CHECK(g["features"][0]["geometry"]["coordinates"][0] == est.point.lon);
}
