#include <doctest.h>

#include <cmath>

#include "geoloc/error.hpp"
#include "geoloc/simulator.hpp"

using namespace geoloc;

namespace {

// Two nodes exactly 1000 km apart along a meridian.
Topology thousand_km() {
  const GeoPoint a{40, 10};
  return Topology::build({{"a", a}, {"b", destination_point(a, 0, 1'000'000)}}, {{"a", "b"}});
}

}  // namespace

TEST_CASE("generate_topology") {
  const auto one = generate_topology(1, kEuropeBox, 400, 3);
  CHECK(one.size() == 1);
  CHECK(one.edge_count() == 0);

  const auto t1 = generate_topology(100, kEuropeBox, 400, 42);
  const auto t2 = generate_topology(100, kEuropeBox, 400, 42);
  CHECK(t1.size() == 100);
  CHECK(t1.edges() == t2.edges());
  for (std::size_t i = 0; i < t1.size(); ++i) {
    CHECK(t1.position(i) == t2.position(i));
    CHECK(t1.position(i).lat >= kEuropeBox.lat_min);
    CHECK(t1.position(i).lat <= kEuropeBox.lat_max);
  }
  const double mean_degree = 2.0 * static_cast<double>(t1.edge_count()) / static_cast<double>(t1.size());
  MESSAGE("mean degree n=100 r=400km seed=42: " << mean_degree);
  CHECK(mean_degree > 2.0);
  CHECK(generate_topology(100, kEuropeBox, 400, 43).edges() != t1.edges());
}

TEST_CASE("simulate_measurement closed form") {
  const SimWorld w{thousand_km(), 1, DelayParams{}};
  const auto m = simulate_measurement(w, Endpoint::node("a"), Endpoint::node("b"));
  CHECK(m.hop_count == 1);
  REQUIRE(m.rtt_samples_ms.size() == 10);
  for (double r : m.rtt_samples_ms) CHECK(std::abs(r - 10.2) <= 1e-9);

  const auto self = simulate_measurement(w, Endpoint::node("a"), Endpoint::node("a"));
  CHECK(self.hop_count == 0);
  for (double r : self.rtt_samples_ms) CHECK(r == 0.0);
}

TEST_CASE("simulate_measurement with exponential noise") {
  DelayParams d;
  d.exponential_mean_ms = 2.0;
  const SimWorld w{thousand_km(), 7, d};
  const double floor = 2 * deterministic_delay_ms(w, shortest_path(w, Endpoint::node("a"), Endpoint::node("b")));
  CHECK(floor == doctest::Approx(10.2));

  double acc = 0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto m = simulate_measurement(w, Endpoint::node("a"), Endpoint::node("b"), s);
    for (double r : m.rtt_samples_ms) CHECK(r >= floor);
    acc += min_rtt_ms(m) - floor;
  }
  // Minimum of ten exponential(2) draws has mean 0.2; the RTT doubles it.
  const double mean = acc / 1000;
  MESSAGE("mean excess of min RTT: " << mean);
  CHECK(std::abs(mean - 0.4) <= 0.2 * 0.4);

  const auto self = simulate_measurement(w, Endpoint::node("a"), Endpoint::node("a"), 3);
  CHECK(self.hop_count == 0);
  for (double r : self.rtt_samples_ms) CHECK(r > 0);
}

TEST_CASE("more samples never raise the minimum") {
  DelayParams d;
  d.exponential_mean_ms = 2.0;
  double prev = 1e300;
  for (int n = 1; n <= 20; ++n) {
    d.samples_per_probe = n;
    const SimWorld w{thousand_km(), 7, d};
    const double v = min_rtt_ms(simulate_measurement(w, Endpoint::node("a"), Endpoint::node("b"), 99));
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("hop counts agree with BFS and off-graph endpoints add a hop") {
  const SimWorld w{generate_topology(60, kEuropeBox, 400, 9), 9, DelayParams{}};
  const auto& t = w.topology;
  const auto hops = all_pairs_hops(t);
  for (std::size_t i = 0; i < t.size(); i += 7) {
    for (std::size_t j = 0; j < t.size(); j += 5) {
      const auto m = simulate_measurement(w, Endpoint::node(t.id(i)), Endpoint::node(t.id(j)));
      CHECK(m.hop_count == hops(i, j));
    }
  }
  const GeoPoint off = destination_point(t.position(3), 45, 20'000);
  const auto m = simulate_measurement(w, Endpoint::node(t.id(0)), Endpoint::point("host", off));
  CHECK(m.hop_count >= 1);
  CHECK_THROWS_AS(simulate_measurement(w, Endpoint::node("nope"), Endpoint::node(t.id(0))), ValidationError);
}

TEST_CASE("DelayParams validation") {
  DelayParams d;
  d.propagation_speed_km_per_ms = 0;
  CHECK_THROWS_AS(validate(d), ValidationError);
  d = {};
  d.samples_per_probe = 0;
  CHECK_THROWS_AS(validate(d), ValidationError);
  d = {};
  d.per_hop_ms = -1;
  CHECK_THROWS_AS(validate(d), ValidationError);
}

TEST_CASE("run_experiment") {
  DelayParams d;
  d.exponential_mean_ms = 2.0;
  const SimWorld w{generate_topology(80, kEuropeBox, 400, 4), 4, d};
  ExperimentConfig cfg;
  cfg.n_targets = 10;
  cfg.seed = 4;

  const auto a = run_experiment(w, cfg);
  const auto b = run_experiment(w, cfg);
  REQUIRE(a.targets.size() == 10);
  CHECK(a.landmarks == b.landmarks);
  for (std::size_t i = 0; i < a.targets.size(); ++i) {
    CHECK(a.targets[i].target == b.targets[i].target);
    CHECK(a.targets[i].estimate == b.targets[i].estimate);
  }
  CHECK(a.summary.median_km == b.summary.median_km);
  CHECK(a.summary.located + a.summary.failed == 10);

  cfg.strategy = PlacementStrategy::kShortestPing;
  const auto sp = run_experiment(w, cfg);
  for (std::size_t i = 0; i < sp.targets.size(); ++i) {
    CHECK(sp.targets[i].target == a.targets[i].target);
    REQUIRE(sp.targets[i].estimate);
    const bool at_landmark = std::any_of(sp.landmarks.begin(), sp.landmarks.end(), [&](const NodeId& l) {
      return w.topology.position(w.topology.index_of(l)) == *sp.targets[i].estimate;
    });
    CHECK(at_landmark);
  }

  cfg.k = 4;
  CHECK_THROWS_AS(run_experiment(w, cfg), ValidationError);
  cfg.k = 10;
  cfg.n_targets = 0;
  CHECK_THROWS_AS(run_experiment(w, cfg), ValidationError);
}

TEST_CASE("summarize") {
  std::vector<TargetResult> r(10);
  for (int i = 0; i < 10; ++i) {
    r[i].estimate = GeoPoint{};
    r[i].error_km = i + 1;
  }
  r.push_back({"x", {}, std::nullopt, NAN, 0, "failed"});
  const auto s = summarize(r);
  CHECK(s.located == 10);
  CHECK(s.failed == 1);
  CHECK(s.median_km == doctest::Approx(5.5));
  CHECK(s.mean_km == doctest::Approx(5.5));
  CHECK(s.p90_km == 9);
}

TEST_CASE("strategy names round trip") {
  for (auto s : {PlacementStrategy::kDragoon, PlacementStrategy::kTwoApprox, PlacementStrategy::kRandom,
                 PlacementStrategy::kShortestPing}) {
    CHECK(parse_strategy(to_string(s)) == s);
  }
  CHECK_THROWS_AS(parse_strategy("best"), ValidationError);
}
