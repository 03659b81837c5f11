#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "geoloc/error.hpp"
#include "geoloc/placement.hpp"
#include "oracles.hpp"

using namespace geoloc;

namespace {

Topology path(std::initializer_list<const char*> ids) {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  double lon = 0;
  const char* prev = nullptr;
  for (const char* id : ids) {
    nodes.push_back({id, {50, lon}});
    lon += 1;
    if (prev) edges.emplace_back(prev, id);
    prev = id;
  }
  return Topology::build(nodes, edges);
}

Topology star(int leaves) {
  std::vector<Node> nodes{{"hub", {0, 0}}};
  std::vector<Edge> edges;
  for (int i = 0; i < leaves; ++i) {
    const std::string id = "leaf" + std::to_string(i);
    nodes.push_back({id, {1, static_cast<double>(i)}});
    edges.emplace_back("hub", id);
  }
  return Topology::build(nodes, edges);
}

void check_consistent(const Topology& t, const LandmarkSet& ls, std::size_t k) {
  CHECK(ls.landmarks.size() == k);
  CHECK(std::set<NodeId>(ls.landmarks.begin(), ls.landmarks.end()).size() == k);
  CHECK(ls.assignment == assign_to_closest(t, ls.landmarks));
  // Objective recomputed here from the assignment map.
  const auto fw = oracle::floyd_warshall(t);
  int worst = 0;
  long long total = 0;
  for (const auto& [node, lm] : ls.assignment) {
    const int h = fw[*t.find(node)][*t.find(lm)];
    worst = std::max(worst, h);
    total += h;
  }
  CHECK(ls.objective.max_hop == worst);
  CHECK(ls.objective.total_hop == total);
}

}  // namespace

TEST_CASE("place_orientation_mark") {
  CHECK(place_orientation_mark(path({"a", "b", "c"})) == "b");
  CHECK(place_orientation_mark(Topology::build({{"solo", {0, 0}}}, {})) == "solo");
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto t = oracle::build(oracle::random_connected_graph(10, 0.0, seed));
    CHECK(place_orientation_mark(t) == t.id(oracle::brute_force_one_center(oracle::floyd_warshall(t))));
  }
}

TEST_CASE("two_approx") {
  const auto p = path({"a", "b", "c", "d", "e"});
  SUBCASE("path, seed c, k=2") {
    const auto ls = two_approx(p, 2, "c");
    CHECK(ls.landmarks == std::vector<NodeId>{"a", "e"});
    check_consistent(p, ls, 2);
  }
  SUBCASE("k = |V|") {
    const auto ls = two_approx(p, 5, "c");
    CHECK(ls.objective.max_hop == 0);
    check_consistent(p, ls, 5);
  }
  SUBCASE("bad k") {
    CHECK_THROWS_AS(two_approx(p, 0, "c"), ValidationError);
    CHECK_THROWS_AS(two_approx(p, 6, "c"), ValidationError);
    CHECK_THROWS_AS(two_approx(p, 2, "zz"), ValidationError);
  }
  SUBCASE("within twice the optimum") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      const std::size_t n = 5 + seed % 11;
      const auto t = oracle::build(oracle::random_connected_graph(n, 0.1, seed));
      const auto fw = oracle::floyd_warshall(t);
      for (std::size_t k = 1; k <= 3; ++k) {
        const auto ls = two_approx(t, k, place_orientation_mark(t));
        check_consistent(t, ls, k);
        CHECK(ls.objective.max_hop <= 2 * oracle::brute_force_k_center(fw, k));
      }
    }
  }
}

TEST_CASE("refine") {
  SUBCASE("star: leaf moves to hub") {
    const auto t = star(5);
    std::vector<RefineMove> moves;
    const auto out = refine(t, make_landmark_set(t, {"leaf3"}), [&](const RefineMove& m) { moves.push_back(m); });
    CHECK(out.landmarks == std::vector<NodeId>{"hub"});
    CHECK(out.objective.max_hop == 1);
    REQUIRE(moves.size() == 1);
    CHECK(moves[0].from == "leaf3");
    CHECK(moves[0].to == "hub");
    CHECK(moves[0].after < moves[0].before);
  }
  SUBCASE("optimal set is a fixpoint") {
    const auto t = star(5);
    const auto start = make_landmark_set(t, {"hub"});
    int calls = 0;
    const auto out = refine(t, start, [&](const RefineMove&) { ++calls; });
    CHECK(calls == 0);
    CHECK(out.landmarks == start.landmarks);
    CHECK(out.objective == start.objective);
  }
  SUBCASE("landmarks never collide") {
    // b is the only improving target for both landmarks.
    const auto t = path({"a", "b", "c"});
    const auto out = refine(t, make_landmark_set(t, {"a", "b"}));
    check_consistent(t, out, 2);
  }
  SUBCASE("monotone and no worse than the initialization on random graphs") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
      const auto t = oracle::build(oracle::random_connected_graph(12, 0.1, seed));
      const auto fw = oracle::floyd_warshall(t);
      const auto init = two_approx(t, 2, place_orientation_mark(t));
      PlacementObjective last = init.objective;
      const auto out = refine(t, init, [&](const RefineMove& m) {
        CHECK(m.before == last);
        CHECK(m.after < m.before);
        last = m.after;
      });
      check_consistent(t, out, 2);
      CHECK(out.objective <= init.objective);
      CHECK(out.objective == last);
      CHECK(out.objective.max_hop <= 2 * oracle::brute_force_k_center(fw, 2));
    }
  }
}

TEST_CASE("dragoon_place") {
  const auto p = path({"a", "b", "c"});
  CHECK(dragoon_place(p, 1).landmarks == std::vector<NodeId>{"b"});

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto g = oracle::random_connected_graph(15, 0.08, seed);
    const auto t = oracle::build(g);
    const auto fw = oracle::floyd_warshall(t);
    const auto mark = place_orientation_mark(t);
    for (std::size_t k = 1; k <= 3; ++k) {
      const auto ls = dragoon_place(t, k);
      check_consistent(t, ls, k);
      CHECK(ls.objective.max_hop <= 2 * oracle::brute_force_k_center(fw, k));
      CHECK(ls.objective.max_hop <= two_approx(t, k, mark).objective.max_hop);

      const auto again = dragoon_place(t, k);
      CHECK(again.landmarks == ls.landmarks);

      std::mt19937_64 rng(seed * 31 + k);
      std::shuffle(g.nodes.begin(), g.nodes.end(), rng);
      std::shuffle(g.edges.begin(), g.edges.end(), rng);
      const auto permuted = dragoon_place(oracle::build(g), k);
      CHECK(permuted.landmarks == ls.landmarks);
      CHECK(permuted.objective == ls.objective);
    }
  }
}

TEST_CASE("make_landmark_set rejects duplicates") {
  const auto p = path({"a", "b", "c"});
  CHECK_THROWS_AS(make_landmark_set(p, {"a", "a"}), ValidationError);
  CHECK_THROWS_AS(make_landmark_set(p, {"q"}), ValidationError);
}
