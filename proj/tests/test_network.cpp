#include <doctest.h>

#include <random>
#include <set>

#include "mapmatch/errors.hpp"
#include "mapmatch/eval.hpp"
#include "mapmatch/network.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace mapmatch;

namespace {

const char* kTinyNetwork = R"({
  "nodes": [
    {"id": 1, "lat": 50.0, "lon": 14.0},
    {"id": 2, "lat": 50.0, "lon": 14.001}
  ],
  "edges": [
    {"id": 10, "from": 1, "to": 2,
     "geometry": [[50.0, 14.0], [50.0, 14.001]]}
  ]
})";

}  // namespace

TEST_CASE("load_network reads the two-node fixture") {
  testutil::TempDir tmp;
  testutil::write_file(tmp.file("net.json"), kTinyNetwork);
  const RoadNetwork net = load_network(tmp.file("net.json"));
  CHECK(net.node_count() == 2);
  CHECK(net.edge_count() == 1);
  CHECK(net.edge(10).from == 1);
  CHECK(net.edge(10).to == 2);
  // ~71.5 m for 0.001 degrees of longitude at lat 50.
  CHECK(net.edge(10).length == doctest::Approx(71.47).epsilon(1e-2));
}

TEST_CASE("load_network names the edge with a dangling endpoint") {
  testutil::TempDir tmp;
  testutil::write_file(tmp.file("net.json"), R"({
    "nodes": [{"id": 1, "lat": 50.0, "lon": 14.0}],
    "edges": [{"id": 7, "from": 1, "to": 99,
               "geometry": [[50.0, 14.0], [50.0, 14.001]]}]
  })");
  CHECK_THROWS_WITH_AS(load_network(tmp.file("net.json")),
                       doctest::Contains("edge 7"), ValidationError);
}

TEST_CASE("load_network rejects zero-length edges") {
  testutil::TempDir tmp;
  testutil::write_file(tmp.file("net.json"), R"({
    "nodes": [{"id": 1, "lat": 50.0, "lon": 14.0}],
    "edges": [{"id": 3, "from": 1, "to": 1,
               "geometry": [[50.0, 14.0], [50.0, 14.0]]}]
  })");
  CHECK_THROWS_WITH_AS(load_network(tmp.file("net.json")),
                       doctest::Contains("edge 3"), ValidationError);
}

TEST_CASE("load_network rejects malformed files") {
  testutil::TempDir tmp;
  testutil::write_file(tmp.file("net.json"), "{not json");
  CHECK_THROWS_AS(load_network(tmp.file("net.json")), ParseError);
  CHECK_THROWS_AS(load_network(tmp.file("missing.json")), ParseError);
}

TEST_CASE("grid network round-trips through save/load") {
  testutil::TempDir tmp;
  const RoadNetwork net = eval::generate_grid(10, 10, 100.0);
  save_network(net, tmp.file("grid.json"));
  const RoadNetwork back = load_network(tmp.file("grid.json"));
  REQUIRE(back.node_count() == net.node_count());
  REQUIRE(back.edge_count() == net.edge_count());
  for (const Node& n : net.nodes()) {
    CHECK(plane_dist(back.node(n.id).pos, n.pos) < 1e-6);
  }
  for (const Edge& e : net.edges()) {
    const Edge& b = back.edge(e.id);
    CHECK(b.from == e.from);
    CHECK(b.to == e.to);
    CHECK(b.length == doctest::Approx(e.length).epsilon(1e-9));
  }
}

TEST_CASE("edges_within basics") {
  const RoadNetwork net = eval::generate_grid(3, 3, 100.0);
  // Point on the edge between nodes 0 and 1.
  const PlanePoint q{50.0, 0.0};
  const auto hits = net.edges_within(q, 1.0);
  bool found = false;
  for (EdgeId id : hits) {
    const Edge& e = net.edge(id);
    if ((e.from == 0 && e.to == 1) || (e.from == 1 && e.to == 0)) found = true;
  }
  CHECK(found);
  CHECK(net.edges_within({5000.0, 5000.0}, 10.0).empty());
}

TEST_CASE("edges_within equals the linear scan on random queries") {
  const RoadNetwork net = eval::generate_grid(10, 10, 100.0);
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> pos(-150.0, 1050.0);
  std::uniform_real_distribution<double> rad(5.0, 300.0);
  for (int it = 0; it < 100; ++it) {
    const PlanePoint q{pos(rng), pos(rng)};
    const double r = rad(rng);
    auto got = net.edges_within(q, r);
    auto want = oracles::linear_edges_within(net, q, r);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    CHECK(got == want);
  }
}

TEST_CASE("edges_within with infinite radius returns every edge") {
  const RoadNetwork net = eval::generate_grid(4, 4, 100.0);
  const auto all = net.edges_within(
      {200.0, 200.0}, std::numeric_limits<double>::infinity());
  CHECK(all.size() == net.edge_count());
}

TEST_CASE("out_edges") {
  const RoadNetwork net = eval::generate_grid(3, 3, 100.0);
  // Corner node 0 has 2 outgoing, center node 4 has 4.
  CHECK(net.out_edges(0).size() == 2);
  CHECK(net.out_edges(4).size() == 4);
  CHECK_THROWS_AS(net.out_edges(999), ValidationError);

  // Union over all nodes covers every edge exactly once.
  std::multiset<EdgeId> seen;
  for (const Node& n : net.nodes()) {
    for (EdgeId id : net.out_edges(n.id)) seen.insert(id);
  }
  CHECK(seen.size() == net.edge_count());
  for (const Edge& e : net.edges()) CHECK(seen.count(e.id) == 1);
}
