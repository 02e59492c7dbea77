#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mapmatch/eval.hpp"
#include "mapmatch/network.hpp"
#include "mapmatch/trace.hpp"
#include "test_util.hpp"

using namespace mapmatch;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(MAPMATCH_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli synth + match: gsmm recovers the ground truth, exit 0") {
  testutil::TempDir tmp;
  const std::string scen = (tmp.path() / "scen").string();
  REQUIRE(run_cli("synth --rows 8 --cols 8 --route-len 12 --noise 0 "
                  "--period 1 --seed 5 --out-dir " + scen) == 0);

  const std::string out = (tmp.path() / "match.json").string();
  CHECK(run_cli("match " + scen + "/network.json " + scen +
                "/trace.json --algorithm gsmm --out " + out) == 0);

  const auto got = nlohmann::json::parse(slurp(out)).get<std::vector<EdgeId>>();
  const auto want = load_ground_truth(scen + "/ground_truth.json");
  CHECK(got == want);
  // The companion geometry file exists and is valid GeoJSON.
  const auto geo = nlohmann::json::parse(slurp(tmp.path() / "match.geojson"));
  CHECK(geo.at("type") == "FeatureCollection");
  CHECK(geo.at("features").size() == got.size());
}

TEST_CASE("cli synth is deterministic by seed") {
  testutil::TempDir tmp;
  const std::string a = (tmp.path() / "a").string();
  const std::string b = (tmp.path() / "b").string();
  REQUIRE(run_cli("synth --seed 42 --out-dir " + a) == 0);
  REQUIRE(run_cli("synth --seed 42 --out-dir " + b) == 0);
  CHECK(slurp(a + "/trace.json") == slurp(b + "/trace.json"));
  CHECK(slurp(a + "/network.json") == slurp(b + "/network.json"));
  CHECK(slurp(a + "/ground_truth.json") == slurp(b + "/ground_truth.json"));
  // Files round-trip through the loaders.
  CHECK(load_network(a + "/network.json").edge_count() == 360);
  CHECK(load_ground_truth(a + "/ground_truth.json").size() == 20);
  load_trace(a + "/trace.json");
}

TEST_CASE("cli match: missing file exits 2") {
  testutil::TempDir tmp;
  CHECK(run_cli("match /nonexistent/net.json /nonexistent/tr.json --out " +
                (tmp.path() / "o.json").string()) == 2);
}

TEST_CASE("cli match: unknown algorithm exits 2") {
  testutil::TempDir tmp;
  const std::string scen = (tmp.path() / "scen").string();
  REQUIRE(run_cli("synth --rows 4 --cols 4 --route-len 4 --out-dir " + scen) ==
          0);
  CHECK(run_cli("match " + scen + "/network.json " + scen +
                "/trace.json --algorithm nope --out " +
                (tmp.path() / "o.json").string()) == 2);
}

TEST_CASE("cli match: incremental failure exits 1") {
  testutil::TempDir tmp;
  const std::string scen = (tmp.path() / "scen").string();
  REQUIRE(run_cli("synth --rows 6 --cols 6 --route-len 6 --noise 0 "
                  "--period 1 --seed 2 --out-dir " + scen) == 0);
  // Rewrite the trace: walk off the network for 12 measurements.
  const Trace tr = load_trace(scen + "/trace.json");
  std::vector<Measurement> ms(tr.measurements().begin(),
                              tr.measurements().end());
  const RoadNetwork net = load_network(scen + "/network.json");
  double t = ms.back().time;
  for (int i = 1; i <= 12; ++i) {
    ms.push_back({from_local({-2000.0 - 100.0 * i, -2000.0}, net.origin()),
                  t + i});
  }
  save_trace(Trace(ms), scen + "/trace.json");
  CHECK(run_cli("match " + scen + "/network.json " + scen +
                "/trace.json --algorithm incremental --out " +
                (tmp.path() / "o.json").string()) == 1);
}

TEST_CASE("cli benchmark: row counts and determinism") {
  testutil::TempDir tmp;
  const std::string data = (tmp.path() / "data").string();
  for (int i = 0; i < 3; ++i) {
    REQUIRE(run_cli("synth --rows 8 --cols 8 --route-len 10 --noise 10 "
                    "--period 1 --seed " + std::to_string(100 + i) +
                    " --out-dir " + data + "/scn_" + std::to_string(i)) == 0);
  }
  const std::string out1 = (tmp.path() / "out1").string();
  const std::string out2 = (tmp.path() / "out2").string();
  REQUIRE(run_cli("benchmark " + data +
                  " --periods 5 30 --algorithms gsmm hmm --seed 1 "
                  "--out-dir " + out1) == 0);
  REQUIRE(run_cli("benchmark " + data +
                  " --periods 5 30 --algorithms gsmm hmm --seed 1 "
                  "--out-dir " + out2 + " --jobs 2") == 0);

  std::ifstream rows(out1 + "/benchmark_rows.csv");
  std::string line;
  std::getline(rows, line);  // header
  int count = 0;
  std::vector<std::string> rmf_cols_1;
  while (std::getline(rows, line)) {
    if (line.empty()) continue;
    ++count;
    std::stringstream ss(line);
    std::string field;
    for (int f = 0; f <= 3; ++f) std::getline(ss, field, ',');
    rmf_cols_1.push_back(field);
  }
  CHECK(count == 3 * 2 * 2);

  std::ifstream rows2(out2 + "/benchmark_rows.csv");
  std::getline(rows2, line);
  std::vector<std::string> rmf_cols_2;
  while (std::getline(rows2, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    for (int f = 0; f <= 3; ++f) std::getline(ss, field, ',');
    rmf_cols_2.push_back(field);
  }
  CHECK(rmf_cols_1 == rmf_cols_2);
}

TEST_CASE("cli benchmark: malformed dataset layout exits 2") {
  testutil::TempDir tmp;
  const std::string data = (tmp.path() / "data").string();
  std::filesystem::create_directories(data + "/broken");
  testutil::write_file(data + "/broken/network.json", "{}");
  CHECK(run_cli("benchmark " + data) == 2);
}

TEST_CASE("cli convert: csv traces") {
  testutil::TempDir tmp;
  testutil::write_file(tmp.file("in.csv"),
                       "lat,lon,time\n"
                       "50.0,14.0,0\n"
                       "50.0,14.001,10\n"
                       "50.0,14.002,20\n");
  const std::string out = (tmp.path() / "conv").string();
  REQUIRE(run_cli("convert " + tmp.file("in.csv").string() +
                  " --format csv --out-dir " + out) == 0);
  const Trace tr = load_trace(out + "/trace.json");
  CHECK(tr.size() == 3);
  CHECK(tr.back().time == 20.0);

  testutil::write_file(tmp.file("bad.csv"),
                       "lat,lon,time\n50.0,14.0,0\nnot,a,row\n");
  CHECK(run_cli("convert " + tmp.file("bad.csv").string() +
                " --format csv --out-dir " + out) == 2);
}

TEST_CASE("cli convert: zenodo-style osm + gpx directory") {
  testutil::TempDir tmp;
  const std::string in = (tmp.path() / "raw").string();
  std::filesystem::create_directories(in);
  testutil::write_file(
      in + "/map.osm",
      R"(<?xml version="1.0"?>
<osm>
 <node id="1" lat="50.0" lon="14.0"/>
 <node id="2" lat="50.0" lon="14.002"/>
 <node id="3" lat="50.0" lon="14.004"/>
 <node id="4" lat="50.002" lon="14.002"/>
 <way id="100">
  <nd ref="1"/><nd ref="2"/><nd ref="3"/>
  <tag k="highway" v="residential"/>
 </way>
 <way id="101">
  <nd ref="2"/><nd ref="4"/>
  <tag k="highway" v="residential"/>
  <tag k="oneway" v="yes"/>
 </way>
</osm>
)");
  testutil::write_file(
      in + "/trace.gpx",
      R"(<?xml version="1.0"?>
<gpx><trk><trkseg>
 <trkpt lat="50.0" lon="14.0"><time>2016-01-01T12:00:00Z</time></trkpt>
 <trkpt lat="50.0" lon="14.001"><time>2016-01-01T12:00:10Z</time></trkpt>
 <trkpt lat="50.0" lon="14.002"><time>2016-01-01T12:00:20Z</time></trkpt>
</trkseg></trk></gpx>
)");
  testutil::write_file(in + "/route.txt", "1 2 3");

  const std::string out = (tmp.path() / "conv").string();
  REQUIRE(run_cli("convert " + in + " --format zenodo --out-dir " + out) == 0);

  const RoadNetwork net = load_network(out + "/network.json");
  // Way 100 splits at junction node 2: edges 1->2, 2->3 plus reverses;
  // way 101 is oneway: 2->4 only.
  CHECK(net.node_count() == 4);
  CHECK(net.edge_count() == 5);
  const Trace tr = load_trace(out + "/trace.json");
  CHECK(tr.size() == 3);
  CHECK(tr.measurements()[1].time - tr.measurements()[0].time == 10.0);
  // Ground truth 1 -> 2 -> 3 maps onto the two forward edges.
  const auto gt = load_ground_truth(out + "/ground_truth.json");
  REQUIRE(gt.size() == 2);
  CHECK(net.edge(gt[0]).from == 1);
  CHECK(net.edge(gt[0]).to == 2);
  CHECK(net.edge(gt[1]).from == 2);
  CHECK(net.edge(gt[1]).to == 3);
}
