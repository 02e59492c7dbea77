#include "converters.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "mapmatch/errors.hpp"
#include "mapmatch/log.hpp"
#include "mapmatch/network.hpp"

namespace fs = std::filesystem;
namespace pt = boost::property_tree;
using namespace mapmatch;

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_double_field(const std::string& s, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    while (used < s.size() &&
           std::isspace(static_cast<unsigned char>(s[used]))) {
      ++used;
    }
    return used == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

Trace convert_csv_trace(const fs::path& input) {
  std::ifstream in(input);
  if (!in) throw ParseError("cannot open " + input.string());
  std::string line;
  std::size_t line_no = 0;
  int col_lat = 0, col_lon = 1, col_time = 2;
  bool header_checked = false;
  std::vector<Measurement> ms;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (!header_checked) {
      header_checked = true;
      double ignored;
      if (!parse_double_field(fields[0], ignored)) {
        col_lat = col_lon = col_time = -1;
        for (std::size_t i = 0; i < fields.size(); ++i) {
          std::string name = fields[i];
          std::transform(name.begin(), name.end(), name.begin(), ::tolower);
          if (name == "lat" || name == "latitude") col_lat = i;
          if (name == "lon" || name == "lng" || name == "longitude")
            col_lon = i;
          if (name == "time" || name == "timestamp") col_time = i;
        }
        if (col_lat < 0 || col_lon < 0 || col_time < 0) {
          throw ParseError(input.string() +
                           ": header lacks lat/lon/time columns");
        }
        continue;
      }
    }
    const int max_col = std::max({col_lat, col_lon, col_time});
    Measurement m;
    if (static_cast<int>(fields.size()) <= max_col ||
        !parse_double_field(fields[col_lat], m.pos.lat) ||
        !parse_double_field(fields[col_lon], m.pos.lon) ||
        !parse_double_field(fields[col_time], m.time)) {
      throw ParseError(input.string() + ": malformed row at line " +
                       std::to_string(line_no));
    }
    ms.push_back(m);
  }
  return Trace(std::move(ms));
}

namespace {

struct OsmWay {
  std::vector<NodeId> refs;
  bool forward = true;
  bool backward = true;
};

// OSM XML -> canonical network. Ways with a highway tag are split at
// junctions (nodes shared by several ways or way endpoints); two-way streets
// become two directed edges.
RoadNetwork convert_osm(const fs::path& input, const fs::path& out_file) {
  pt::ptree tree;
  try {
    pt::read_xml(input.string(), tree);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(input.string() + ": " + e.what());
  }

  std::unordered_map<NodeId, GeoPoint> osm_nodes;
  std::vector<OsmWay> ways;
  for (const auto& [key, child] : tree.get_child("osm")) {
    if (key == "node") {
      const auto id = child.get<NodeId>("<xmlattr>.id");
      osm_nodes[id] = {child.get<double>("<xmlattr>.lat"),
                       child.get<double>("<xmlattr>.lon")};
    } else if (key == "way") {
      OsmWay way;
      bool is_highway = false;
      for (const auto& [wkey, wchild] : child) {
        if (wkey == "nd") {
          way.refs.push_back(wchild.get<NodeId>("<xmlattr>.ref"));
        } else if (wkey == "tag") {
          const auto k = wchild.get<std::string>("<xmlattr>.k", "");
          const auto v = wchild.get<std::string>("<xmlattr>.v", "");
          if (k == "highway") is_highway = true;
          if (k == "oneway") {
            if (v == "yes" || v == "true" || v == "1") way.backward = false;
            if (v == "-1" || v == "reverse") way.forward = false;
          }
        }
      }
      if (is_highway && way.refs.size() >= 2) ways.push_back(std::move(way));
    }
  }
  if (ways.empty()) {
    throw ValidationError(input.string() + ": no highway ways found");
  }

  // Junctions: way endpoints and nodes used more than once.
  std::unordered_map<NodeId, int> use_count;
  for (const OsmWay& w : ways) {
    for (NodeId ref : w.refs) ++use_count[ref];
    ++use_count[w.refs.front()];
    ++use_count[w.refs.back()];
  }

  std::vector<GeoNodeRecord> nodes;
  std::unordered_set<NodeId> node_seen;
  std::vector<GeoEdgeRecord> edges;
  EdgeId next_edge = 0;
  const auto add_node = [&](NodeId id) {
    if (node_seen.insert(id).second) {
      nodes.push_back({id, osm_nodes.at(id)});
    }
  };
  for (const OsmWay& w : ways) {
    std::vector<GeoPoint> geom;
    NodeId seg_start = w.refs.front();
    for (std::size_t i = 0; i < w.refs.size(); ++i) {
      const NodeId ref = w.refs[i];
      const auto it = osm_nodes.find(ref);
      if (it == osm_nodes.end()) {
        throw ValidationError(input.string() + ": way references missing node " +
                              std::to_string(ref));
      }
      geom.push_back(it->second);
      const bool is_cut = i + 1 == w.refs.size() || use_count[ref] > 1;
      if (i > 0 && is_cut) {
        add_node(seg_start);
        add_node(ref);
        if (w.forward) {
          edges.push_back({next_edge++, seg_start, ref, geom});
        }
        if (w.backward) {
          std::vector<GeoPoint> rev(geom.rbegin(), geom.rend());
          edges.push_back({next_edge++, ref, seg_start, std::move(rev)});
        }
        geom = {it->second};
        seg_start = ref;
      }
    }
  }

  RoadNetwork net = RoadNetwork::build(nodes, edges);
  save_network(net, out_file);
  return net;
}

Trace convert_gpx(const fs::path& input) {
  pt::ptree tree;
  try {
    pt::read_xml(input.string(), tree);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(input.string() + ": " + e.what());
  }
  std::vector<Measurement> ms;
  bool missing_time = false;
  for (const auto& [tkey, trk] : tree.get_child("gpx")) {
    if (tkey != "trk") continue;
    for (const auto& [skey, seg] : trk) {
      if (skey != "trkseg") continue;
      for (const auto& [pkey, pnt] : seg) {
        if (pkey != "trkpt") continue;
        Measurement m;
        m.pos = {pnt.get<double>("<xmlattr>.lat"),
                 pnt.get<double>("<xmlattr>.lon")};
        const auto time_str = pnt.get_optional<std::string>("time");
        if (time_str) {
          std::tm tm{};
          double sec = 0.0;
          if (std::sscanf(time_str->c_str(), "%4d-%2d-%2dT%2d:%2d:%lf",
                          &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour,
                          &tm.tm_min, &sec) == 6) {
            tm.tm_year -= 1900;
            tm.tm_mon -= 1;
            m.time = static_cast<double>(timegm(&tm)) + sec;
          } else {
            missing_time = true;
            m.time = static_cast<double>(ms.size());
          }
        } else {
          missing_time = true;
          m.time = static_cast<double>(ms.size());
        }
        ms.push_back(m);
      }
    }
  }
  if (missing_time) {
    logging::logf(logging::Level::Warn,
                  "%s: missing or unparsable <time> tags, synthesizing 1 Hz "
                  "timestamps",
                  input.string().c_str());
  }
  return Trace(std::move(ms));
}

// Ground truth as a node-id sequence, mapped to edges via (from, to).
bool convert_ground_truth(const fs::path& input, const RoadNetwork& net,
                          const fs::path& out_file) {
  std::ifstream in(input);
  if (!in) return false;
  std::vector<NodeId> seq;
  std::string tok;
  while (in >> tok) {
    std::replace(tok.begin(), tok.end(), ',', ' ');
    try {
      seq.push_back(std::stoll(tok));
    } catch (const std::exception&) {
      logging::logf(logging::Level::Warn,
                    "%s: non-numeric ground-truth token '%s', skipping file",
                    input.string().c_str(), tok.c_str());
      return false;
    }
  }
  if (seq.size() < 2) return false;

  std::map<std::pair<NodeId, NodeId>, EdgeId> by_pair;
  for (const Edge& e : net.edges()) {
    by_pair.emplace(std::make_pair(e.from, e.to), e.id);
  }
  std::vector<EdgeId> route;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    const auto it = by_pair.find({seq[i - 1], seq[i]});
    if (it == by_pair.end()) {
      logging::logf(logging::Level::Warn,
                    "%s: no edge %lld -> %lld in the converted network, "
                    "skipping ground truth",
                    input.string().c_str(),
                    static_cast<long long>(seq[i - 1]),
                    static_cast<long long>(seq[i]));
      return false;
    }
    route.push_back(it->second);
  }
  save_ground_truth(route, out_file);
  return true;
}

fs::path find_by_extension(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> hits;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) {
      hits.push_back(entry.path());
    }
  }
  std::sort(hits.begin(), hits.end());
  return hits.empty() ? fs::path{} : hits.front();
}

fs::path find_ground_truth_file(const fs::path& dir) {
  std::vector<fs::path> hits;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (entry.path().extension() == ".route" ||
        name.find("route") != std::string::npos ||
        name.find("truth") != std::string::npos ||
        name.find("gt") == 0) {
      hits.push_back(entry.path());
    }
  }
  std::sort(hits.begin(), hits.end());
  return hits.empty() ? fs::path{} : hits.front();
}

}  // namespace

int convert_zenodo(const fs::path& input, const fs::path& out_dir) {
  if (!fs::is_directory(input)) {
    throw ParseError(input.string() +
                     ": zenodo conversion expects a directory per trace");
  }
  const fs::path osm = find_by_extension(input, ".osm");
  if (osm.empty()) {
    throw ParseError("no .osm file under " + input.string());
  }
  const RoadNetwork net = convert_osm(osm, out_dir / "network.json");

  const fs::path gpx = find_by_extension(input, ".gpx");
  const fs::path csv = find_by_extension(input, ".csv");
  if (!gpx.empty()) {
    save_trace(convert_gpx(gpx), out_dir / "trace.json");
  } else if (!csv.empty()) {
    save_trace(convert_csv_trace(csv), out_dir / "trace.json");
  } else {
    throw ParseError("no .gpx or .csv trace under " + input.string());
  }
  load_network(out_dir / "network.json");
  load_trace(out_dir / "trace.json");

  const fs::path gt = find_ground_truth_file(input);
  if (gt.empty() ||
      !convert_ground_truth(gt, net, out_dir / "ground_truth.json")) {
    logging::logf(logging::Level::Warn,
                  "%s: no usable ground truth, wrote network and trace only",
                  input.string().c_str());
  }
  return 0;
}
