#include "mongerays/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mongerays/error.hpp"

namespace mongerays {

namespace {

void dump_scalar(const Json& v, std::string& out) {
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (!std::isfinite(d)) {
      out += "null";
      return;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    out += buf;
  } else {
    out += v.dump();
  }
}

void dump(const Json& v, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  if (v.is_object()) {
    if (v.empty()) {
      out += "{}";
      return;
    }
    out += "{\n";
    bool first = true;
    for (const auto& [key, item] : v.items()) {
      if (!first) out += ",\n";
      first = false;
      out += pad + Json(key).dump() + ": ";
      dump(item, depth + 1, out);
    }
    out += "\n" + close + "}";
  } else if (v.is_array()) {
    if (v.empty()) {
      out += "[]";
      return;
    }
    const bool flat = std::none_of(v.begin(), v.end(), [](const Json& e) { return e.is_structured(); });
    if (flat) {
      out += "[";
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        dump_scalar(v[i], out);
      }
      out += "]";
      return;
    }
    out += "[\n";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ",\n";
      out += pad;
      dump(v[i], depth + 1, out);
    }
    out += "\n" + close + "]";
  } else {
    dump_scalar(v, out);
  }
}

[[noreturn]] void input_error(const std::string& what) { throw Error(ErrorKind::InputError, what); }

PointIndex lookup(const std::unordered_map<std::string, PointIndex>& index, const Json& id) {
  const auto it = index.find(id.get<std::string>());
  if (it == index.end()) input_error("unknown point id " + id.dump());
  return it->second;
}

}  // namespace

std::string dump_json(const Json& value) {
  std::string out;
  dump(value, 0, out);
  out += "\n";
  return out;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) input_error("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const Json::exception& e) {
    input_error(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) input_error("cannot write " + path.string());
  out << text;
}

MetricMeasureSpace space_from_json(const Json& doc) {
  try {
    const auto ids = doc.at("points").get<std::vector<std::string>>();
    const std::size_t n = ids.size();
    std::unordered_map<std::string, PointIndex> index;
    for (PointIndex i = 0; i < n; ++i) {
      if (!index.emplace(ids[i], i).second) input_error("duplicate point id " + ids[i]);
    }
    std::vector<double> weights = doc.contains("weights")
                                      ? doc.at("weights").get<std::vector<double>>()
                                      : std::vector<double>(n, 1.0);
    if (weights.size() != n) input_error("weights and points differ in length");
    const double geo_tol = doc.value("geo_tol", kExactTol);
    const std::string mode = doc.value("mode", std::string(doc.contains("edges") ? "graph" : "matrix"));
    if (mode == "graph") {
      std::vector<std::array<double, 3>> edges;
      for (const auto& e : doc.at("edges")) {
        if (!e.is_array() || e.size() != 3) input_error("edge must be [id, id, length]");
        edges.push_back({static_cast<double>(lookup(index, e[0])),
                         static_cast<double>(lookup(index, e[1])), e[2].get<double>()});
      }
      return build_space_from_graph(ids, edges, std::move(weights), geo_tol);
    }
    if (mode != "matrix") input_error("mode must be matrix or graph");
    const auto& rows = doc.at("dist");
    if (rows.size() != n) input_error("distance matrix has the wrong number of rows");
    std::vector<double> dist;
    dist.reserve(n * n);
    for (const auto& row : rows) {
      if (row.size() != n) input_error("distance matrix row has the wrong length");
      for (const auto& d : row) dist.push_back(d.is_null() ? INFINITY : d.get<double>());
    }
    return build_space(ids, std::move(dist), std::move(weights), geo_tol);
  } catch (const Json::exception& e) {
    input_error(std::string("space file: ") + e.what());
  }
}

Json space_to_json(const MetricMeasureSpace& space) {
  Json doc;
  doc["schema"] = kSchema;
  doc["points"] = space.ids();
  doc["weights"] = std::vector<double>(space.weights().begin(), space.weights().end());
  doc["geo_tol"] = space.geo_tol();
  if (space.graph_mode()) {
    doc["mode"] = "graph";
    Json edges = Json::array();
    for (const auto& e : space.edges()) {
      edges.push_back({space.id(static_cast<PointIndex>(e[0])),
                       space.id(static_cast<PointIndex>(e[1])), e[2]});
    }
    doc["edges"] = std::move(edges);
  } else {
    doc["mode"] = "matrix";
    Json rows = Json::array();
    for (PointIndex x = 0; x < space.size(); ++x) {
      Json row = Json::array();
      for (PointIndex y = 0; y < space.size(); ++y) row.push_back(space.dist(x, y));
      rows.push_back(std::move(row));
    }
    doc["dist"] = std::move(rows);
  }
  return doc;
}

ProbabilityMeasure measure_from_json(const MetricMeasureSpace& space, const Json& doc) {
  try {
    std::vector<double> mass(space.size(), 0.0);
    for (const auto& [id, value] : doc.at("mass").items()) {
      const auto x = space.index_of(id);
      if (!x) input_error("measure names unknown point " + id);
      mass[*x] = value.get<double>();
    }
    return make_measure(space, std::move(mass));
  } catch (const Json::exception& e) {
    input_error(std::string("measure file: ") + e.what());
  }
}

Json measure_to_json(const MetricMeasureSpace& space, const ProbabilityMeasure& measure) {
  Json doc;
  doc["schema"] = kSchema;
  Json mass = Json::object();
  for (PointIndex x = 0; x < space.size(); ++x) {
    if (measure[x] != 0.0) mass[space.id(x)] = measure[x];
  }
  doc["mass"] = std::move(mass);
  return doc;
}

}  // namespace mongerays
