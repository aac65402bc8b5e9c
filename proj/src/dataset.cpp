#include "capsd/dataset.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>

namespace capsd {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

json payloadToJson(const RecordPayload& payload) {
  return std::visit(
      Overloaded{
          [](const ImuSample& s) { return json{{"omega", vecToJson(s.omega)}, {"accel", vecToJson(s.accel)}}; },
          [](const SlamPose2D& s) { return json{{"x", s.x}, {"y", s.y}, {"yaw", s.yaw}}; },
          [](const DepthSample& s) { return json{{"z", s.z_depth}}; },
          [](const DetectionRecord& d) {
            return json{{"range", d.polar.range_m},
                        {"azimuth", d.polar.azimuth},
                        {"confidence", d.polar.confidence},
                        {"u", d.u},
                        {"v", d.v}};
          },
          [](const GtRovRecord& g) { return json{{"p", vecToJson(g.p)}}; },
          [](const GtAsvRecord& g) {
            return json{{"p", vecToJson(g.p)}, {"ypr", json::array({g.euler.yaw, g.euler.pitch, g.euler.roll})}};
          },
      },
      payload);
}

RecordPayload payloadFromJson(const std::string& type, double t, const json& p) {
  if (type == "imu") return ImuSample{t, vecFromJson(p.at("omega")), vecFromJson(p.at("accel"))};
  if (type == "slam") return SlamPose2D{t, p.at("x").get<double>(), p.at("y").get<double>(), p.at("yaw").get<double>()};
  if (type == "depth") return DepthSample{t, p.at("z").get<double>()};
  if (type == "detection") {
    DetectionRecord d;
    d.polar = {p.at("range").get<double>(), p.at("azimuth").get<double>(), t, p.at("confidence").get<double>()};
    d.u = p.at("u").get<double>();
    d.v = p.at("v").get<double>();
    return d;
  }
  if (type == "gt_rov") return GtRovRecord{vecFromJson(p.at("p"))};
  if (type == "gt_asv") {
    const json& ypr = p.at("ypr");
    if (!ypr.is_array() || ypr.size() != 3) throw std::invalid_argument("ypr must hold three numbers");
    return GtAsvRecord{vecFromJson(p.at("p")), {ypr[0].get<double>(), ypr[1].get<double>(), ypr[2].get<double>()}};
  }
  throw std::invalid_argument("unknown record type '" + type + "'");
}

}  // namespace

const char* recordTypeName(const RecordPayload& p) {
  static constexpr const char* names[] = {"imu", "slam", "depth", "detection", "gt_rov", "gt_asv"};
  return names[p.index()];
}

json vecToJson(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vecFromJson(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json makeDatasetHeader(const json& scenario) {
  return json{{"format", kDatasetFormat},
              {"version", kDatasetVersion},
              {"units", "SI; angles in radians; world z up"},
              {"scenario", scenario}};
}

void writeDataset(const Dataset& ds, std::ostream& out) {
  out << json{{"t", 0.0}, {"type", "header"}, {"payload", ds.header}}.dump() << '\n';
  for (const Record& r : ds.records) {
    out << json{{"t", r.t}, {"type", recordTypeName(r.payload)}, {"payload", payloadToJson(r.payload)}}.dump()
        << '\n';
  }
}

void writeDataset(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  writeDataset(ds, out);
}

Dataset readDataset(std::istream& in) {
  Dataset ds;
  std::string line;
  size_t lineno = 0;
  double last_t = -std::numeric_limits<double>::infinity();
  auto fail = [&](const std::string& what) {
    throw MalformedDataset("MalformedDataset: line " + std::to_string(lineno) + ": " + what);
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      fail(std::string("invalid JSON (") + e.what() + ")");
    }
    if (!obj.is_object() || !obj.contains("t") || !obj.contains("type") || !obj.contains("payload")) {
      fail("expected keys t, type, payload");
    }
    const std::string type = obj["type"].is_string() ? obj["type"].get<std::string>() : "";
    if (lineno == 1) {
      if (type != "header") fail("first line must be the header");
      const json& h = obj["payload"];
      if (!h.is_object() || h.value("format", "") != kDatasetFormat) fail("not a capsd dataset");
      if (h.value("version", -1) != kDatasetVersion) fail("unsupported dataset version");
      ds.header = h;
      continue;
    }
    if (!obj["t"].is_number()) fail("t must be a number");
    const double t = obj["t"].get<double>();
    if (!std::isfinite(t)) fail("t must be finite");
    if (t < last_t) fail("records must be non-decreasing in t");
    last_t = t;
    try {
      ds.records.push_back({t, payloadFromJson(type, t, obj["payload"])});
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }
  if (lineno == 0) throw MalformedDataset("MalformedDataset: empty file");
  return ds;
}

Dataset readDataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return readDataset(in);
}

}  // namespace capsd
