#include "capsd/pipeline.hpp"

#include "capsd/attitude_ekf.hpp"
#include "capsd/scenario.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace capsd {

using nlohmann::json;

std::vector<TimedPosition> PipelineResult::positions() const {
  std::vector<TimedPosition> out;
  for (const EstimateRecord& r : records) {
    if (r.ok()) out.push_back({r.t, r.estimate.p});
  }
  return out;
}

std::vector<TimedPosition> truthFromDataset(const Dataset& ds) {
  std::vector<TimedPosition> out;
  for (const Record& r : ds.records) {
    if (const auto* g = std::get_if<GtRovRecord>(&r.payload)) out.push_back({r.t, g->p});
  }
  return out;
}

PipelineResult runPipeline(const Dataset& ds, double window) {
  if (!ds.header.contains("scenario")) throw MalformedDataset("MalformedDataset: header has no scenario");
  const Scenario sc = scenarioFromJson(ds.header.at("scenario"));

  PipelineResult res;
  res.header = {{"format", kEstimatesFormat}, {"version", kEstimatesVersion}, {"scenario", ds.header.at("scenario")}};

  AttitudeFilter filter(sc.ekf);
  std::optional<SlamPose2D> slam;
  std::optional<DepthSample> depth;
  auto fail = [&](double t, const std::string& code) {
    ++res.error_counts[code];
    EstimateRecord e;
    e.t = t;
    e.code = code;
    res.records.push_back(std::move(e));
  };

  for (const Record& rec : ds.records) {
    if (const auto* imu = std::get_if<ImuSample>(&rec.payload)) {
      try {
        if (!filter.process(*imu)) ++res.error_counts["MeasurementRejected"];
      } catch (const NumericalDivergence&) {
        ++res.error_counts["NumericalDivergence"];
        filter = AttitudeFilter(sc.ekf);
      }
    } else if (const auto* s = std::get_if<SlamPose2D>(&rec.payload)) {
      slam = *s;
    } else if (const auto* d = std::get_if<DepthSample>(&rec.payload)) {
      depth = *d;
    } else if (const auto* det = std::get_if<DetectionRecord>(&rec.payload)) {
      if (!filter.initialized() || !slam || !depth) {
        fail(rec.t, "MissingInput");
        continue;
      }
      SolverInput in;
      in.asv_pose = fuseAsvPose(filter.state(), *slam, sc.asv.position.z());
      in.mount = sc.sonar.mount;
      in.detection = det->polar;
      in.depth = {depth->t, depth->z_depth - sc.synthesis.depth_sensor_dz};
      in.cfg = sc.sonar;
      const SolveResult sr = solvePosition(in, sc.solver);
      if (!sr.ok()) {
        fail(rec.t, toString(sr.status));
        continue;
      }
      EstimateRecord e;
      e.t = rec.t;
      e.estimate = sr.estimate;
      e.estimate.t = rec.t;
      res.records.push_back(std::move(e));
    }
  }

  const auto truth = truthFromDataset(ds);
  if (!truth.empty()) {
    try {
      res.metrics = evaluate(res, ds, window);
    } catch (const EmptyOverlap&) {
      ++res.error_counts["EmptyOverlap"];
    }
  }
  return res;
}

void writeEstimates(const PipelineResult& r, std::ostream& out) {
  out << json{{"t", 0.0}, {"type", "header"}, {"payload", r.header}}.dump() << '\n';
  for (const EstimateRecord& e : r.records) {
    if (!e.ok()) {
      out << json{{"t", e.t}, {"type", "solver_error"}, {"payload", {{"code", e.code}}}}.dump() << '\n';
      continue;
    }
    json cands = json::array();
    for (const Vec3& c : e.estimate.candidates) cands.push_back(vecToJson(c));
    const Residuals& rs = e.estimate.residuals;
    json payload = {{"p", vecToJson(e.estimate.p)},
                    {"candidates", cands},
                    {"chosen_index", e.estimate.chosen_index},
                    {"residuals", {rs.sphere, rs.plane, rs.depth}}};
    out << json{{"t", e.t}, {"type", "estimate"}, {"payload", payload}}.dump() << '\n';
  }
  const double t_end = r.records.empty() ? 0.0 : r.records.back().t;
  out << json{{"t", t_end}, {"type", "summary"}, {"payload", {{"error_counts", r.error_counts}}}}.dump() << '\n';
}

void writeEstimates(const PipelineResult& r, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  writeEstimates(r, out);
}

PipelineResult readEstimates(std::istream& in) {
  PipelineResult res;
  std::string line;
  size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw MalformedDataset("malformed estimates file: line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& ex) {
      fail(ex.what());
    }
    try {
      const std::string type = obj.at("type").get<std::string>();
      const double t = obj.at("t").get<double>();
      const json& p = obj.at("payload");
      if (lineno == 1) {
        if (type != "header" || p.value("format", "") != kEstimatesFormat) fail("not a capsd estimates file");
        if (p.value("version", -1) != kEstimatesVersion) fail("unsupported estimates version");
        res.header = p;
      } else if (type == "estimate") {
        EstimateRecord e;
        e.t = t;
        e.estimate.t = t;
        e.estimate.p = vecFromJson(p.at("p"));
        for (const json& c : p.at("candidates")) e.estimate.candidates.push_back(vecFromJson(c));
        e.estimate.chosen_index = p.at("chosen_index").get<int>();
        const json& rs = p.at("residuals");
        e.estimate.residuals = {rs.at(0).get<double>(), rs.at(1).get<double>(), rs.at(2).get<double>()};
        res.records.push_back(std::move(e));
      } else if (type == "solver_error") {
        EstimateRecord e;
        e.t = t;
        e.code = p.at("code").get<std::string>();
        res.records.push_back(std::move(e));
      } else if (type == "summary") {
        res.error_counts = p.at("error_counts").get<std::map<std::string, int>>();
      } else {
        fail("unknown record type '" + type + "'");
      }
    } catch (const json::exception& ex) {
      fail(ex.what());
    } catch (const std::invalid_argument& ex) {
      fail(ex.what());
    }
  }
  if (lineno == 0) throw MalformedDataset("malformed estimates file: empty");
  return res;
}

PipelineResult readEstimates(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return readEstimates(in);
}

MetricsReport evaluate(const PipelineResult& estimates, const Dataset& ds, double window) {
  const auto est = estimates.positions();
  const auto truth = truthFromDataset(ds);
  const Association a = associate(est, truth, window);
  MetricsReport r = computeMetrics(a.pairs);
  r.dropped = a.dropped;
  r.error_counts = estimates.error_counts;
  return r;
}

}  // namespace capsd
