#include "capsd/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace capsd {

using nlohmann::json;

namespace {

// Reads one object section, remembering which keys were consumed so that
// typos in scenario files surface as errors instead of silent defaults.
class Section {
 public:
  Section(const json& parent, const std::string& name) : name_(name) {
    if (parent.contains(name)) {
      obj_ = parent.at(name);
      if (!obj_.is_object()) throw std::invalid_argument("scenario: '" + name + "' must be a mapping");
    } else {
      obj_ = json::object();
    }
  }

  template <class T>
  T get(const std::string& key, const T& fallback) {
    seen_.insert(key);
    if (!obj_.contains(key)) return fallback;
    try {
      return obj_.at(key).get<T>();
    } catch (const json::exception&) {
      throw std::invalid_argument("scenario: bad value for " + name_ + "." + key);
    }
  }

  double deg(const std::string& key, double fallback_rad) { return deg2rad(get<double>(key, rad2deg(fallback_rad))); }

  Vec3 vec3(const std::string& key, const Vec3& fallback) {
    seen_.insert(key);
    if (!obj_.contains(key)) return fallback;
    try {
      return vecFromJson(obj_.at(key));
    } catch (const std::exception&) {
      throw std::invalid_argument("scenario: " + name_ + "." + key + " must be [x, y, z]");
    }
  }

  bool has(const std::string& key) const { return obj_.contains(key); }
  const json& raw(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  Section sub(const std::string& key) {
    seen_.insert(key);
    return Section(obj_, key);
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) throw std::invalid_argument("scenario: unknown key " + name_ + "." + key);
    }
  }

 private:
  std::string name_;
  json obj_;
  std::set<std::string> seen_;
};

json poseToJson(const Pose3& p) {
  const EulerZYX e = rotToEulerZyx(p.rot);
  return {{"position", vecToJson(p.trans)},
          {"yaw_deg", rad2deg(e.yaw)},
          {"pitch_deg", rad2deg(e.pitch)},
          {"roll_deg", rad2deg(e.roll)}};
}

Pose3 poseFromSection(Section sec) {
  const Vec3 pos = sec.vec3("position", Vec3::Zero());
  EulerZYX e;
  e.yaw = sec.deg("yaw_deg", 0.0);
  e.pitch = sec.deg("pitch_deg", 0.0);
  e.roll = sec.deg("roll_deg", 0.0);
  sec.finish();
  return Pose3::fromEuler(e, pos);
}

json yamlToJson(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Map: {
      json obj = json::object();
      for (const auto& kv : node) obj[kv.first.as<std::string>()] = yamlToJson(kv.second);
      return obj;
    }
    case YAML::NodeType::Sequence: {
      json arr = json::array();
      for (const auto& item : node) arr.push_back(yamlToJson(item));
      return arr;
    }
    case YAML::NodeType::Scalar: {
      const std::string& s = node.Scalar();
      if (node.Tag() == "!") return s;  // quoted
      if (s == "true") return true;
      if (s == "false") return false;
      long long i = 0;
      auto [iend, iec] = std::from_chars(s.data(), s.data() + s.size(), i);
      if (iec == std::errc() && iend == s.data() + s.size()) return i;
      double d = 0.0;
      auto [dend, dec] = std::from_chars(s.data(), s.data() + s.size(), d);
      if (dec == std::errc() && dend == s.data() + s.size()) return d;
      return s;
    }
    default:
      return nullptr;
  }
}

}  // namespace

void Scenario::setSeed(std::uint64_t s) {
  seed = s;
  trajectory.seed = s;
  noise.seed = s + 1;
}

json scenarioToJson(const Scenario& s) {
  json j;
  j["seed"] = s.seed;
  j["tank"] = {{"length", s.tank.length}, {"width", s.tank.width}, {"depth", s.tank.depth}};

  const TrajectorySpec& tr = s.trajectory;
  json jt = {{"kind", toString(tr.kind)},
             {"speed", tr.speed},
             {"dt", tr.dt},
             {"duration", tr.duration},
             {"margin", tr.margin},
             {"depth", tr.depth},
             {"depth2", tr.depth2},
             {"bounce_amplitude", tr.bounce_amplitude},
             {"bounce_wavelength", tr.bounce_wavelength},
             {"lanes", tr.lanes},
             {"waypoints", tr.waypoints}};
  if (tr.region) jt["region"] = {tr.region->x_min, tr.region->x_max, tr.region->y_min, tr.region->y_max};
  j["trajectory"] = jt;

  const AsvTrackSpec& a = s.asv;
  j["asv"] = {{"mode", a.mode == AsvMode::Hover ? "hover" : "stationary"},
              {"position", vecToJson(a.position)},
              {"yaw_deg", rad2deg(a.yaw)},
              {"lag", a.lag},
              {"offset", {a.offset.x(), a.offset.y()}},
              {"rock_roll_deg", rad2deg(a.rock_roll)},
              {"rock_pitch_deg", rad2deg(a.rock_pitch)},
              {"rock_freq", a.rock_freq}};

  const SonarConfig& c = s.sonar;
  j["sonar"] = {{"hfov_deg", rad2deg(c.hfov)}, {"vmin_deg", rad2deg(c.vmin)}, {"vmax_deg", rad2deg(c.vmax)},
                {"rmax", c.rmax},              {"width", c.img_w},           {"height", c.img_h},
                {"mount", poseToJson(c.mount)}};

  const EkfConfig& e = s.ekf;
  j["ekf"] = {{"gyro_noise_density", e.gyro_noise_density},
              {"accel_noise_std", e.accel_noise_std},
              {"initial_cov", e.initial_cov},
              {"gravity", e.gravity},
              {"gate", e.gate},
              {"flip_accel_sign", e.flip_accel_sign},
              {"update_iterations", e.update_iterations}};

  const NoiseSpec& n = s.noise;
  j["noise"] = {{"gyro_std", n.gyro_std},
                {"accel_std", n.accel_std},
                {"slam_pos_std", n.slam_pos_std},
                {"slam_yaw_std_deg", rad2deg(n.slam_yaw_std)},
                {"azimuth_std_deg", rad2deg(n.azimuth_std)},
                {"range_std", n.range_std},
                {"pixel_std", n.pixel_std},
                {"depth_std", n.depth_std},
                {"dropout", n.dropout},
                {"outlier_rate", n.outlier_rate},
                {"outlier_pixel_std", n.outlier_pixel_std}};

  j["rates"] = {{"imu", s.rates.imu}, {"slam", s.rates.slam}, {"detection", s.rates.detection},
                {"depth", s.rates.depth}};

  j["solver"] = {{"tangency_rel", s.solver.tangency_rel},
                 {"consistency_tol", s.solver.consistency_tol},
                 {"azimuth_tol_deg", rad2deg(s.solver.azimuth_tol)},
                 {"aperture_margin_deg", rad2deg(s.solver.aperture_margin)}};

  const SynthesisOptions& o = s.synthesis;
  j["detector"] = {{"kind", o.detector == DetectorKind::Centroid ? "centroid" : "synthetic"},
                   {"target_radius", o.target_radius},
                   {"scan_noise", o.scan_noise},
                   {"threshold", o.centroid_threshold}};
  j["rov"] = {{"depth_sensor_dz", o.depth_sensor_dz}};
  return j;
}

Scenario scenarioFromJson(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("scenario: top level must be a mapping");
  Scenario s;
  static const std::set<std::string> kSections = {"seed", "tank", "trajectory", "asv", "sonar", "ekf",
                                                  "noise", "rates", "solver", "detector", "rov"};
  for (const auto& [key, value] : j.items()) {
    if (!kSections.count(key)) throw std::invalid_argument("scenario: unknown section '" + key + "'");
  }
  s.setSeed(j.value("seed", s.seed));

  Section tank(j, "tank");
  s.tank.length = tank.get("length", s.tank.length);
  s.tank.width = tank.get("width", s.tank.width);
  s.tank.depth = tank.get("depth", s.tank.depth);
  tank.finish();

  Section tr(j, "trajectory");
  TrajectorySpec& t = s.trajectory;
  t.kind = trajectoryKindFromString(tr.get<std::string>("kind", toString(t.kind)));
  t.speed = tr.get("speed", t.speed);
  t.dt = tr.get("dt", t.dt);
  t.duration = tr.get("duration", t.duration);
  t.margin = tr.get("margin", t.margin);
  t.depth = tr.get("depth", t.depth);
  t.depth2 = tr.get("depth2", t.depth2);
  t.bounce_amplitude = tr.get("bounce_amplitude", t.bounce_amplitude);
  t.bounce_wavelength = tr.get("bounce_wavelength", t.bounce_wavelength);
  t.lanes = tr.get("lanes", t.lanes);
  t.waypoints = tr.get("waypoints", t.waypoints);
  if (tr.has("region")) {
    const json& r = tr.raw("region");
    if (!r.is_array() || r.size() != 4) throw std::invalid_argument("scenario: trajectory.region must be [x_min, x_max, y_min, y_max]");
    t.region = Region{r[0].get<double>(), r[1].get<double>(), r[2].get<double>(), r[3].get<double>()};
  }
  tr.finish();

  Section asv(j, "asv");
  AsvTrackSpec& a = s.asv;
  const std::string mode = asv.get<std::string>("mode", "stationary");
  if (mode != "stationary" && mode != "hover") throw std::invalid_argument("scenario: asv.mode must be stationary or hover");
  a.mode = mode == "hover" ? AsvMode::Hover : AsvMode::Stationary;
  a.position = asv.vec3("position", a.position);
  a.yaw = asv.deg("yaw_deg", a.yaw);
  a.lag = asv.get("lag", a.lag);
  if (asv.has("offset")) {
    const json& o = asv.raw("offset");
    if (!o.is_array() || o.size() != 2) throw std::invalid_argument("scenario: asv.offset must be [dx, dy]");
    a.offset = {o[0].get<double>(), o[1].get<double>()};
  }
  a.rock_roll = asv.deg("rock_roll_deg", a.rock_roll);
  a.rock_pitch = asv.deg("rock_pitch_deg", a.rock_pitch);
  a.rock_freq = asv.get("rock_freq", a.rock_freq);
  asv.finish();

  Section sonar(j, "sonar");
  SonarConfig& c = s.sonar;
  c.hfov = sonar.deg("hfov_deg", c.hfov);
  c.vmin = sonar.deg("vmin_deg", c.vmin);
  c.vmax = sonar.deg("vmax_deg", c.vmax);
  c.rmax = sonar.get("rmax", c.rmax);
  c.img_w = sonar.get("width", c.img_w);
  c.img_h = sonar.get("height", c.img_h);
  c.mount = poseFromSection(sonar.sub("mount"));
  sonar.finish();
  c.validate();

  Section ekf(j, "ekf");
  EkfConfig& e = s.ekf;
  e.gyro_noise_density = ekf.get("gyro_noise_density", e.gyro_noise_density);
  e.accel_noise_std = ekf.get("accel_noise_std", e.accel_noise_std);
  e.initial_cov = ekf.get("initial_cov", e.initial_cov);
  e.gravity = ekf.get("gravity", e.gravity);
  e.gate = ekf.get("gate", e.gate);
  e.flip_accel_sign = ekf.get("flip_accel_sign", e.flip_accel_sign);
  e.update_iterations = ekf.get("update_iterations", e.update_iterations);
  ekf.finish();
  if (!(e.gyro_noise_density > 0 && e.accel_noise_std > 0 && e.initial_cov > 0 && e.gravity > 0 && e.gate > 0 &&
        e.update_iterations >= 1)) {
    throw std::invalid_argument("scenario: ekf parameters must be strictly positive");
  }

  Section noise(j, "noise");
  NoiseSpec& n = s.noise;
  n.gyro_std = noise.get("gyro_std", n.gyro_std);
  n.accel_std = noise.get("accel_std", n.accel_std);
  n.slam_pos_std = noise.get("slam_pos_std", n.slam_pos_std);
  n.slam_yaw_std = noise.deg("slam_yaw_std_deg", n.slam_yaw_std);
  n.azimuth_std = noise.deg("azimuth_std_deg", n.azimuth_std);
  n.range_std = noise.get("range_std", n.range_std);
  n.pixel_std = noise.get("pixel_std", n.pixel_std);
  n.depth_std = noise.get("depth_std", n.depth_std);
  n.dropout = noise.get("dropout", n.dropout);
  n.outlier_rate = noise.get("outlier_rate", n.outlier_rate);
  n.outlier_pixel_std = noise.get("outlier_pixel_std", n.outlier_pixel_std);
  noise.finish();
  for (double sigma : {n.gyro_std, n.accel_std, n.slam_pos_std, n.slam_yaw_std, n.azimuth_std, n.range_std,
                       n.pixel_std, n.depth_std, n.outlier_pixel_std}) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("scenario: noise sigmas must be >= 0");
  }
  for (double p : {n.dropout, n.outlier_rate}) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("scenario: probabilities must lie in [0, 1]");
  }

  Section rates(j, "rates");
  s.rates.imu = rates.get("imu", s.rates.imu);
  s.rates.slam = rates.get("slam", s.rates.slam);
  s.rates.detection = rates.get("detection", s.rates.detection);
  s.rates.depth = rates.get("depth", s.rates.depth);
  rates.finish();

  Section solver(j, "solver");
  s.solver.tangency_rel = solver.get("tangency_rel", s.solver.tangency_rel);
  s.solver.consistency_tol = solver.get("consistency_tol", s.solver.consistency_tol);
  s.solver.azimuth_tol = solver.deg("azimuth_tol_deg", s.solver.azimuth_tol);
  s.solver.aperture_margin = solver.deg("aperture_margin_deg", s.solver.aperture_margin);
  solver.finish();

  Section det(j, "detector");
  SynthesisOptions& o = s.synthesis;
  const std::string kind = det.get<std::string>("kind", "synthetic");
  if (kind != "synthetic" && kind != "centroid") throw std::invalid_argument("scenario: detector.kind must be synthetic or centroid");
  o.detector = kind == "centroid" ? DetectorKind::Centroid : DetectorKind::Synthetic;
  o.target_radius = det.get("target_radius", o.target_radius);
  o.scan_noise = det.get("scan_noise", o.scan_noise);
  o.centroid_threshold = det.get("threshold", o.centroid_threshold);
  det.finish();

  Section rov(j, "rov");
  o.depth_sensor_dz = rov.get("depth_sensor_dz", o.depth_sensor_dz);
  rov.finish();

  o.gravity = e.gravity;
  o.flip_accel_sign = e.flip_accel_sign;
  return s;
}

Scenario parseScenarioYaml(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& ex) {
    throw std::invalid_argument(std::string("scenario: YAML parse error: ") + ex.what());
  }
  return scenarioFromJson(yamlToJson(root));
}

Scenario loadScenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return scenarioFromJson(json::parse(buf.str()));
  return parseScenarioYaml(buf.str());
}

Dataset simulateScenario(const Scenario& input) {
  // Round-trip through the header form so the simulation and every later
  // replay see bit-identical parameters.
  const json scenario_json = scenarioToJson(input);
  const Scenario s = scenarioFromJson(scenario_json);

  const auto rov = genTrajectory(s.trajectory, s.tank);
  const auto asv = asvTrack(rov, s.asv);
  const auto gt = combineTruth(rov, asv);

  Dataset ds;
  ds.header = makeDatasetHeader(scenario_json);
  ds.records = synthesizeSensors(gt, s.sonar, s.noise, s.rates, s.synthesis);
  return ds;
}

}  // namespace capsd
