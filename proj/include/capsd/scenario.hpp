#pragma once

#include "capsd/attitude_ekf.hpp"
#include "capsd/capsd_solver.hpp"
#include "capsd/dataset.hpp"
#include "capsd/scenario_sim.hpp"
#include "capsd/sonar_model.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace capsd {

/// Everything that determines one simulated run. Angles are radians here;
/// the file form uses degrees (keys ending in _deg).
struct Scenario {
  std::uint64_t seed = 42;
  TankSpec tank;
  TrajectorySpec trajectory;
  AsvTrackSpec asv;
  SonarConfig sonar;
  EkfConfig ekf;
  NoiseSpec noise;
  SensorRates rates;
  SolverOptions solver;
  SynthesisOptions synthesis;

  /// Trajectory and noise generators both derive from one seed.
  void setSeed(std::uint64_t s);
};

nlohmann::json scenarioToJson(const Scenario& s);

/// Missing keys take their defaults; unknown keys are rejected.
Scenario scenarioFromJson(const nlohmann::json& j);

/// YAML (.yaml/.yml) or JSON (.json) scenario file.
Scenario loadScenario(const std::string& path);
Scenario parseScenarioYaml(const std::string& text);

/// Trajectory -> ASV track -> sensor synthesis. The header carries the
/// scenario exactly as the replay will read it back.
Dataset simulateScenario(const Scenario& s);

}  // namespace capsd
