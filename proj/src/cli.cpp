#include "capsd/cli.hpp"

#include "capsd/dataset.hpp"
#include "capsd/metrics.hpp"
#include "capsd/pipeline.hpp"
#include "capsd/plot.hpp"
#include "capsd/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

namespace capsd {

namespace {

int dumpScans(const Dataset& ds, const Scenario& sc, const std::string& dir, int stride) {
  std::filesystem::create_directories(dir);
  std::mt19937_64 rng(sc.noise.seed + 2);
  std::optional<Vec3> rov;
  std::optional<Pose3> asv;
  int det_index = 0;
  int written = 0;
  for (const Record& r : ds.records) {
    if (const auto* g = std::get_if<GtRovRecord>(&r.payload)) {
      rov = g->p;
    } else if (const auto* a = std::get_if<GtAsvRecord>(&r.payload)) {
      asv = Pose3::fromEuler(a->euler, a->p);
    } else if (std::holds_alternative<DetectionRecord>(r.payload)) {
      if (det_index++ % stride != 0 || !rov || !asv) continue;
      const ScanTarget target{*rov, sc.synthesis.target_radius, 1.0};
      const SonarScan scan = renderScan(sonarPoseWorld(*asv, sc.sonar.mount), std::span(&target, 1), sc.sonar,
                                        ScanNoise{sc.synthesis.scan_noise, &rng}, r.t);
      char name[32];
      std::snprintf(name, sizeof name, "scan_%06d.pgm", written++);
      writePgm(scan, (std::filesystem::path(dir) / name).string());
    }
  }
  return written;
}

}  // namespace

int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sonar and depth positioning of an ROV from a surface vehicle"};
  app.require_subcommand(1);

  std::string scenario_path, dataset_path, estimates_path, out_path, json_path, scans_dir, plot_dir;
  std::optional<std::uint64_t> seed;
  int scan_stride = 10;
  double window = 0.05;

  auto* sim = app.add_subcommand("simulate", "Scenario file to dataset");
  sim->add_option("--scenario", scenario_path, "Scenario (.yaml or .json)")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", out_path, "Dataset to write (JSON lines)")->required();
  sim->add_option("--seed", seed, "Override the scenario seed");
  sim->add_option("--dump-scans", scans_dir, "Also write rendered sonar scans (PGM) here");
  sim->add_option("--scan-stride", scan_stride, "Render every Nth detection")->check(CLI::PositiveNumber);

  auto* solve = app.add_subcommand("solve", "Dataset to estimates");
  solve->add_option("--dataset", dataset_path)->required()->check(CLI::ExistingFile);
  solve->add_option("--out", out_path, "Estimates to write (JSON lines)")->required();

  auto* eval = app.add_subcommand("eval", "Metrics of estimates against the dataset truth");
  eval->add_option("--dataset", dataset_path)->required()->check(CLI::ExistingFile);
  eval->add_option("--estimates", estimates_path)->required()->check(CLI::ExistingFile);
  eval->add_option("--json", json_path, "Also write the report as JSON");
  eval->add_option("--window", window, "Association window in seconds")->check(CLI::NonNegativeNumber);

  auto* plot = app.add_subcommand("plot", "Trajectory, per-axis and histogram SVGs");
  plot->add_option("--dataset", dataset_path)->required()->check(CLI::ExistingFile);
  plot->add_option("--estimates", estimates_path)->required()->check(CLI::ExistingFile);
  plot->add_option("--out-dir", plot_dir)->required();
  plot->add_option("--window", window, "Association window in seconds")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*sim) {
      Scenario sc = loadScenario(scenario_path);
      if (seed) sc.setSeed(*seed);
      const Dataset ds = simulateScenario(sc);
      writeDataset(ds, out_path);
      out << "wrote " << ds.records.size() << " records to " << out_path << '\n';
      if (!scans_dir.empty()) {
        const int n = dumpScans(ds, scenarioFromJson(ds.header.at("scenario")), scans_dir, scan_stride);
        out << "wrote " << n << " scans to " << scans_dir << '\n';
      }
    } else if (*solve) {
      const Dataset ds = readDataset(dataset_path);
      const PipelineResult res = runPipeline(ds);
      writeEstimates(res, out_path);
      out << "wrote " << res.positions().size() << " estimates to " << out_path << '\n';
      for (const auto& [code, n] : res.error_counts) out << "  " << code << ": " << n << '\n';
    } else if (*eval) {
      const Dataset ds = readDataset(dataset_path);
      const PipelineResult est = readEstimates(estimates_path);
      const MetricsReport rep = evaluate(est, ds, window);
      out << formatReport(rep);
      if (!json_path.empty()) {
        std::ofstream js(json_path, std::ios::binary);
        if (!js) throw std::runtime_error("cannot open " + json_path + " for writing");
        js << reportToJson(rep).dump(2) << '\n';
      }
    } else if (*plot) {
      const Dataset ds = readDataset(dataset_path);
      const PipelineResult est = readEstimates(estimates_path);
      for (const auto& f : writePlots(est, ds, plot_dir, window)) out << "wrote " << f << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace capsd
