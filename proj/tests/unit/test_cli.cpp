#include "capsd/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun cli(std::vector<std::string> args) {
  args.insert(args.begin(), "capsd");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = capsd::runCli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("capsd_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                       "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "short.yaml") << "seed: 3\n"
                                         "trajectory:\n  kind: square\n  duration: 8\n  region: [16, 23, 4.5, 11.5]\n"
                                         "asv:\n  position: [6, 8, 0]\n"
                                         "sonar:\n  rmax: 20\n  mount:\n    position: [0.35, 0, -0.15]\n"
                                         "    pitch_deg: 15\n";
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string p(const char* name) const { return (dir / name).string(); }
  fs::path dir;
};

}  // namespace

TEST_F(CliTest, HappyPath) {
  CliRun r = cli({"simulate", "--scenario", p("short.yaml"), "--out", p("ds.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = cli({"solve", "--dataset", p("ds.jsonl"), "--out", p("est.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = cli({"eval", "--dataset", p("ds.jsonl"), "--estimates", p("est.jsonl"), "--json", p("m.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("MED"), std::string::npos);
  EXPECT_NE(slurp(dir / "m.json").find("\"med\""), std::string::npos);
  r = cli({"plot", "--dataset", p("ds.jsonl"), "--estimates", p("est.jsonl"), "--out-dir", p("plots")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"trajectory_xy.svg", "axes.svg", "histogram.svg"}) {
    EXPECT_EQ(slurp(dir / "plots" / f).rfind("<svg", 0), 0u) << f;
  }
}

TEST_F(CliTest, SeedOverrideAndDeterminism) {
  ASSERT_EQ(cli({"simulate", "--scenario", p("short.yaml"), "--out", p("a.jsonl"), "--seed", "11"}).code, 0);
  ASSERT_EQ(cli({"simulate", "--scenario", p("short.yaml"), "--out", p("b.jsonl"), "--seed", "11"}).code, 0);
  ASSERT_EQ(cli({"simulate", "--scenario", p("short.yaml"), "--out", p("c.jsonl")}).code, 0);
  EXPECT_EQ(slurp(dir / "a.jsonl"), slurp(dir / "b.jsonl"));
  EXPECT_NE(slurp(dir / "a.jsonl"), slurp(dir / "c.jsonl"));
  EXPECT_NE(slurp(dir / "a.jsonl").find("\"seed\":11"), std::string::npos);
}

TEST_F(CliTest, DumpScans) {
  const CliRun r = cli({"simulate", "--scenario", p("short.yaml"), "--out", p("ds.jsonl"), "--dump-scans", p("scans"),
                     "--scan-stride", "20"});
  ASSERT_EQ(r.code, 0) << r.err;
  int n = 0;
  for (const auto& e : fs::directory_iterator(dir / "scans")) {
    EXPECT_EQ(slurp(e.path()).rfind("P5\n512 512\n255\n", 0), 0u);
    ++n;
  }
  EXPECT_GT(n, 0);
}

TEST_F(CliTest, MismatchedFilesFail) {
  ASSERT_EQ(cli({"simulate", "--scenario", p("short.yaml"), "--out", p("ds.jsonl")}).code, 0);
  ASSERT_EQ(cli({"solve", "--dataset", p("ds.jsonl"), "--out", p("est.jsonl")}).code, 0);
  // a dataset whose truth lies entirely after the estimates
  std::ifstream in(dir / "ds.jsonl");
  std::ofstream shifted(dir / "shifted.jsonl");
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!first) {
      const auto pos = line.rfind("\"t\":");
      const auto end = line.find(',', pos);
      const double t = std::stod(line.substr(pos + 4, end - pos - 4));
      line = line.substr(0, pos + 4) + std::to_string(t + 500.0) + line.substr(end);
    }
    first = false;
    shifted << line << '\n';
  }
  shifted.close();
  const CliRun r = cli({"eval", "--dataset", p("shifted.jsonl"), "--estimates", p("est.jsonl")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("EmptyOverlap"), std::string::npos) << r.err;
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_NE(cli({}).code, 0);
  EXPECT_NE(cli({"frobnicate"}).code, 0);
  EXPECT_NE(cli({"simulate", "--out", p("x.jsonl")}).code, 0);
  EXPECT_NE(cli({"simulate", "--scenario", p("missing.yaml"), "--out", p("x.jsonl")}).code, 0);
  std::ofstream(dir / "bad.yaml") << "sonar:\n  rmx: 3\n";
  const CliRun r = cli({"simulate", "--scenario", p("bad.yaml"), "--out", p("x.jsonl")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("rmx"), std::string::npos) << r.err;
  std::ofstream(dir / "junk.jsonl") << "hello\n";
  const CliRun j = cli({"solve", "--dataset", p("junk.jsonl"), "--out", p("e.jsonl")});
  EXPECT_NE(j.code, 0);
  EXPECT_NE(j.err.find("MalformedDataset"), std::string::npos) << j.err;
  EXPECT_EQ(cli({"--help"}).code, 0);
}
