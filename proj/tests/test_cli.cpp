#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "witness/io.hpp"

namespace witness {
namespace {

namespace fs = std::filesystem;

int run(const std::string& args) {
  const std::string cmd = std::string(WITNESS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("witness_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

  fs::path dir_;
};

TEST_F(Cli, CertifyExitCodes) {
  EXPECT_EQ(run("certify --value 0.027 --std-error 0.0039 --out " + path("c")), 0);
  EXPECT_TRUE(fs::exists(path("c/results.json")));
  EXPECT_EQ(run("certify --value 0.027 --std-error 0 --out " + path("d")), 3);
}

TEST_F(Cli, ConfigErrorsExitTwo) {
  write("bad.json", R"({"experiment": "delay-scan", "delay_scan": {"delays": []}})");
  EXPECT_EQ(run("delay-scan --config " + path("bad.json") + " --out " + path("o")), 2);
  write("broken.json", "{ not json");
  EXPECT_EQ(run("delay-scan --config " + path("broken.json") + " --out " + path("o")), 2);
  EXPECT_EQ(run("haar-sweep --config " + path("missing.json")), 2);
  EXPECT_EQ(run("no-such-command"), 2);
}

TEST_F(Cli, DelayScanWritesOutputs) {
  write("scan.json", R"({"experiment": "delay-scan", "regime": "three-partial",
                         "events_per_matrix": 0, "delay_scan": {"delays": [0, 1, 2]}})");
  EXPECT_EQ(run("delay-scan --config " + path("scan.json") + " --out " + path("out") + " --seed 3"), 0);
  for (const char* f : {"manifest.json", "results.csv", "figure.svg"}) EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
  EXPECT_EQ(read_json_file(dir_ / "out" / "manifest.json").at("seed"), 3);
}

TEST_F(Cli, MeshCompileReconstructRoundTrip) {
  const auto u = haar_random(5, 17);
  write_json_file(dir_ / "u.json", to_json(u));
  ASSERT_EQ(run("mesh compile " + path("u.json") + " -o " + path("mesh.json")), 0);
  ASSERT_EQ(run("mesh reconstruct " + path("mesh.json") + " -o " + path("back.json")), 0);
  const auto back = matrix_from_json(read_json_file(dir_ / "back.json"));
  EXPECT_LT((back.entries() - u.entries()).norm(), 1e-10);
}

TEST_F(Cli, NonUnitaryMatrixRejected) {
  write("nonunitary.json", R"({"dim": 2, "re": [[1, 0.5], [0, 1]], "im": [[0, 0], [0, 0]]})");
  EXPECT_EQ(run("mesh compile " + path("nonunitary.json")), 3);
}

TEST_F(Cli, DistributionAndEstimate) {
  write_json_file(dir_ / "u.json", to_json(u_max(3)));
  write_json_file(dir_ / "s.json", to_json(gram_uniform(3, 0.81)));
  EXPECT_EQ(run("distribution " + path("u.json") + " --gram " + path("s.json")), 0);
  const auto dist = output_distribution(u_max(3), gram_uniform(3, 0.81), first_modes(3));
  save_counts(dir_ / "counts.csv", sample_events(dist, 1000, 1), 1, 250.0, DetectorBank::ideal(4));
  EXPECT_EQ(run("estimate " + path("counts.csv") + " --modes 0 1 --resamples 50"), 0);
}

}  // namespace
}  // namespace witness
