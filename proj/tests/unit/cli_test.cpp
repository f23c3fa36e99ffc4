// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "rvsr/io/binary.hpp"
#include "rvsr/io/calibration.hpp"
#include "rvsr/io/ply.hpp"
#include "rvsr/io/rimg.hpp"
#include "test_support.hpp"

namespace rvsr {
namespace {

namespace fs = std::filesystem;
using rvsr::testing::TempDir;

const std::string kCli = RVSR_CLI;
const fs::path kData = RVSR_TEST_DATA;

class Cli : public ::testing::Test {
 protected:
  TempDir dir{::testing::UnitTest::GetInstance()->current_test_info()->name()};

  /// Runs the tool with `args`; stdout and stderr land in log().
  int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " >" + (dir / "log.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string log() const {
    std::ifstream in(dir / "log.txt");
    return {std::istreambuf_iterator<char>(in), {}};
  }

  std::string path(const std::string& name) const { return (dir / name).string(); }
  static std::string data(const std::string& name) { return (kData / name).string(); }
  static std::string calib16() { return "--calib " + data("calib16.json"); }
};

TEST_F(Cli, TwoPointScanGivesTwoValidPixels) {
  ASSERT_EQ(run("project " + data("two_points.xyz") + " " + calib16() + " -o " + path("two.rimg")), 0) << log();
  const auto img = io::load_rimg(path("two.rimg"), io::load_calibration(data("calib16.json")));
  EXPECT_EQ(img.valid_count(), 2u);
}

TEST_F(Cli, MissingCalibrationExitsThree) {
  EXPECT_EQ(run("project " + data("two_points.xyz") + " --calib " + path("nope.json") + " -o " + path("x.rimg")), 3);
  EXPECT_NE(log().find("config error"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("x.rimg")));
}

TEST_F(Cli, GoldenRimgIsByteIdentical) {
  ASSERT_EQ(run("project " + data("synthetic_500.bin") + " " + calib16() + " -o " + path("a.rimg")), 0) << log();
  EXPECT_EQ(io::read_file(path("a.rimg")), io::read_file(data("synthetic_500.golden.rimg")));
}

TEST_F(Cli, TruncatedScanExitsTwo) {
  io::write_file_atomic(path("bad.bin"), io::Bytes(33, 0));
  EXPECT_EQ(run("project " + path("bad.bin") + " " + calib16() + " -o " + path("x.rimg")), 2);
  EXPECT_NE(log().find("offset 32"), std::string::npos) << log();
}

TEST_F(Cli, UnsupportedWindowExitsThree) {
  ASSERT_EQ(run("project " + data("synthetic_500.bin") + " " + calib16() + " -o " + path("a.rimg")), 0);
  EXPECT_EQ(run("compensate " + path("a.rimg") + " " + calib16() + " --window 5x5 -o " + path("b.rimg")), 3);
}

TEST_F(Cli, UsageErrorExitsTwo) { EXPECT_EQ(run("project"), 2); }

TEST_F(Cli, PipelineIsBoundedAndDeterministic) {
  const std::string args = "pipeline " + data("synthetic_500.bin") + " " + calib16() + " --seed 3 -o ";
  ASSERT_EQ(run(args + path("a.ply")), 0) << log();
  ASSERT_EQ(run(args + path("b.ply")), 0) << log();
  const auto cloud = io::load_ply(path("a.ply"));
  EXPECT_GT(cloud.size(), 0u);
  EXPECT_LE(cloud.size(), 64u * 1024u);
  EXPECT_EQ(io::fnv1a64(io::read_file(path("a.ply"))), io::fnv1a64(io::read_file(path("b.ply"))));
}

TEST_F(Cli, PipelineEqualsStepByStepCommands) {
  ASSERT_EQ(run("pipeline " + data("synthetic_500.bin") + " " + calib16() + " --seed 5 -o " + path("p.ply")), 0);
  ASSERT_EQ(run("project " + data("synthetic_500.bin") + " " + calib16() + " -o " + path("1.rimg")), 0);
  ASSERT_EQ(run("compensate " + path("1.rimg") + " " + calib16() + " -o " + path("2.rimg")), 0);
  ASSERT_EQ(run("infer " + path("2.rimg") + " " + calib16() + " --seed 5 -o " + path("3.rimg")), 0) << log();
  ASSERT_EQ(run("back-project " + path("3.rimg") + " " + calib16() + " --scales 4x1 -o " + path("s.ply")), 0);
  EXPECT_EQ(io::read_file(path("p.ply")), io::read_file(path("s.ply")));
}

TEST_F(Cli, PipelineWithGroundTruthWritesReport) {
  ASSERT_EQ(run("pipeline " + data("synthetic_500.bin") + " " + calib16() + " --gt " + data("synthetic_500.bin") +
                " --json-out " + path("r.json") + " -o " + path("p.ply")),
            0)
      << log();
  const auto bytes = io::read_file(path("r.json"));
  const nlohmann::json j = nlohmann::json::parse(bytes.begin(), bytes.end());
  for (const char* key : {"cd", "iou", "mae"}) {
    ASSERT_TRUE(j[key].is_number()) << key;
    EXPECT_TRUE(std::isfinite(j[key].get<double>())) << key;
  }
  EXPECT_EQ(j["bands"].size(), 5u);
}

TEST_F(Cli, EvaluateIdenticalClouds) {
  ASSERT_EQ(run("evaluate " + data("synthetic_500.bin") + " --gt " + data("synthetic_500.bin") + " " + calib16() +
                " --json-out " + path("r.json")),
            0)
      << log();
  const auto bytes = io::read_file(path("r.json"));
  const nlohmann::json j = nlohmann::json::parse(bytes.begin(), bytes.end());
  EXPECT_EQ(j["cd"].get<double>(), 0.0);
  EXPECT_EQ(j["iou"].get<double>(), 1.0);
  EXPECT_EQ(j["mae"].get<double>(), 0.0);
}

TEST_F(Cli, WeightFileMatchesSeededWeights) {
  ASSERT_EQ(run("init-weights --seed 9 -o " + path("w.rvsw")), 0) << log();
  const std::string base = "pipeline " + data("synthetic_500.bin") + " " + calib16();
  ASSERT_EQ(run(base + " --weights " + path("w.rvsw") + " -o " + path("a.ply")), 0) << log();
  ASSERT_EQ(run(base + " --seed 9 -o " + path("b.ply")), 0) << log();
  EXPECT_EQ(io::read_file(path("a.ply")), io::read_file(path("b.ply")));
  EXPECT_EQ(run(base + " --weights " + path("w.rvsw") + " --dim 8 -o " + path("c.ply")), 5);
}

TEST_F(Cli, CorruptWeightsExitFiveWithoutOutput) {
  ASSERT_EQ(run("init-weights --seed 1 -o " + path("w.rvsw")), 0);
  io::Bytes bytes = io::read_file(path("w.rvsw"));
  bytes[bytes.size() / 2] ^= 0xff;
  io::write_file_atomic(path("w.rvsw"), bytes);
  EXPECT_EQ(run("pipeline " + data("synthetic_500.bin") + " " + calib16() + " --weights " + path("w.rvsw") + " -o " +
                path("out.ply")),
            5);
  EXPECT_NE(log().find("checksum"), std::string::npos);
  EXPECT_FALSE(fs::exists(path("out.ply")));
}

TEST_F(Cli, IncompatibleWeightsExitFive) {
  ASSERT_EQ(run("init-weights --height 8 -o " + path("w.rvsw")), 0);
  EXPECT_EQ(run("pipeline " + data("synthetic_500.bin") + " " + calib16() + " --weights " + path("w.rvsw") + " -o " +
                path("out.ply")),
            5);
  EXPECT_NE(log().find("built for 8x1024"), std::string::npos) << log();
}

TEST_F(Cli, NonFiniteActivationExitsFour) {
  ASSERT_EQ(run("init-weights -o " + path("w.rvsw")), 0);
  io::Bytes bytes = io::read_file(path("w.rvsw"));
  const std::size_t payload = 16 + io::get_le<std::uint64_t>(bytes, 8);
  io::Bytes inf;
  io::put_f32(inf, std::numeric_limits<float>::infinity());
  std::copy(inf.begin(), inf.end(), bytes.begin() + static_cast<long>(payload));
  bytes.resize(bytes.size() - 8);
  io::put_le(bytes, io::fnv1a64(bytes));
  io::write_file_atomic(path("w.rvsw"), bytes);
  EXPECT_EQ(run("pipeline " + data("synthetic_500.bin") + " " + calib16() + " --weights " + path("w.rvsw") + " -o " +
                path("out.ply")),
            4);
  EXPECT_NE(log().find("decoder.0"), std::string::npos) << log();
}

TEST_F(Cli, SelfcheckPassesAndFaultIsNamed) {
  EXPECT_EQ(run("selfcheck"), 0) << log();
  EXPECT_NE(log().find("total"), std::string::npos);
  EXPECT_EQ(run("selfcheck --inject-fault zoh-taylor"), 1);
  EXPECT_NE(log().find("selfcheck failed: zoh-discretization-vs-ode"), std::string::npos) << log();
}

TEST_F(Cli, PngExport) {
  ASSERT_EQ(run("project " + data("synthetic_500.bin") + " " + calib16() + " -o " + path("a.rimg") + " --png " +
                path("a.png")),
            0);
  EXPECT_GT(fs::file_size(path("a.png")), 8u);
}

}  // namespace
}  // namespace rvsr
