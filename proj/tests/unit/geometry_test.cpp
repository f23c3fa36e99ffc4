// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "rvsr/geometry/hole_compensation.hpp"
#include "rvsr/geometry/projection.hpp"
#include "rvsr/geometry/scan_io.hpp"
#include "rvsr/io/binary.hpp"
#include "rvsr/oracles/oracles.hpp"
#include "test_support.hpp"

namespace rvsr::geometry {
namespace {

using rvsr::testing::TempDir;

BeamCalibration two_beams(std::size_t width = 1024) {
  BeamCalibration c;
  c.phi = {0.0, -0.1};
  c.delta = {0.0, 0.0};
  c.width = width;
  return c;
}

TEST(Calibration, Validation) {
  EXPECT_NO_THROW(BeamCalibration::hdl64_like().validate());
  BeamCalibration c = two_beams();
  c.phi = {0.0, 0.1};
  EXPECT_THROW(c.validate(), ConfigError);
  c = two_beams();
  c.delta.push_back(0.0);
  EXPECT_THROW(c.validate(), ConfigError);
  c = two_beams(3);
  EXPECT_THROW(c.validate(), ConfigError);
  c = two_beams();
  c.r_max = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = two_beams();
  c.phi = {0.0};
  c.delta = {0.0};
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Calibration, DefaultFan) {
  const BeamCalibration c = BeamCalibration::hdl64_like();
  EXPECT_EQ(c.height(), 64u);
  EXPECT_NEAR(c.phi.front(), 2.0 * std::numbers::pi / 180.0, 1e-15);
  EXPECT_NEAR(c.phi.back(), -24.8 * std::numbers::pi / 180.0, 1e-15);
  for (double d : c.delta) EXPECT_EQ(d, 0.0);
}

TEST(Project, PointOnBeamZeroLandsMidImage) {
  const RangeImage img = project({{{10.0, 0.0, 0.0}}}, two_beams());
  EXPECT_EQ(img.valid_count(), 1u);
  EXPECT_FLOAT_EQ(img.at(0, 512), 10.0f);
}

TEST(Project, NearestRangeWins) {
  const RangeImage img = project({{{7.0, 0.0, 0.0}, {5.0, 0.0, 0.0}}}, two_beams());
  EXPECT_EQ(img.valid_count(), 1u);
  EXPECT_FLOAT_EQ(img.at(0, 512), 5.0f);
}

TEST(Project, RangeIsMeasuredFromWinningBeamOffset) {
  BeamCalibration c = two_beams();
  c.delta = {1.0, 1.0};
  const RangeImage img = project({{{3.0, 0.0, 5.0}}}, c);
  EXPECT_FLOAT_EQ(img.at(0, 512), 5.0f);
}

TEST(Project, RangeIsClampedToRMax) {
  BeamCalibration c = two_beams();
  c.r_max = 20.0;
  const RangeImage img = project({{{150.0, 0.0, 0.0}}}, c);
  EXPECT_EQ(img.at(0, 512), 20.0f);
  EXPECT_NO_THROW(img.validate());
}

TEST(Project, RejectsNonFinitePointWithIndex) {
  PointCloud cloud{{{1, 0, 0}, {2, 0, 0}, {std::nan(""), 0, 0}}};
  try {
    project(cloud, two_beams());
    FAIL();
  } catch (const InputError& e) {
    ASSERT_TRUE(e.index().has_value());
    EXPECT_EQ(*e.index(), 2u);
  }
}

TEST(Project, RejectsInvalidCalibration) {
  BeamCalibration c = two_beams();
  c.phi = {-0.1, 0.0};
  EXPECT_THROW(project({{{1, 0, 0}}}, c), ConfigError);
}

TEST(Project, EmptyCloudGivesAllHoles) {
  const RangeImage img = project({}, two_beams());
  EXPECT_EQ(img.hole_count(), 2u * 1024u);
}

TEST(Project, RowVoteMatchesBruteForceOracle) {
  Rng rng(7);
  for (const bool uniform : {true, false}) {
    BeamCalibration c = BeamCalibration::hdl64_like();
    if (!uniform) {
      for (double& d : c.delta) d = rng.uniform(-0.2, 0.2);
    }
    for (int i = 0; i < 100; ++i) {
      const Point3 p{rng.uniform(-40, 40), rng.uniform(-40, 40), rng.uniform(-8, 3)};
      EXPECT_EQ(vote_row(p, c), oracles::brute_force_row(p, c)) << "point " << i;
    }
  }
}

TEST(Project, RowAssignmentIsOptimal) {
  Rng rng(11);
  BeamCalibration c = BeamCalibration::uniform_fan(16, 15, -15);
  for (double& d : c.delta) d = rng.uniform(-0.3, 0.3);
  for (int i = 0; i < 500; ++i) {
    const Point3 p{rng.uniform(-30, 30), rng.uniform(-30, 30), rng.uniform(-10, 10)};
    const std::size_t v = vote_row(p, c);
    const double err = std::abs(c.phi[v] - beam_inclination(p, c.delta[v]));
    for (std::size_t b = 0; b < c.height(); ++b) {
      EXPECT_LE(err, std::abs(c.phi[b] - beam_inclination(p, c.delta[b])));
    }
  }
}

TEST(Project, ColumnMapIsSurjective) {
  Rng rng(3);
  const std::size_t width = 64;
  std::set<std::size_t> cols;
  for (int i = 0; i < 20000; ++i) {
    const double yaw = rng.uniform(-std::numbers::pi, std::numbers::pi);
    cols.insert(azimuth_column({std::cos(yaw), std::sin(yaw), 0.0}, width));
  }
  EXPECT_EQ(cols.size(), width);
  EXPECT_EQ(*cols.begin(), 0u);
  EXPECT_EQ(*cols.rbegin(), width - 1);
}

TEST(BackProject, InvertsTheMidColumn) {
  RangeImage img(two_beams());
  img.at(0, 511) = 10.0f;
  const PointCloud cloud = back_project(img);
  ASSERT_EQ(cloud.size(), 1u);
  const Point3& p = cloud.points[0];
  EXPECT_NEAR(std::hypot(p.x, p.y), 10.0, 1e-9);
  EXPECT_LE(std::abs(std::atan2(p.y, p.x)), std::numbers::pi / 1024.0 + 1e-12);
  EXPECT_NEAR(p.z, 0.0, 1e-12);
}

TEST(BackProject, AllHolesGiveEmptyCloud) { EXPECT_TRUE(back_project(RangeImage(two_beams())).empty()); }

TEST(BackProject, RoundTripWithinQuantizationBounds) {
  Rng rng(5);
  const BeamCalibration c = BeamCalibration::hdl64_like();
  const double top = c.phi.front(), bottom = c.phi.back();
  for (int i = 0; i < 500; ++i) {
    const double yaw = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const double pitch = rng.uniform(bottom, top);
    const double r = rng.uniform(1.0, 79.0);
    const Point3 p{r * std::cos(pitch) * std::cos(yaw), r * std::cos(pitch) * std::sin(yaw), r * std::sin(pitch)};
    const PointCloud back = back_project(project({{p}}, c));
    ASSERT_EQ(back.size(), 1u);
    const Point3& q = back.points[0];
    EXPECT_LE(std::abs(std::remainder(std::atan2(q.y, q.x) - yaw, 2 * std::numbers::pi)),
              std::numbers::pi / 1024.0 + 1e-12);
    EXPECT_LE(std::abs(std::atan2(q.z, std::hypot(q.x, q.y)) - pitch), c.max_beam_gap());
    EXPECT_LE(std::abs(std::sqrt(squared_distance(q, {})) - r), 1e-5);
  }
}

TEST(BackProject, OffsetRoundTripWithinOffsetBound) {
  Rng rng(9);
  BeamCalibration c = BeamCalibration::uniform_fan(32, 10, -20);
  for (double& d : c.delta) d = rng.uniform(-0.1, 0.1);
  for (int i = 0; i < 200; ++i) {
    const double yaw = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const double pitch = rng.uniform(c.phi.back(), c.phi.front());
    const double r = rng.uniform(2.0, 70.0);
    const Point3 p{r * std::cos(pitch) * std::cos(yaw), r * std::cos(pitch) * std::sin(yaw), r * std::sin(pitch)};
    const std::size_t row = vote_row(p, c);
    const PointCloud back = back_project(project({{p}}, c));
    ASSERT_EQ(back.size(), 1u);
    EXPECT_LE(std::abs(std::sqrt(squared_distance(back.points[0], {})) - r), 2.0 * std::abs(c.delta[row]) + 1e-5);
  }
}

// Hole compensation ---------------------------------------------------------

RangeImage grid(std::size_t h, std::size_t w, std::initializer_list<float> values) {
  BeamCalibration c = BeamCalibration::uniform_fan(h, 0.0, -static_cast<double>(h), 80.0, w);
  return RangeImage(c, std::vector<float>(values));
}

constexpr float H = RangeImage::kHole;

TEST(HoleCompensate, VerticalMeanOfTwoNeighbors) {
  const RangeImage img = grid(3, 4, {4, 4, 4, 4, 9, H, 9, 9, 6, 6, 6, 6});
  const RangeImage out = hole_compensate(img, WindowShape::kVertical3x1);
  EXPECT_EQ(out.at(1, 1), 5.0f);
  EXPECT_EQ(hole_compensate(img, WindowShape::kHorizontal1x3).at(1, 1), 9.0f);
}

TEST(HoleCompensate, NoHolesIsBitIdentical) {
  const RangeImage img = grid(2, 4, {1.5f, 2.25f, 3, 4, 5, 6, 7, 8.125f});
  const RangeImage out = hole_compensate(img, WindowShape::kVertical3x1);
  EXPECT_EQ(std::memcmp(out.values().data(), img.values().data(), img.values().size_bytes()), 0);
}

TEST(HoleCompensate, IsolatedHoleStays) {
  const RangeImage img = grid(3, 4, {1, H, 1, 1, 1, H, 1, 1, 1, H, 1, 1});
  const RangeImage out = hole_compensate(img, WindowShape::kVertical3x1);
  EXPECT_TRUE(out.is_hole(1, 1));
  EXPECT_TRUE(out.is_hole(0, 1));
}

TEST(HoleCompensate, ReadsOnlyFromInput) {
  // Without cascading the hole at (0,0) has only a hole to its right.
  const RangeImage img = grid(2, 4, {H, H, 8, 8, 1, 1, 1, 1});
  const RangeImage out = hole_compensate(img, WindowShape::kHorizontal1x3);
  EXPECT_TRUE(out.is_hole(0, 0));
  EXPECT_EQ(out.at(0, 1), 8.0f);
}

TEST(HoleCompensate, NoAzimuthWrap) {
  const RangeImage img = grid(2, 4, {H, 2, 3, 10, 1, 1, 1, 1});
  EXPECT_EQ(hole_compensate(img, WindowShape::kHorizontal1x3).at(0, 0), 2.0f);
}

TEST(HoleCompensate, InvariantsOnRandomImages) {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    RangeImage img(BeamCalibration::uniform_fan(16, 2, -24.8, 80.0, 64));
    for (float& v : img.values()) v = rng.uniform() < 0.3 ? H : static_cast<float>(rng.uniform(1, 79));
    for (const WindowShape w : {WindowShape::kVertical3x1, WindowShape::kHorizontal1x3}) {
      const RangeImage out = hole_compensate(img, w);
      EXPECT_LE(out.hole_count(), img.hole_count());
      for (std::size_t i = 0; i < img.values().size(); ++i) {
        if (!std::isnan(img.values()[i])) {
          EXPECT_EQ(out.values()[i], img.values()[i]);
        }
      }
    }
  }
}

TEST(HoleCompensate, IdempotentWhenHolesHaveNoValidNeighbors) {
  const RangeImage img = grid(3, 4, {1, H, 1, 1, 1, H, 1, 1, 1, H, 1, 1});
  const RangeImage once = hole_compensate(img, WindowShape::kVertical3x1);
  const RangeImage twice = hole_compensate(once, WindowShape::kVertical3x1);
  EXPECT_EQ(std::memcmp(once.values().data(), twice.values().data(), once.values().size_bytes()), 0);
}

TEST(HoleCompensate, WindowParsing) {
  EXPECT_EQ(parse_window("3x1"), WindowShape::kVertical3x1);
  EXPECT_EQ(parse_window("1x3"), WindowShape::kHorizontal1x3);
  EXPECT_THROW(parse_window("5x1"), ConfigError);
  EXPECT_THROW(parse_window(""), ConfigError);
}

// Scan loading ----------------------------------------------------------------

void write_bytes(const std::filesystem::path& p, const io::Bytes& bytes) {
  std::ofstream(p, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                           static_cast<std::streamsize>(bytes.size()));
}

TEST(LoadScan, TwoKittiRecords) {
  TempDir dir("scan");
  io::Bytes bytes;
  for (float v : {1.0f, 2.0f, 3.0f, 0.5f, 4.0f, 5.0f, 6.0f, 0.1f}) io::put_f32(bytes, v);
  ASSERT_EQ(bytes.size(), 32u);
  write_bytes(dir / "two.bin", bytes);
  const PointCloud c = load_scan(dir / "two.bin");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.points[0].x, 1.0);
  EXPECT_EQ(c.points[0].z, 3.0);
  EXPECT_EQ(c.points[1].y, 5.0);
  EXPECT_EQ(c.points[1].z, 6.0);
}

TEST(LoadScan, EmptyFileIsEmptyCloud) {
  TempDir dir("scan_empty");
  write_bytes(dir / "empty.bin", {});
  EXPECT_TRUE(load_scan(dir / "empty.bin").empty());
}

TEST(LoadScan, TruncatedRecordReportsOffset) {
  TempDir dir("scan_trunc");
  write_bytes(dir / "t.bin", io::Bytes(33, 0));
  try {
    load_scan(dir / "t.bin");
    FAIL();
  } catch (const ParseError& e) {
    ASSERT_TRUE(e.offset().has_value());
    EXPECT_EQ(*e.offset(), 32u);
  }
}

TEST(LoadScan, NonFiniteIsInputError) {
  io::Bytes bytes;
  for (float v : {1.0f, std::numeric_limits<float>::infinity(), 3.0f, 0.0f}) io::put_f32(bytes, v);
  EXPECT_THROW(parse_kitti_bin(bytes), InputError);
  EXPECT_THROW(parse_xyz_text("1 2 nan\n"), InputError);
}

TEST(LoadScan, XyzText) {
  const PointCloud c = parse_xyz_text("# header\n1 2 3\n\n  -4.5\t5 6e1  \n");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.points[1].x, -4.5);
  EXPECT_EQ(c.points[1].z, 60.0);
  EXPECT_THROW(parse_xyz_text("1 2\n"), ParseError);
  EXPECT_THROW(parse_xyz_text("1 2 x\n"), ParseError);
}

TEST(LoadScan, FormatFromExtension) {
  EXPECT_EQ(scan_format_from_path("a.bin"), ScanFormat::kKittiBin);
  EXPECT_EQ(scan_format_from_path("a.xyz"), ScanFormat::kXyzText);
  EXPECT_EQ(scan_format_from_path("a.txt"), ScanFormat::kXyzText);
  EXPECT_THROW(scan_format_from_path("a.pcd"), ConfigError);
}

TEST(LoadScan, KittiEncodeRoundTrip) {
  const PointCloud c{{{1.5, -2, 3}, {0, 0, 0.25}}};
  const PointCloud back = parse_kitti_bin(encode_kitti_bin(c, 0.7f));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.points[0].y, -2.0);
  EXPECT_EQ(back.points[1].z, 0.25);
}

}  // namespace
}  // namespace rvsr::geometry
