// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "rvsr/model/config.hpp"
#include "rvsr/model/network.hpp"
#include "rvsr/model/weight_io.hpp"
#include "rvsr/model/weights.hpp"
#include "test_support.hpp"

namespace rvsr::model {
namespace {

NetworkConfig small_test_config() {
  NetworkConfig cfg;
  cfg.depths = {1, 1};
  cfg.base_dim = 8;
  cfg.ssm_state = 4;
  cfg.input_h = 8;
  cfg.input_w = 32;
  return cfg;
}

geometry::RangeImage random_image(Rng& rng, std::size_t h, std::size_t w, double hole_fraction = 0.2) {
  geometry::RangeImage img(geometry::BeamCalibration::uniform_fan(h, 2.0, -24.8, 80.0, w));
  for (float& v : img.values()) {
    v = rng.uniform() < hole_fraction ? geometry::RangeImage::kHole : static_cast<float>(rng.uniform(1.0, 79.0));
  }
  return img;
}

std::set<std::string> keys(const ModelWeights& w) {
  std::set<std::string> out;
  for (const auto& [k, v] : w) out.insert(k);
  return out;
}

TEST(Config, Validation) {
  EXPECT_NO_THROW(tiny_config().validate());
  NetworkConfig cfg = tiny_config();
  cfg.input_h = 12;
  cfg.input_w = 1000;
  try {
    cfg.validate();
    FAIL();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("input height 12"), std::string::npos);
    EXPECT_NE(msg.find("input width 1000"), std::string::npos);
  }
  cfg = tiny_config();
  cfg.depths = {2};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.depths = {2, 0};
  EXPECT_THROW(cfg.validate(), ConfigError);
  EXPECT_THROW(build(cfg, 1), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  NetworkConfig cfg = large_config();
  cfg.upscale_h = 2;
  EXPECT_EQ(config_from_json(config_to_json(cfg)), cfg);
  EXPECT_THROW(config_from_json(nlohmann::json{{"depths", "x"}}), IncompatibleError);
}

TEST(Build, DeterministicPerSeed) {
  const NetworkConfig cfg = small_test_config();
  EXPECT_EQ(checksum(build(cfg, 7)), checksum(build(cfg, 7)));
  EXPECT_EQ(build(cfg, 7), build(cfg, 7));
  EXPECT_NE(checksum(build(cfg, 7)), checksum(build(cfg, 8)));
}

TEST(Build, DeeperThirdStageAddsSevenBlocks) {
  NetworkConfig a = tiny_config(), b = tiny_config();
  b.depths = {2, 2, 9, 2};
  const auto ka = keys(build(a, 1)), kb = keys(build(b, 1));
  std::vector<std::string> diff;
  std::set_symmetric_difference(ka.begin(), ka.end(), kb.begin(), kb.end(), std::back_inserter(diff));
  ASSERT_EQ(diff.size(), 7u);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(std::count(diff.begin(), diff.end(), encoder_block_path(2, 2 + i)), 1);
}

TEST(Build, ParameterCountOrdering) {
  const std::size_t t = parameter_count(build(tiny_config(), 1));
  const std::size_t s = parameter_count(build(small_config(), 1));
  const std::size_t m = parameter_count(build(medium_config(), 1));
  const std::size_t l = parameter_count(build(large_config(), 1));
  EXPECT_LT(t, s);
  EXPECT_LT(s, m);
  EXPECT_LT(m, l);
}

TEST(Build, InitializerConventions) {
  const ModelWeights w = build(small_test_config(), 3);
  const nn::BlockWeights& blk = w.at(encoder_block_path(0, 0));
  for (float v : blk.get("norm1.scale").data()) EXPECT_EQ(v, 1.0f);
  for (float v : blk.get("norm1.offset").data()) EXPECT_EQ(v, 0.0f);
  const Tensor& a = blk.get("ss2d.0.a");
  for (std::size_t c = 0; c < a.dim(0); ++c)
    for (std::size_t n = 0; n < a.dim(1); ++n) EXPECT_EQ(a(c, n), -static_cast<float>(n + 1));
  for (float v : blk.get("ss2d.0.dt.bias").data()) {
    const double dt = ssm::softplus(v);
    EXPECT_GE(dt, 0.01 - 1e-6);
    EXPECT_LE(dt, 0.1 + 1e-6);
  }
  const Tensor& fc1 = blk.get("ffn.fc1.weight");
  const double bound = 1.0 / std::sqrt(static_cast<double>(fc1.dim(1)));
  for (float v : fc1.data()) EXPECT_LE(std::abs(v), bound);
}

TEST(Calibration, UpsampledBeams) {
  const auto src = geometry::BeamCalibration::uniform_fan(16, 2.0, -24.8);
  const auto out = upsample_calibration(src, 4, 1);
  ASSERT_EQ(out.height(), 64u);
  EXPECT_EQ(out.width, src.width);
  EXPECT_NO_THROW(out.validate());
  for (std::size_t b = 0; b < 16; ++b) EXPECT_NEAR(out.phi[4 * b], src.phi[b], 1e-15);
  EXPECT_NEAR(out.phi[2], 0.5 * (src.phi[0] + src.phi[1]), 1e-15);
  EXPECT_NEAR(out.phi[63] - out.phi[62], (src.phi[15] - src.phi[14]) / 4.0, 1e-12);
  EXPECT_EQ(upsample_calibration(src, 1, 2).width, 2048u);
}

TEST(Forward, SixteenToSixtyFour) {
  Rng rng(1);
  const NetworkConfig cfg = tiny_config();
  const auto img = random_image(rng, 16, 1024);
  const auto out = forward(img, build(cfg, 1), cfg);
  EXPECT_EQ(out.height(), 64u);
  EXPECT_EQ(out.width(), 1024u);
  EXPECT_EQ(out.valid_count(), 64u * 1024u);
  EXPECT_NO_THROW(out.validate());
}

TEST(Forward, EightToThirtyTwo) {
  Rng rng(2);
  NetworkConfig cfg = tiny_config();
  cfg.input_h = 8;
  cfg.depths = {1, 1, 1, 1};
  cfg.base_dim = 8;
  const auto out = forward(random_image(rng, 8, 1024), build(cfg, 1), cfg);
  EXPECT_EQ(out.height(), 32u);
  EXPECT_EQ(out.width(), 1024u);
}

TEST(Forward, TinyConfigIsFiniteAndDeterministic) {
  Rng rng(3);
  const NetworkConfig cfg = small_test_config();
  const auto img = random_image(rng, 8, 32);
  const auto w = build(cfg, 5);
  const auto a = forward(img, w, cfg), b = forward(img, w, cfg);
  EXPECT_EQ(a.height(), 32u);
  EXPECT_EQ(a.width(), 32u);
  for (float v : a.values()) EXPECT_TRUE(std::isfinite(v));
  EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
}

TEST(Forward, ShapeContractOverConfigGrid) {
  Rng rng(4);
  for (std::size_t stages : {2, 3})
    for (std::size_t sv : {1, 2, 4})
      for (std::size_t sh : {1, 2})
        for (std::size_t pv : {1, 2}) {
          NetworkConfig cfg;
          cfg.depths.assign(stages, 1);
          cfg.base_dim = 4;
          cfg.ssm_state = 2;
          cfg.patch = {pv, 2};
          cfg.upscale_v = sv;
          cfg.upscale_h = sh;
          cfg.input_h = pv * 4;
          cfg.input_w = 16;
          const auto out = forward(random_image(rng, cfg.input_h, cfg.input_w), build(cfg, 1), cfg);
          EXPECT_EQ(out.height(), sv * cfg.input_h);
          EXPECT_EQ(out.width(), sh * cfg.input_w);
        }
}

TEST(Forward, OutputWithinClampRange) {
  Rng rng(5);
  NetworkConfig cfg = small_test_config();
  ModelWeights w = build(cfg, 6);
  // Push the head far negative and far positive to exercise both clamp ends.
  for (const float bias : {-1e4f, 1e4f}) {
    w.at("head.out").get("bias").fill(bias);
    const auto out = forward(random_image(rng, 8, 32), w, cfg);
    for (float v : out.values()) {
      EXPECT_GT(v, 0.0f);
      EXPECT_LE(v, 80.0f);
    }
    const float expect = bias < 0 ? geometry::stored_range(min_output_range(80.0), 80.0) : 80.0f;
    EXPECT_EQ(out.values()[0], expect);
  }
}

TEST(Forward, ProbeCountsEveryBlock) {
  Rng rng(6);
  const NetworkConfig cfg = small_test_config();
  nn::ForwardProbe probe;
  forward(random_image(rng, 8, 32), build(cfg, 1), cfg, &probe);
  EXPECT_EQ(probe.ss2d_calls, 1u + 1u + cfg.decoder_depth);
}

TEST(Forward, ImageSizeMismatchIsConfigError) {
  Rng rng(7);
  const NetworkConfig cfg = small_test_config();
  EXPECT_THROW(forward(random_image(rng, 16, 32), build(cfg, 1), cfg), ConfigError);
}

TEST(Forward, WeightConfigMismatchIsIncompatible) {
  Rng rng(8);
  const NetworkConfig cfg = small_test_config();
  NetworkConfig other = cfg;
  other.base_dim = 4;
  EXPECT_THROW(forward(random_image(rng, 8, 32), build(other, 1), cfg), IncompatibleError);
}

TEST(Forward, NonFiniteActivationNamesBlock) {
  Rng rng(9);
  const NetworkConfig cfg = small_test_config();
  ModelWeights w = build(cfg, 1);
  w.at(encoder_block_path(1, 0)).get("out.bias").fill(std::numeric_limits<float>::infinity());
  try {
    forward(random_image(rng, 8, 32), w, cfg);
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_EQ(e.block_path(), encoder_block_path(1, 0));
  }
}

// Weight files ----------------------------------------------------------------

TEST(WeightIo, RoundTripIsBitExact) {
  rvsr::testing::TempDir dir("weights");
  const NetworkConfig cfg = small_test_config();
  const ModelWeights w = build(cfg, 11);
  save_weights(w, cfg, dir / "w.rvsw");
  const auto [loaded, loaded_cfg] = load_weights(dir / "w.rvsw");
  EXPECT_EQ(loaded_cfg, cfg);
  EXPECT_EQ(loaded, w);
  EXPECT_EQ(checksum(loaded), checksum(w));
  EXPECT_FALSE(std::filesystem::exists(dir / "w.rvsw.tmp"));
}

TEST(WeightIo, TruncationIsCorruption) {
  const NetworkConfig cfg = small_test_config();
  const io::Bytes bytes = encode_weights(build(cfg, 1), cfg);
  for (std::size_t cut : {std::size_t{1}, std::size_t{4}, bytes.size() / 2, bytes.size() - 3}) {
    const io::Bytes truncated(bytes.begin(), bytes.end() - static_cast<std::ptrdiff_t>(cut));
    EXPECT_THROW(decode_weights(truncated), CorruptionError) << "cut " << cut;
  }
}

TEST(WeightIo, EveryByteFlipIsDetected) {
  NetworkConfig cfg = small_test_config();
  cfg.depths = {1, 1};
  cfg.base_dim = 2;
  cfg.ssm_state = 1;
  const io::Bytes bytes = encode_weights(build(cfg, 1), cfg);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    io::Bytes bad = bytes;
    bad[i] ^= 0x5a;
    EXPECT_THROW(decode_weights(bad), CorruptionError) << "byte " << i;
  }
}

// Rewrites a valid file without tensor `drop`, fixing up payload and checksum.
io::Bytes drop_tensor(const io::Bytes& bytes, std::size_t drop, std::string& dropped_name) {
  const std::uint64_t len = io::get_le<std::uint64_t>(bytes, 8);
  nlohmann::json manifest = nlohmann::json::parse(bytes.begin() + 16, bytes.begin() + 16 + static_cast<long>(len));
  std::size_t offset = 16 + len;
  for (std::size_t i = 0; i < drop; ++i) offset += 4 * element_count(manifest["tensors"][i]["shape"].get<Shape>());
  const std::size_t count = 4 * element_count(manifest["tensors"][drop]["shape"].get<Shape>());
  dropped_name = manifest["tensors"][drop]["name"].get<std::string>();
  manifest["tensors"].erase(drop);
  const std::string text = manifest.dump();

  io::Bytes out(bytes.begin(), bytes.begin() + 8);
  io::put_le(out, static_cast<std::uint64_t>(text.size()));
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), bytes.begin() + 16 + static_cast<long>(len), bytes.begin() + static_cast<long>(offset));
  out.insert(out.end(), bytes.begin() + static_cast<long>(offset + count), bytes.end() - 8);
  io::put_le(out, io::fnv1a64(out));
  return out;
}

TEST(WeightIo, DroppedTensorIsIncompatibleAndNamed) {
  const NetworkConfig cfg = small_test_config();
  const io::Bytes bytes = encode_weights(build(cfg, 1), cfg);
  for (std::size_t drop : {std::size_t{0}, std::size_t{5}, std::size_t{40}}) {
    std::string name;
    const io::Bytes edited = drop_tensor(bytes, drop, name);
    try {
      decode_weights(edited);
      FAIL() << "drop " << name;
    } catch (const IncompatibleError& e) {
      EXPECT_EQ(e.key(), name);
      EXPECT_NE(std::string(e.what()).find(name), std::string::npos);
    }
  }
}

TEST(WeightIo, EncodeRejectsMismatchedWeights) {
  const NetworkConfig cfg = small_test_config();
  ModelWeights w = build(cfg, 1);
  w.erase("head.out");
  EXPECT_THROW(encode_weights(w, cfg), IncompatibleError);
}

TEST(WeightIo, MissingFileIsIoError) { EXPECT_THROW(load_weights("/nonexistent/w.rvsw"), IoError); }

}  // namespace
}  // namespace rvsr::model
