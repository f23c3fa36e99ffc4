// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

// rvsr: LiDAR range-image super-resolution from the command line.
//
//   rvsr project scan.bin -o lr.rimg [--calib c.json] [--png lr.png]
//   rvsr compensate lr.rimg -o filled.rimg [--window 3x1]
//   rvsr infer filled.rimg -o hr.rimg [--weights w.rvsw | --seed 7] [--scales 4x1]
//   rvsr back-project hr.rimg -o hr.ply [--scales 4x1]
//   rvsr evaluate hr.ply --gt dense.bin [--json-out report.json]
//   rvsr pipeline scan.bin -o hr.ply [--gt dense.bin] [--json-out report.json]
//   rvsr selfcheck [--inject-fault zoh-taylor]
//   rvsr init-weights -o w.rvsw [--seed 7]
//   rvsr make-calib -o c.json --beams 16

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rvsr/io/png.hpp"
#include "rvsr/rvsr.hpp"
#include "rvsr/selfcheck.hpp"

namespace fs = std::filesystem;
using namespace rvsr;

namespace {

/// Parses "AxB" into two positive integers.
std::pair<std::size_t, std::size_t> parse_pair(const std::string& text, const char* flag) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used_a = 0, used_b = 0;
    const std::string a = text.substr(0, x), b = text.substr(x + 1);
    const unsigned long va = std::stoul(a, &used_a);
    const unsigned long vb = std::stoul(b, &used_b);
    if (used_a != a.size() || used_b != b.size() || va == 0 || vb == 0) throw std::invalid_argument(text);
    return {va, vb};
  } catch (const std::logic_error&) {
    throw ConfigError(std::string(flag) + " expects AxB with positive integers, got '" + text + "'");
  }
}

std::vector<std::size_t> parse_depths(const std::string& text) {
  std::vector<std::size_t> depths;
  std::stringstream ss(text);
  std::string item;
  try {
    while (std::getline(ss, item, ',')) {
      std::size_t used = 0;
      depths.push_back(std::stoul(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    }
  } catch (const std::logic_error&) {
    throw ConfigError("--depths expects a comma-separated list such as 2,2,9,2, got '" + text + "'");
  }
  return depths;
}

/// Flags shared by subcommands that build or check a network config.
struct NetworkFlags {
  std::string scales = "4x1";
  std::string depths = "2,2,2,2";
  std::string patch = "1x4";
  std::size_t dim = 16;
  std::size_t state = 8;
  std::uint64_t seed = 0;
  std::string weights;

  std::vector<CLI::Option*> shape_options;

  void add_to(CLI::App& cmd, bool with_weights) {
    shape_options.push_back(cmd.add_option("--scales", scales, "Upscale factors SVxSH")->capture_default_str());
    shape_options.push_back(cmd.add_option("--depths", depths, "VSS blocks per stage")->capture_default_str());
    shape_options.push_back(cmd.add_option("--patch", patch, "Patch size P1xP2")->capture_default_str());
    shape_options.push_back(cmd.add_option("--dim", dim, "Base channel width")->capture_default_str());
    shape_options.push_back(cmd.add_option("--state", state, "SSM state size")->capture_default_str());
    cmd.add_option("--seed", seed, "Seed for generated weights")->capture_default_str();
    if (with_weights) cmd.add_option("--weights", weights, "Weight file; otherwise weights are generated");
  }

  bool shape_given() const {
    for (const CLI::Option* o : shape_options)
      if (o->count() > 0) return true;
    return false;
  }

  model::NetworkConfig config(std::size_t input_h, std::size_t input_w) const {
    model::NetworkConfig cfg;
    cfg.depths = parse_depths(depths);
    std::tie(cfg.upscale_v, cfg.upscale_h) = parse_pair(scales, "--scales");
    std::tie(cfg.patch.v, cfg.patch.h) = parse_pair(patch, "--patch");
    cfg.base_dim = dim;
    cfg.ssm_state = state;
    cfg.input_h = input_h;
    cfg.input_w = input_w;
    cfg.validate();
    return cfg;
  }

  /// Loads --weights or builds seeded weights for an input of the given size.
  std::pair<model::ModelWeights, model::NetworkConfig> resolve(std::size_t input_h, std::size_t input_w) const {
    if (weights.empty()) {
      const model::NetworkConfig cfg = config(input_h, input_w);
      return {model::build(cfg, seed), cfg};
    }
    auto loaded = model::load_weights(weights);
    if (loaded.second.input_h != input_h || loaded.second.input_w != input_w) {
      throw IncompatibleError("'" + weights + "' was built for " + std::to_string(loaded.second.input_h) + "x" +
                                  std::to_string(loaded.second.input_w) + " images, input is " +
                                  std::to_string(input_h) + "x" + std::to_string(input_w),
                              "config.input");
    }
    if (shape_given()) {
      model::NetworkConfig asked = config(loaded.second.input_h, loaded.second.input_w);
      asked.decoder_depth = loaded.second.decoder_depth;
      if (!(asked == loaded.second)) {
        throw IncompatibleError("network flags disagree with the config stored in '" + weights + "'", "config");
      }
    }
    return loaded;
  }
};

geometry::BeamCalibration calibration_or_default(const std::string& path) {
  return path.empty() ? geometry::BeamCalibration::hdl64_like() : io::load_calibration(path);
}

std::optional<geometry::WindowShape> window_from_flag(const std::string& text) {
  if (text == "none") return std::nullopt;
  return geometry::parse_window(text);
}

void report(const std::string& what) { std::cout << what << '\n'; }

std::string describe(const geometry::RangeImage& img) {
  return std::to_string(img.height()) + "x" + std::to_string(img.width()) + ", " + std::to_string(img.valid_count()) +
         " valid pixels";
}

metrics::MetricsReport evaluate_clouds(const geometry::PointCloud& pred, const geometry::PointCloud& gt) {
  return metrics::banded_report(pred, gt);
}

void write_report(const metrics::MetricsReport& r, const std::string& json_out) {
  const std::string text = metrics::to_json(r).dump(2) + "\n";
  if (json_out.empty()) {
    std::cout << text;
  } else {
    io::write_file_atomic(json_out, text);
    report("wrote " + json_out);
  }
}

int run_selfcheck(std::uint64_t seed, const std::string& fault) {
  SelfcheckOptions opts;
  opts.seed = seed;
  if (fault == "zoh-taylor") {
    opts.inject_zoh_fault = true;
  } else if (!fault.empty()) {
    throw ConfigError("unknown fault '" + fault + "' (supported: zoh-taylor)");
  }
  const auto start = std::chrono::steady_clock::now();
  const auto results = rvsr::run_selfcheck(opts);
  std::vector<std::string> failed;
  for (const OracleResult& r : results) {
    std::printf("%s  %-28s %8.3f s  %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds, r.detail.c_str());
    if (!r.passed) failed.push_back(r.name);
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("total %.3f s\n", total);
  if (failed.empty()) return 0;
  std::string names;
  for (const auto& n : failed) names += (names.empty() ? "" : ", ") + n;
  std::fflush(stdout);
  std::fprintf(stderr, "rvsr: selfcheck failed: %s\n", names.c_str());
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LiDAR range-image super-resolution with a state-space U-Net"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rvsr 0.1.0");

  std::string input, output, calib_path, window = "3x1", png, gt, json_out, fault;
  NetworkFlags net;

  // project
  CLI::App* project = app.add_subcommand("project", "Project a scan onto a range image (RIMG)");
  project->add_option("scan", input, "Scan file (.bin kitti-bin, .xyz/.txt xyz-text)")->required();
  project->add_option("-o,--output", output, "Output RIMG file")->required();
  project->add_option("--calib", calib_path, "Calibration JSON (default: 64-beam fan)");
  project->add_option("--png", png, "Also write a 16-bit grayscale PNG");

  // compensate
  CLI::App* compensate = app.add_subcommand("compensate", "Fill holes of a range image");
  compensate->add_option("image", input, "Input RIMG file")->required();
  compensate->add_option("-o,--output", output, "Output RIMG file")->required();
  compensate->add_option("--calib", calib_path, "Calibration JSON (default: 64-beam fan)");
  compensate->add_option("--window", window, "Window shape: 1x3, 3x1 or none")->capture_default_str();
  compensate->add_option("--png", png, "Also write a 16-bit grayscale PNG");

  // infer
  CLI::App* infer = app.add_subcommand("infer", "Super-resolve a range image");
  infer->add_option("image", input, "Input RIMG file")->required();
  infer->add_option("-o,--output", output, "Output RIMG file")->required();
  infer->add_option("--calib", calib_path, "Calibration JSON of the input (default: 64-beam fan)");
  infer->add_option("--png", png, "Also write a 16-bit grayscale PNG");
  net.add_to(*infer, true);

  // back-project
  std::string bp_scales = "1x1";
  CLI::App* back = app.add_subcommand("back-project", "Convert a range image to a PLY point cloud");
  back->add_option("image", input, "Input RIMG file")->required();
  back->add_option("-o,--output", output, "Output PLY file")->required();
  back->add_option("--calib", calib_path, "Calibration JSON of the low-resolution scan (default: 64-beam fan)");
  back->add_option("--scales", bp_scales, "Upscale factors the image was produced with")->capture_default_str();

  // evaluate
  CLI::App* evaluate = app.add_subcommand("evaluate", "Compare a predicted cloud with ground truth");
  evaluate->add_option("prediction", input, "Predicted cloud (.ply, .bin, .xyz, .txt)")->required();
  evaluate->add_option("--gt", gt, "Ground-truth cloud")->required();
  evaluate->add_option("--calib", calib_path, "Grid on which to also report range MAE");
  evaluate->add_option("--json-out", json_out, "Write the report here instead of stdout");

  // pipeline
  CLI::App* pipeline = app.add_subcommand("pipeline", "Scan to super-resolved point cloud in one step");
  pipeline->add_option("scan", input, "Scan file")->required();
  pipeline->add_option("-o,--output", output, "Output PLY file")->required();
  pipeline->add_option("--calib", calib_path, "Calibration JSON (default: 64-beam fan)");
  pipeline->add_option("--window", window, "Window shape: 1x3, 3x1 or none")->capture_default_str();
  pipeline->add_option("--gt", gt, "Ground-truth scan; enables the metrics report");
  pipeline->add_option("--json-out", json_out, "Metrics report path (default: stdout)");
  pipeline->add_option("--png", png, "Also write the super-resolved image as PNG");
  net.add_to(*pipeline, true);

  // selfcheck
  std::uint64_t check_seed = SelfcheckOptions{}.seed;
  CLI::App* selfcheck = app.add_subcommand("selfcheck", "Run every oracle at small sizes");
  selfcheck->add_option("--inject-fault", fault, "Deliberately break a component (zoh-taylor)");
  selfcheck->add_option("--seed", check_seed, "Oracle sampling seed")->capture_default_str();

  // init-weights
  std::size_t init_h = 16, init_w = 1024;
  CLI::App* init = app.add_subcommand("init-weights", "Write a seeded weight file");
  init->add_option("-o,--output", output, "Output weight file")->required();
  init->add_option("--height", init_h, "Input image height")->capture_default_str();
  init->add_option("--width", init_w, "Input image width")->capture_default_str();
  net.add_to(*init, false);

  // make-calib
  std::size_t beams = 64, calib_width = 1024;
  double top_deg = 2.0, bottom_deg = -24.8, r_max = 80.0;
  CLI::App* make_calib = app.add_subcommand("make-calib", "Write a uniform beam-fan calibration");
  make_calib->add_option("-o,--output", output, "Output JSON file")->required();
  make_calib->add_option("--beams", beams, "Beam count")->capture_default_str();
  make_calib->add_option("--top", top_deg, "Top beam angle, degrees")->capture_default_str();
  make_calib->add_option("--bottom", bottom_deg, "Bottom beam angle, degrees")->capture_default_str();
  make_calib->add_option("--width", calib_width, "Columns")->capture_default_str();
  make_calib->add_option("--r-max", r_max, "Maximum range, meters")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*project) {
      const auto calib = calibration_or_default(calib_path);
      const auto img = geometry::project(geometry::load_scan(input), calib);
      io::save_rimg(img, output);
      if (!png.empty()) io::save_png16(img, png);
      report("wrote " + output + " (" + describe(img) + ")");
    } else if (*compensate) {
      const auto w = window_from_flag(window);
      const auto calib = calibration_or_default(calib_path);
      const auto img = geometry::hole_compensate(io::load_rimg(input, calib), w);
      io::save_rimg(img, output);
      if (!png.empty()) io::save_png16(img, png);
      report("wrote " + output + " (" + describe(img) + ")");
    } else if (*infer) {
      const auto calib = calibration_or_default(calib_path);
      const auto img = io::load_rimg(input, calib);
      const auto [weights, cfg] = net.resolve(img.height(), img.width());
      const auto out = model::forward(img, weights, cfg);
      io::save_rimg(out, output);
      if (!png.empty()) io::save_png16(out, png);
      report("wrote " + output + " (" + describe(out) + ")");
    } else if (*back) {
      const auto [sv, sh] = parse_pair(bp_scales, "--scales");
      const auto calib = model::upsample_calibration(calibration_or_default(calib_path), sv, sh);
      const auto cloud = geometry::back_project(io::load_rimg(input, calib));
      io::save_ply(cloud, output);
      report("wrote " + output + " (" + std::to_string(cloud.size()) + " points)");
    } else if (*evaluate) {
      const auto pred = io::load_cloud(input);
      const auto truth = io::load_cloud(gt);
      auto r = evaluate_clouds(pred, truth);
      if (!calib_path.empty()) {
        const auto calib = io::load_calibration(calib_path);
        r.mae = metrics::range_mae(geometry::project(pred, calib), geometry::project(truth, calib));
      }
      write_report(r, json_out);
    } else if (*pipeline) {
      const auto w = window_from_flag(window);
      const auto calib = calibration_or_default(calib_path);
      std::optional<geometry::PointCloud> truth;
      if (!gt.empty()) truth = io::load_cloud(gt);
      const auto lr = geometry::hole_compensate(geometry::project(geometry::load_scan(input), calib), w);
      const auto [weights, cfg] = net.resolve(lr.height(), lr.width());
      const auto hr = model::forward(lr, weights, cfg);
      const auto cloud = geometry::back_project(hr);
      if (!png.empty()) io::save_png16(hr, png);
      io::save_ply(cloud, output);
      report("wrote " + output + " (" + std::to_string(cloud.size()) + " points from " + describe(hr) + ")");
      if (truth) {
        auto r = evaluate_clouds(cloud, *truth);
        r.mae = metrics::range_mae(hr, geometry::project(*truth, hr.calibration()));
        write_report(r, json_out);
      }
    } else if (*selfcheck) {
      return run_selfcheck(check_seed, fault);
    } else if (*init) {
      const model::NetworkConfig cfg = net.config(init_h, init_w);
      const auto weights = model::build(cfg, net.seed);
      model::save_weights(weights, cfg, output);
      report("wrote " + output + " (" + std::to_string(model::parameter_count(weights)) + " parameters)");
    } else if (*make_calib) {
      const auto calib = geometry::BeamCalibration::uniform_fan(beams, top_deg, bottom_deg, r_max, calib_width);
      calib.validate();
      io::save_calibration(calib, output);
      report("wrote " + output);
    }
  } catch (const Error& e) {
    std::cerr << "rvsr: " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "rvsr: io error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "rvsr: error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
