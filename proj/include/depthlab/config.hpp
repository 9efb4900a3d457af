#pragma once

#include <cstdint>
#include <string>

#include "depthlab/camera.hpp"
#include "depthlab/grid.hpp"
#include "depthlab/metrics.hpp"
#include "depthlab/optimizer.hpp"
#include "depthlab/synth.hpp"

namespace depthlab {

/// Where the optimizer's disparity map starts.
struct InitSpec {
  enum class Mode { ground_truth, constant, uniform_random };
  Mode mode = Mode::ground_truth;
  double constant = 5.0;
  double lo = 1.0, hi = 15.0;  // uniform_random bounds
};

/// Everything one experiment needs. Parsed from a flat `key = value` text
/// format with dotted section prefixes ('#' starts a comment, blank lines
/// are skipped, later assignments win). Unknown keys are errors — a sweep
/// that misspells a key should die loudly, not silently run the default.
///
/// All randomness flows from the single `seed`: the scene textures and the
/// uniform_random init each draw from their own named substream of it.
struct ExperimentConfig {
  SceneConfig scene;
  StereoRig rig;
  OptConfig opt;
  MetricsConfig metrics;
  InitSpec init;
  int profile_x = 61, profile_y = 47;  // default: inside the occluded band
  std::uint64_t seed = 42;
  std::string output_dir = "out";
};

/// Parse + validate. Throws contract_error with the offending line number
/// on malformed lines, unknown keys, unparseable values, or invariant
/// violations (e.g. opt.d_min >= opt.d_max).
ExperimentConfig parse_config_text(const std::string& text);

/// parse_config_text over the file's contents; throws if unreadable.
ExperimentConfig parse_config_file(const std::string& path);

/// The resolved config, one `key = value` per line, in schema order.
/// parse_config_text(dump_config(c)) reproduces c exactly.
std::string dump_config(const ExperimentConfig& cfg);

/// Materialize the starting disparity map for the optimizer. ground_truth
/// copies gt; uniform_random fills row-major from the "init" substream of
/// seed, so the same seed gives the same start regardless of scene content.
ScalarGrid make_init(const InitSpec& init, const ScalarGrid& gt_disparity,
                     std::uint64_t seed);

}  // namespace depthlab
