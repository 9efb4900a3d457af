#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "depthlab/commands.hpp"
#include "depthlab/config.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;  // -1: keep the config's seed
  int snapshot_every = -1;
};

// Config file first, then flag overrides. The seed override re-drives the
// scene substreams exactly as if the file had said so.
depthlab::ExperimentConfig resolve(const CommonOpts& opts) {
  depthlab::ExperimentConfig cfg = opts.config_path.empty()
                                       ? depthlab::parse_config_text("")
                                       : depthlab::parse_config_file(opts.config_path);
  if (!opts.out_dir.empty()) cfg.output_dir = opts.out_dir;
  if (opts.seed >= 0) {
    cfg.seed = static_cast<std::uint64_t>(opts.seed);
    cfg.scene.seed = cfg.seed;
  }
  if (opts.snapshot_every >= 0) cfg.opt.snapshot_every = opts.snapshot_every;
  return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "Experiment config file (key = value lines)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", opts.out_dir, "Output directory (overrides config output_dir)");
  cmd->add_option("--seed", opts.seed, "Master seed (overrides config seed)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--snapshot-every", opts.snapshot_every,
                  "Write a disparity PFM every N steps (0 disables)")
      ->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stereo depth loss lab: synthetic scenes, loss landscapes, descent experiments"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::vector<std::string> metric_files;
  int profile_x = -1, profile_y = -1;

  CLI::App* synth = app.add_subcommand("synth", "Render the scene and its ground truth");
  add_common(synth, opts);

  CLI::App* profile =
      app.add_subcommand("profile", "Photometric error vs disparity at one pixel");
  add_common(profile, opts);
  profile->add_option("--x", profile_x, "Pixel x (overrides config profile.x)")
      ->check(CLI::NonNegativeNumber);
  profile->add_option("--y", profile_y, "Pixel y (overrides config profile.y)")
      ->check(CLI::NonNegativeNumber);

  CLI::App* optimize = app.add_subcommand("optimize", "Gradient descent on the disparity map");
  add_common(optimize, opts);

  CLI::App* metrics = app.add_subcommand("metrics", "Depth metrics for pred/gt PFM pairs");
  add_common(metrics, opts);
  metrics->add_option("files", metric_files, "Alternating pred.pfm gt.pfm paths")
      ->expected(-1)
      ->check(CLI::ExistingFile);

  CLI::App* sweep = app.add_subcommand("sweep", "Margin sweep and mode ablation grid");
  add_common(sweep, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);  // prints the message / help text
    return rc == 0 ? 0 : 2;
  }

  try {
    depthlab::ExperimentConfig cfg = resolve(opts);
    if (profile->parsed()) {
      if (profile_x >= 0) cfg.profile_x = profile_x;
      if (profile_y >= 0) cfg.profile_y = profile_y;
    }
    if (synth->parsed()) return depthlab::cmd_synth(cfg);
    if (profile->parsed()) return depthlab::cmd_profile(cfg);
    if (optimize->parsed()) return depthlab::cmd_optimize(cfg);
    if (metrics->parsed()) return depthlab::cmd_metrics(cfg, metric_files);
    if (sweep->parsed()) return depthlab::cmd_sweep(cfg);
  } catch (const depthlab::contract_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
