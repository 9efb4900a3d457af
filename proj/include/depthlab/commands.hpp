#pragma once

#include <string>
#include <vector>

#include "depthlab/config.hpp"

namespace depthlab {

/// The five experiment drivers behind the CLI, callable as plain functions
/// so tests can run them without spawning a process. Each writes its
/// artifacts under cfg.output_dir (created on demand) and prints a short
/// summary to stdout. Return value is the process exit code: 0 on success,
/// 3 when an optimization diverged (partial outputs are still written).
/// Config/contract violations throw contract_error; the CLI maps those to 2.

/// Render the scene; write left/right previews (PGM), exact ground truth
/// (PFM), and the label/occlusion/band masks (PGM). Prints the occlusion
/// band width.
int cmd_synth(const ExperimentConfig& cfg);

/// Write the per-candidate photometric error curve of the config's profile
/// pixel as CSV and print whether its argmin lands on the ground truth.
int cmd_profile(const ExperimentConfig& cfg);

/// Run gradient descent from the configured init; write the loss history
/// CSV, final disparity PFM (plus snapshots when snapshot_every > 0), the
/// fattening report CSVs, and depth metrics against ground truth.
int cmd_optimize(const ExperimentConfig& cfg);

/// Evaluate alternating pred/gt PFM pairs; write one CSV row per pair plus
/// a final mean row. Pixels whose gt is not strictly positive are ignored.
int cmd_metrics(const ExperimentConfig& cfg, const std::vector<std::string>& pfm_pairs);

/// Two canned studies on one scene: the margin sweep over the isolated
/// hinge (min negatives) and the 2x2 ablation grid over negative/loss
/// modes. Writes margin_sweep.csv and ablation.csv.
int cmd_sweep(const ExperimentConfig& cfg);

}  // namespace depthlab
