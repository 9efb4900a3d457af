#include "depthlab/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "depthlab/camera.hpp"
#include "depthlab/image_io.hpp"
#include "depthlab/metrics.hpp"
#include "depthlab/optimizer.hpp"
#include "depthlab/synth.hpp"

namespace fs = std::filesystem;

namespace depthlab {
namespace {

const std::vector<std::string> kMetricColumns = {"abs_rel", "sq_rel",  "rmse",  "rmse_log",
                                                 "delta1",  "delta2",  "delta3"};

std::vector<double> metric_row(const MetricSet& m) {
  return {m.abs_rel, m.sq_rel, m.rmse, m.rmse_log, m.delta1, m.delta2, m.delta3};
}

fs::path ensure_out_dir(const ExperimentConfig& cfg) {
  require(!cfg.output_dir.empty(), "output_dir must not be empty");
  fs::path dir(cfg.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec && fs::is_directory(dir), "cannot create output_dir '" + cfg.output_dir + "'");
  return dir;
}

ScalarGrid times255(const ScalarGrid& g) {
  ScalarGrid out = g;
  for (double& v : out.data) v *= 255.0;
  return out;
}

/// Disparity map -> metric set against the scene's ground truth, both sides
/// converted to depth through the rig. Every pixel is valid: the synthetic
/// gt is positive everywhere.
MetricSet depth_metrics_for(const ScalarGrid& disp, const StereoScene& scene,
                            const ExperimentConfig& cfg) {
  ScalarGrid pred(disp.width, disp.height), gt(disp.width, disp.height);
  ScalarGrid valid(disp.width, disp.height, 1.0);
  for (size_t i = 0; i < disp.size(); ++i) {
    pred.data[i] = depth_from_disparity(cfg.rig, disp.data[i]);
    gt.data[i] = depth_from_disparity(cfg.rig, scene.gt_disparity.data[i]);
  }
  return compute_metrics(pred, gt, valid, cfg.metrics);
}

void write_metric_csv(const fs::path& path, const std::vector<MetricSet>& sets) {
  std::vector<std::vector<double>> rows;
  for (const MetricSet& m : sets) rows.push_back(metric_row(m));
  rows.push_back(metric_row(mean_metrics(sets)));  // last row: mean over images
  write_csv(path.string(), kMetricColumns, rows);
}

struct RunOutcome {
  OptResult result;
  FatteningReport report;
};

RunOutcome run_opt(const StereoScene& scene, const ScalarGrid& init, const OptConfig& opt,
                   const std::function<void(int, const ScalarGrid&)>& snapshot = {}) {
  RunOutcome out;
  out.result = run_descent(scene.left, scene.right, scene.fg_mask, init, opt, snapshot);
  out.report = fattening_report(out.result.disparity, scene);
  return out;
}

int report_divergence(const OptResult& res) {
  int last_finite = -1;
  for (const HistoryRow& row : res.history)
    if (std::isfinite(row.total)) last_finite = row.step;
  std::fprintf(stderr, "optimization diverged; last finite step: %d\n", last_finite);
  return 3;
}

}  // namespace

int cmd_synth(const ExperimentConfig& cfg) {
  StereoScene scene = synthesize_scene(cfg.scene);
  fs::path dir = ensure_out_dir(cfg);
  write_pgm(times255(scene.left[0]), (dir / "left.pgm").string());
  write_pgm(times255(scene.right[0]), (dir / "right.pgm").string());
  write_pfm(scene.gt_disparity, (dir / "gt_disparity.pfm").string());
  write_pgm(times255(scene.fg_mask), (dir / "labels.pgm").string());
  write_pgm(times255(scene.occluded_mask), (dir / "occlusion.pgm").string());
  write_pgm(times255(scene.band_mask), (dir / "band.pgm").string());
  std::printf("scene %dx%d written to %s; occlusion band width %s px\n", cfg.scene.width,
              cfg.scene.height, dir.string().c_str(),
              format_double(cfg.scene.d_fg - cfg.scene.d_bg).c_str());
  return 0;
}

int cmd_profile(const ExperimentConfig& cfg) {
  StereoScene scene = synthesize_scene(cfg.scene);
  const int x = cfg.profile_x, y = cfg.profile_y;
  std::vector<double> candidates = make_candidates(cfg.opt.d_min, cfg.opt.d_max, 0.25);
  std::vector<ProfilePoint> curve =
      photometric_profile(scene.left, scene.right, x, y, candidates, cfg.opt.loss.photometric);

  fs::path dir = ensure_out_dir(cfg);
  std::vector<std::vector<double>> rows;
  for (const ProfilePoint& p : curve) rows.push_back({p.disparity, p.error});
  write_csv((dir / "profile.csv").string(), {"disparity", "error"}, rows);

  const ProfilePoint* best = &curve.front();
  for (const ProfilePoint& p : curve)
    if (p.error < best->error) best = &p;
  const double gt = scene.gt_disparity.at(x, y);
  const bool match = std::abs(best->disparity - gt) <= 0.5;
  std::printf("pixel (%d, %d): argmin=%s, gt=%s, %s\n", x, y,
              format_double(best->disparity).c_str(), format_double(gt).c_str(),
              match ? "MATCH" : "MISMATCH");
  return 0;
}

int cmd_optimize(const ExperimentConfig& cfg) {
  StereoScene scene = synthesize_scene(cfg.scene);
  ScalarGrid init = make_init(cfg.init, scene.gt_disparity, cfg.seed);
  fs::path dir = ensure_out_dir(cfg);

  std::function<void(int, const ScalarGrid&)> snapshot;
  if (cfg.opt.snapshot_every > 0)
    snapshot = [&](int step, const ScalarGrid& disp) {
      char name[48];
      std::snprintf(name, sizeof name, "disparity_step_%06d.pfm", step);
      write_pfm(disp, (dir / name).string());
    };
  RunOutcome run = run_opt(scene, init, cfg.opt, snapshot);

  std::vector<std::vector<double>> hist;
  for (const HistoryRow& r : run.result.history)
    hist.push_back({static_cast<double>(r.step), r.total, r.photometric, r.smoothness, r.triplet});
  write_csv((dir / "loss_history.csv").string(), {"step", "total", "pe", "smooth", "triplet"},
            hist);
  write_pfm(run.result.disparity, (dir / "disparity_final.pfm").string());

  const FatteningReport& rep = run.report;
  write_csv((dir / "fattening.csv").string(),
            {"band_at_fg", "band_fattened", "bg_at_bg", "mean_band"},
            {{rep.band_at_fg, rep.band_fattened, rep.bg_at_bg, rep.mean_band}});
  std::vector<std::vector<double>> leak;
  for (size_t i = 0; i < rep.leak_width.size(); ++i)
    leak.push_back({static_cast<double>(cfg.scene.fg_y + static_cast<int>(i)),
                    static_cast<double>(rep.leak_width[i])});
  write_csv((dir / "leak_width.csv").string(), {"row", "fattened_px"}, leak);

  write_metric_csv(dir / "metrics.csv", {depth_metrics_for(run.result.disparity, scene, cfg)});

  if (run.result.diverged) return report_divergence(run.result);
  std::printf("optimize: %d steps, final total %s, band fattened %s, bg at gt %s -> %s\n",
              cfg.opt.steps, format_double(run.result.history.back().total).c_str(),
              format_double(rep.band_fattened).c_str(), format_double(rep.bg_at_bg).c_str(),
              dir.string().c_str());
  return 0;
}

int cmd_metrics(const ExperimentConfig& cfg, const std::vector<std::string>& pfm_pairs) {
  require(!pfm_pairs.empty() && pfm_pairs.size() % 2 == 0,
          "metrics: need an even number of files (pred gt pred gt ...)");
  std::vector<MetricSet> sets;
  for (size_t i = 0; i < pfm_pairs.size(); i += 2) {
    ScalarGrid pred = read_pfm(pfm_pairs[i]);
    ScalarGrid gt = read_pfm(pfm_pairs[i + 1]);
    require(pred.same_shape(gt), "metrics: pred/gt shape mismatch for '" + pfm_pairs[i] + "'");
    ScalarGrid valid(gt.width, gt.height);
    for (size_t k = 0; k < gt.size(); ++k) valid.data[k] = gt.data[k] > 0 ? 1.0 : 0.0;
    sets.push_back(compute_metrics(pred, gt, valid, cfg.metrics));
  }
  fs::path dir = ensure_out_dir(cfg);
  write_metric_csv(dir / "metrics.csv", sets);
  std::printf("metrics: %zu image(s) + mean -> %s\n", sets.size(),
              (dir / "metrics.csv").string().c_str());
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  StereoScene scene = synthesize_scene(cfg.scene);
  ScalarGrid init = make_init(cfg.init, scene.gt_disparity, cfg.seed);
  fs::path dir = ensure_out_dir(cfg);
  bool any_diverged = false;

  // Margin sweep: the isolated hinge with min negatives, m' varied.
  const double margins[] = {0.50, 0.60, 0.65, 0.70, 0.80};
  std::vector<std::vector<double>> margin_rows;
  for (double m : margins) {
    OptConfig opt = cfg.opt;
    opt.loss.triplet.negative_mode = TripletConfig::NegativeMode::min;
    opt.loss.triplet.loss_mode = TripletConfig::LossMode::isolated;
    opt.loss.triplet.margin_isolated = m;
    RunOutcome run = run_opt(scene, init, opt);
    any_diverged = any_diverged || run.result.diverged;
    margin_rows.push_back({m, run.report.band_at_fg, run.report.band_fattened, run.report.bg_at_bg,
                           run.report.mean_band, run.result.history.back().total,
                           run.result.diverged ? 1.0 : 0.0});
    std::printf("sweep margin=%.2f: fattened %s, bg at gt %s\n", m,
                format_double(run.report.band_fattened).c_str(),
                format_double(run.report.bg_at_bg).c_str());
  }
  write_csv((dir / "margin_sweep.csv").string(),
            {"margin_isolated", "band_at_fg", "band_fattened", "bg_at_bg", "mean_band",
             "final_total", "diverged"},
            margin_rows);

  // Ablation grid: which redesign does what, everything else from the config.
  struct Combo {
    const char* name;
    TripletConfig::NegativeMode nm;
    TripletConfig::LossMode lm;
  };
  const Combo combos[] = {
      {"baseline", TripletConfig::NegativeMode::mean, TripletConfig::LossMode::standard},
      {"min", TripletConfig::NegativeMode::min, TripletConfig::LossMode::standard},
      {"isolated", TripletConfig::NegativeMode::mean, TripletConfig::LossMode::isolated},
      {"both", TripletConfig::NegativeMode::min, TripletConfig::LossMode::isolated},
  };
  std::ofstream ab((dir / "ablation.csv").string(), std::ios::binary);
  require(ab.good(), "cannot write ablation.csv");
  ab << "mode,negative_mode,loss_mode,band_at_fg,band_fattened,bg_at_bg,mean_band,final_total,"
        "diverged\n";
  for (const Combo& combo : combos) {
    OptConfig opt = cfg.opt;
    opt.loss.triplet.negative_mode = combo.nm;
    opt.loss.triplet.loss_mode = combo.lm;
    RunOutcome run = run_opt(scene, init, opt);
    any_diverged = any_diverged || run.result.diverged;
    ab << combo.name << ','
       << (combo.nm == TripletConfig::NegativeMode::mean ? "mean" : "min") << ','
       << (combo.lm == TripletConfig::LossMode::standard ? "standard" : "isolated") << ','
       << format_double(run.report.band_at_fg) << ',' << format_double(run.report.band_fattened)
       << ',' << format_double(run.report.bg_at_bg) << ',' << format_double(run.report.mean_band)
       << ',' << format_double(run.result.history.back().total) << ','
       << (run.result.diverged ? 1 : 0) << '\n';
    std::printf("sweep ablation %s: fattened %s, bg at gt %s\n", combo.name,
                format_double(run.report.band_fattened).c_str(),
                format_double(run.report.bg_at_bg).c_str());
  }
  ab.close();
  require(ab.good(), "write to ablation.csv failed");

  if (any_diverged) {
    std::fprintf(stderr, "sweep: at least one run diverged (see the diverged column)\n");
    return 3;
  }
  return 0;
}

}  // namespace depthlab
