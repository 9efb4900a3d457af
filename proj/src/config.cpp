#include "depthlab/config.hpp"

#include <cerrno>
#include <cinttypes>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "depthlab/rng.hpp"

namespace depthlab {
namespace {

struct Ctx {
  int line;
  const std::string& key;
};

[[noreturn]] void fail(const Ctx& ctx, const std::string& what) {
  throw contract_error("config line " + std::to_string(ctx.line) + ": " + ctx.key + ": " + what);
}

long long parse_ll(const std::string& v, const Ctx& ctx) {
  errno = 0;
  char* end = nullptr;
  long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
    fail(ctx, "expected an integer, got '" + v + "'");
  return x;
}

int parse_int(const std::string& v, const Ctx& ctx) {
  long long x = parse_ll(v, ctx);
  if (x < INT_MIN || x > INT_MAX) fail(ctx, "integer out of range: '" + v + "'");
  return static_cast<int>(x);
}

std::uint64_t parse_u64(const std::string& v, const Ctx& ctx) {
  if (v.empty() || v[0] == '-') fail(ctx, "expected a non-negative integer, got '" + v + "'");
  errno = 0;
  char* end = nullptr;
  unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end != v.c_str() + v.size() || errno == ERANGE)
    fail(ctx, "expected a non-negative integer, got '" + v + "'");
  return x;
}

double parse_real(const std::string& v, const Ctx& ctx) {
  errno = 0;
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x))
    fail(ctx, "expected a finite real, got '" + v + "'");
  return x;
}

bool parse_flag(const std::string& v, const Ctx& ctx) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  fail(ctx, "expected true/false, got '" + v + "'");
}

std::string fmt_int(long long x) { return std::to_string(x); }

std::string fmt_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);  // shortest lossless is overkill; 17 digits round-trip
  return buf;
}

// One schema entry: a key name plus how to set and read it. Accessors are
// capture-less lambdas over the config, so the whole schema is a flat table.
struct Key {
  const char* name;
  std::function<void(ExperimentConfig&, const std::string&, const Ctx&)> set;
  std::function<std::string(ExperimentConfig&)> get;
};

using IntRef = int& (*)(ExperimentConfig&);
using RealRef = double& (*)(ExperimentConfig&);
using FlagRef = bool& (*)(ExperimentConfig&);

Key int_key(const char* name, IntRef ref) {
  return {name,
          [ref](ExperimentConfig& c, const std::string& v, const Ctx& x) { ref(c) = parse_int(v, x); },
          [ref](ExperimentConfig& c) { return fmt_int(ref(c)); }};
}

Key real_key(const char* name, RealRef ref) {
  return {name,
          [ref](ExperimentConfig& c, const std::string& v, const Ctx& x) { ref(c) = parse_real(v, x); },
          [ref](ExperimentConfig& c) { return fmt_real(ref(c)); }};
}

Key flag_key(const char* name, FlagRef ref) {
  return {name,
          [ref](ExperimentConfig& c, const std::string& v, const Ctx& x) { ref(c) = parse_flag(v, x); },
          [ref](ExperimentConfig& c) { return std::string(ref(c) ? "true" : "false"); }};
}

const std::vector<Key>& schema() {
  using NM = TripletConfig::NegativeMode;
  using LM = TripletConfig::LossMode;
  using IM = InitSpec::Mode;
  static const std::vector<Key> keys = {
      {"seed",
       [](ExperimentConfig& c, const std::string& v, const Ctx& x) { c.seed = parse_u64(v, x); },
       [](ExperimentConfig& c) { return std::to_string(c.seed); }},
      {"output_dir",
       [](ExperimentConfig& c, const std::string& v, const Ctx&) { c.output_dir = v; },
       [](ExperimentConfig& c) { return c.output_dir; }},

      int_key("scene.width", [](ExperimentConfig& c) -> int& { return c.scene.width; }),
      int_key("scene.height", [](ExperimentConfig& c) -> int& { return c.scene.height; }),
      real_key("scene.d_bg", [](ExperimentConfig& c) -> double& { return c.scene.d_bg; }),
      real_key("scene.d_fg", [](ExperimentConfig& c) -> double& { return c.scene.d_fg; }),
      int_key("scene.fg_x", [](ExperimentConfig& c) -> int& { return c.scene.fg_x; }),
      int_key("scene.fg_y", [](ExperimentConfig& c) -> int& { return c.scene.fg_y; }),
      int_key("scene.fg_w", [](ExperimentConfig& c) -> int& { return c.scene.fg_w; }),
      int_key("scene.fg_h", [](ExperimentConfig& c) -> int& { return c.scene.fg_h; }),
      int_key("scene.win_x", [](ExperimentConfig& c) -> int& { return c.scene.win_x; }),
      int_key("scene.win_y", [](ExperimentConfig& c) -> int& { return c.scene.win_y; }),
      int_key("scene.win_w", [](ExperimentConfig& c) -> int& { return c.scene.win_w; }),
      int_key("scene.win_h", [](ExperimentConfig& c) -> int& { return c.scene.win_h; }),
      real_key("scene.texture_scale", [](ExperimentConfig& c) -> double& { return c.scene.texture_scale; }),
      real_key("scene.fg_texture_scale",
               [](ExperimentConfig& c) -> double& { return c.scene.fg_texture_scale; }),
      flag_key("scene.repeat_band", [](ExperimentConfig& c) -> bool& { return c.scene.repeat_band; }),

      real_key("rig.fx", [](ExperimentConfig& c) -> double& { return c.rig.intr.fx; }),
      real_key("rig.fy", [](ExperimentConfig& c) -> double& { return c.rig.intr.fy; }),
      real_key("rig.cx", [](ExperimentConfig& c) -> double& { return c.rig.intr.cx; }),
      real_key("rig.cy", [](ExperimentConfig& c) -> double& { return c.rig.intr.cy; }),
      real_key("rig.baseline", [](ExperimentConfig& c) -> double& { return c.rig.baseline; }),

      real_key("photometric.alpha",
               [](ExperimentConfig& c) -> double& { return c.opt.loss.photometric.alpha; }),
      real_key("photometric.c1", [](ExperimentConfig& c) -> double& { return c.opt.loss.photometric.c1; }),
      real_key("photometric.c2", [](ExperimentConfig& c) -> double& { return c.opt.loss.photometric.c2; }),

      int_key("triplet.patch_size", [](ExperimentConfig& c) -> int& { return c.opt.loss.triplet.patch_size; }),
      int_key("triplet.min_count", [](ExperimentConfig& c) -> int& { return c.opt.loss.triplet.min_count; }),
      real_key("triplet.margin", [](ExperimentConfig& c) -> double& { return c.opt.loss.triplet.margin; }),
      real_key("triplet.margin_isolated",
               [](ExperimentConfig& c) -> double& { return c.opt.loss.triplet.margin_isolated; }),
      {"triplet.negative_mode",
       [](ExperimentConfig& c, const std::string& v, const Ctx& x) {
         if (v == "mean") c.opt.loss.triplet.negative_mode = NM::mean;
         else if (v == "min") c.opt.loss.triplet.negative_mode = NM::min;
         else fail(x, "expected mean or min, got '" + v + "'");
       },
       [](ExperimentConfig& c) {
         return std::string(c.opt.loss.triplet.negative_mode == NM::mean ? "mean" : "min");
       }},
      {"triplet.loss_mode",
       [](ExperimentConfig& c, const std::string& v, const Ctx& x) {
         if (v == "standard") c.opt.loss.triplet.loss_mode = LM::standard;
         else if (v == "isolated") c.opt.loss.triplet.loss_mode = LM::isolated;
         else fail(x, "expected standard or isolated, got '" + v + "'");
       },
       [](ExperimentConfig& c) {
         return std::string(c.opt.loss.triplet.loss_mode == LM::standard ? "standard" : "isolated");
       }},

      real_key("lift.d_lo", [](ExperimentConfig& c) -> double& { return c.opt.loss.lift.d_lo; }),
      real_key("lift.d_hi", [](ExperimentConfig& c) -> double& { return c.opt.loss.lift.d_hi; }),

      real_key("loss.lambda_smooth", [](ExperimentConfig& c) -> double& { return c.opt.loss.lambda_smooth; }),
      real_key("loss.lambda_triplet",
               [](ExperimentConfig& c) -> double& { return c.opt.loss.lambda_triplet; }),

      real_key("opt.lr", [](ExperimentConfig& c) -> double& { return c.opt.lr; }),
      int_key("opt.steps", [](ExperimentConfig& c) -> int& { return c.opt.steps; }),
      real_key("opt.step_scale", [](ExperimentConfig& c) -> double& { return c.opt.step_scale; }),
      real_key("opt.d_min", [](ExperimentConfig& c) -> double& { return c.opt.d_min; }),
      real_key("opt.d_max", [](ExperimentConfig& c) -> double& { return c.opt.d_max; }),
      int_key("opt.snapshot_every", [](ExperimentConfig& c) -> int& { return c.opt.snapshot_every; }),

      {"init.mode",
       [](ExperimentConfig& c, const std::string& v, const Ctx& x) {
         if (v == "ground_truth") c.init.mode = IM::ground_truth;
         else if (v == "constant") c.init.mode = IM::constant;
         else if (v == "uniform_random") c.init.mode = IM::uniform_random;
         else fail(x, "expected ground_truth, constant or uniform_random, got '" + v + "'");
       },
       [](ExperimentConfig& c) {
         switch (c.init.mode) {
           case IM::ground_truth: return std::string("ground_truth");
           case IM::constant: return std::string("constant");
           default: return std::string("uniform_random");
         }
       }},
      real_key("init.constant", [](ExperimentConfig& c) -> double& { return c.init.constant; }),
      real_key("init.lo", [](ExperimentConfig& c) -> double& { return c.init.lo; }),
      real_key("init.hi", [](ExperimentConfig& c) -> double& { return c.init.hi; }),

      real_key("metrics.cap", [](ExperimentConfig& c) -> double& { return c.metrics.cap; }),
      real_key("metrics.pred_floor", [](ExperimentConfig& c) -> double& { return c.metrics.pred_floor; }),
      flag_key("metrics.median_scale", [](ExperimentConfig& c) -> bool& { return c.metrics.median_scale; }),

      int_key("profile.x", [](ExperimentConfig& c) -> int& { return c.profile_x; }),
      int_key("profile.y", [](ExperimentConfig& c) -> int& { return c.profile_y; }),
  };
  return keys;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Cross-field invariants, checked once after all assignments. The numeric
// modules re-assert most of these at their own boundaries; failing here
// pins the error to the config instead of a stack of library calls.
void validate(const ExperimentConfig& c) {
  require(!c.output_dir.empty(), "config: output_dir must not be empty");
  require(c.scene.width >= 1 && c.scene.height >= 1, "config: scene dimensions must be positive");
  require(c.rig.intr.fx > 0 && c.rig.baseline > 0,
          "config: rig.fx and rig.baseline must be positive");
  require(c.opt.loss.photometric.alpha >= 0 && c.opt.loss.photometric.alpha <= 1,
          "config: photometric.alpha must lie in [0, 1]");
  require(c.opt.loss.photometric.c1 > 0 && c.opt.loss.photometric.c2 > 0,
          "config: photometric.c1 and photometric.c2 must be positive");
  require(c.opt.loss.triplet.patch_size >= 1 && c.opt.loss.triplet.patch_size % 2 == 1,
          "config: triplet.patch_size must be odd and positive");
  require(c.opt.loss.triplet.min_count >= 0, "config: triplet.min_count must be non-negative");
  require(c.opt.loss.triplet.margin >= 0 && c.opt.loss.triplet.margin_isolated >= 0,
          "config: triplet margins must be non-negative");
  require(c.opt.loss.lift.d_lo < c.opt.loss.lift.d_hi, "config: lift.d_lo must be below lift.d_hi");
  require(c.opt.loss.lambda_smooth >= 0 && c.opt.loss.lambda_triplet >= 0,
          "config: loss weights must be non-negative");
  require(c.opt.lr > 0, "config: opt.lr must be positive");
  require(c.opt.steps >= 0, "config: opt.steps must be non-negative");
  require(c.opt.step_scale > 0, "config: opt.step_scale must be positive");
  require(c.opt.d_min > 0 && c.opt.d_min < c.opt.d_max,
          "config: need 0 < opt.d_min < opt.d_max");
  require(c.opt.snapshot_every >= 0, "config: opt.snapshot_every must be non-negative");
  require(c.init.lo < c.init.hi, "config: need init.lo < init.hi");
  require(c.metrics.pred_floor > 0 && c.metrics.pred_floor < c.metrics.cap,
          "config: need 0 < metrics.pred_floor < metrics.cap");
  require(c.profile_x >= 0 && c.profile_x < c.scene.width && c.profile_y >= 0 &&
              c.profile_y < c.scene.height,
          "config: profile pixel must lie inside the scene");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw.substr(0, raw.find('#'));
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    std::string key = trim(line.substr(0, eq == std::string::npos ? line.size() : eq));
    Ctx ctx{line_no, key};
    if (eq == std::string::npos) fail(ctx, "expected 'key = value'");
    std::string value = trim(line.substr(eq + 1));
    bool known = false;
    for (const Key& k : schema()) {
      if (key == k.name) {
        k.set(cfg, value, ctx);
        known = true;
        break;
      }
    }
    if (!known) fail(ctx, "unknown key");
  }
  cfg.scene.seed = cfg.seed;  // one master seed; everything else is a substream
  validate(cfg);
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "config: cannot open '" + path + "'");
  std::ostringstream body;
  body << in.rdbuf();
  return parse_config_text(body.str());
}

std::string dump_config(const ExperimentConfig& cfg) {
  ExperimentConfig copy = cfg;  // accessors hand out mutable refs; dump reads through a copy
  std::string out;
  for (const Key& k : schema()) {
    out += k.name;
    out += " = ";
    out += k.get(copy);
    out += '\n';
  }
  return out;
}

ScalarGrid make_init(const InitSpec& init, const ScalarGrid& gt_disparity, std::uint64_t seed) {
  switch (init.mode) {
    case InitSpec::Mode::ground_truth:
      return gt_disparity;
    case InitSpec::Mode::constant:
      return ScalarGrid(gt_disparity.width, gt_disparity.height, init.constant);
    case InitSpec::Mode::uniform_random: {
      require(init.lo < init.hi, "make_init: need lo < hi");
      ScalarGrid g(gt_disparity.width, gt_disparity.height);
      Rng rng(substream(seed, "init"));
      for (double& v : g.data) v = rng.uniform(init.lo, init.hi);
      return g;
    }
  }
  throw contract_error("make_init: unhandled init mode");
}

}  // namespace depthlab
