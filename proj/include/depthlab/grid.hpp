#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace depthlab {

/// Thrown when a caller violates a documented precondition (shape mismatch,
/// empty input, out-of-range parameter). Distinct from std::runtime_error so
/// tests can assert on the contract specifically.
struct contract_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw contract_error(what);
}

/// Row-major 2-D grid of doubles. Value type; all the numerics in this
/// library operate on these.
struct ScalarGrid {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  ScalarGrid() = default;
  ScalarGrid(int w, int h, double fill = 0.0)
      : width((require(w > 0 && h > 0, "ScalarGrid: dimensions must be positive"), w)),
        height(h),
        data(static_cast<size_t>(w) * h, fill) {}

  size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }

  size_t idx(int x, int y) const { return static_cast<size_t>(y) * width + x; }

  double& at(int x, int y) { return data[idx(x, y)]; }
  double at(int x, int y) const { return data[idx(x, y)]; }

  bool in_bounds(int x, int y) const {
    return x >= 0 && x < width && y >= 0 && y < height;
  }

  bool same_shape(const ScalarGrid& o) const {
    return width == o.width && height == o.height;
  }

  std::span<double> row(int y) { return {data.data() + idx(0, y), static_cast<size_t>(width)}; }
  std::span<const double> row(int y) const {
    return {data.data() + idx(0, y), static_cast<size_t>(width)};
  }

  void fill(double v) { data.assign(data.size(), v); }
};

/// Multi-channel image: one grid per channel, all the same shape.
using Image = std::vector<ScalarGrid>;

inline void require_same_shape(const ScalarGrid& a, const ScalarGrid& b, const char* who) {
  require(a.same_shape(b), std::string(who) + ": shape mismatch");
}

inline void require_image(const Image& im, const char* who) {
  require(!im.empty(), std::string(who) + ": image has no channels");
  for (const auto& ch : im) require_same_shape(im[0], ch, who);
}

}  // namespace depthlab
