#pragma once

#include <string>
#include <vector>

#include "depthlab/grid.hpp"

namespace depthlab {

/// Grayscale PFM ("Pf"), float32, little-endian (negative scale), rows
/// stored bottom-up per the format. Lossless for float-representable values.
void write_pfm(const ScalarGrid& g, const std::string& path);
ScalarGrid read_pfm(const std::string& path);

/// Binary PGM (P5, maxval 255). Values are rounded and clamped to [0,255]:
/// pass masks as 0/1 and previews pre-scaled by 255.
void write_pgm(const ScalarGrid& g, const std::string& path);
ScalarGrid read_pgm(const std::string& path);

/// Binary PPM (P6) from three channels in [0,1]; values scaled by 255.
void write_ppm(const Image& rgb, const std::string& path);

/// CSV with a fixed header. Numbers are formatted with "%.12g" via snprintf,
/// so output is locale-independent and byte-stable across runs.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string format_double(double v);

}  // namespace depthlab
