#include "depthlab/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace depthlab {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw std::runtime_error(path + ": " + why);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(path, "cannot open for writing");
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(path, "cannot open for reading");
  return f;
}

// Reads one whitespace-delimited token, skipping '#' comment lines the way
// netpbm headers allow.
std::string next_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) {
      tok.push_back(static_cast<char>(c));
      while ((c = in.peek()) != EOF && !std::isspace(c)) tok.push_back(static_cast<char>(in.get()));
      return tok;
    }
  }
  return tok;
}

uint8_t to_byte(double v) {
  double r = std::round(v);
  return static_cast<uint8_t>(std::clamp(r, 0.0, 255.0));
}

}  // namespace

void write_pfm(const ScalarGrid& g, const std::string& path) {
  require(!g.empty(), "write_pfm: empty grid");
  auto f = open_out(path);
  char header[64];
  int n = std::snprintf(header, sizeof(header), "Pf\n%d %d\n-1.0\n", g.width, g.height);
  f.write(header, n);
  std::vector<float> row(g.width);
  for (int y = g.height - 1; y >= 0; --y) {  // bottom-up
    for (int x = 0; x < g.width; ++x) row[x] = static_cast<float>(g.at(x, y));
    f.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!f) fail(path, "write failed");
}

ScalarGrid read_pfm(const std::string& path) {
  auto f = open_in(path);
  if (next_token(f) != "Pf") fail(path, "not a grayscale PFM");
  int w = std::stoi(next_token(f));
  int h = std::stoi(next_token(f));
  double scale = std::stod(next_token(f));
  if (scale >= 0) fail(path, "big-endian PFM not supported");
  f.get();  // single whitespace byte after the scale line
  if (w <= 0 || h <= 0) fail(path, "bad dimensions");
  ScalarGrid g(w, h);
  std::vector<float> row(w);
  for (int y = h - 1; y >= 0; --y) {
    f.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!f) fail(path, "truncated pixel data");
    for (int x = 0; x < w; ++x) g.at(x, y) = row[x];
  }
  return g;
}

void write_pgm(const ScalarGrid& g, const std::string& path) {
  require(!g.empty(), "write_pgm: empty grid");
  auto f = open_out(path);
  char header[64];
  int n = std::snprintf(header, sizeof(header), "P5\n%d %d\n255\n", g.width, g.height);
  f.write(header, n);
  std::vector<uint8_t> row(g.width);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) row[x] = to_byte(g.at(x, y));
    f.write(reinterpret_cast<const char*>(row.data()), g.width);
  }
  if (!f) fail(path, "write failed");
}

ScalarGrid read_pgm(const std::string& path) {
  auto f = open_in(path);
  if (next_token(f) != "P5") fail(path, "not a binary PGM");
  int w = std::stoi(next_token(f));
  int h = std::stoi(next_token(f));
  int maxval = std::stoi(next_token(f));
  if (maxval != 255) fail(path, "only maxval 255 supported");
  f.get();
  if (w <= 0 || h <= 0) fail(path, "bad dimensions");
  ScalarGrid g(w, h);
  std::vector<uint8_t> row(w);
  for (int y = 0; y < h; ++y) {
    f.read(reinterpret_cast<char*>(row.data()), w);
    if (!f) fail(path, "truncated pixel data");
    for (int x = 0; x < w; ++x) g.at(x, y) = row[x];
  }
  return g;
}

void write_ppm(const Image& rgb, const std::string& path) {
  require_image(rgb, "write_ppm");
  require(rgb.size() == 3, "write_ppm: expected exactly 3 channels");
  auto f = open_out(path);
  char header[64];
  int n = std::snprintf(header, sizeof(header), "P6\n%d %d\n255\n", rgb[0].width, rgb[0].height);
  f.write(header, n);
  std::vector<uint8_t> row(static_cast<size_t>(rgb[0].width) * 3);
  for (int y = 0; y < rgb[0].height; ++y) {
    for (int x = 0; x < rgb[0].width; ++x)
      for (int c = 0; c < 3; ++c) row[3 * x + c] = to_byte(rgb[c].at(x, y) * 255.0);
    f.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  if (!f) fail(path, "write failed");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  require(!header.empty(), "write_csv: empty header");
  auto f = open_out(path);
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) f.put(',');
    f << header[i];
  }
  f.put('\n');
  for (const auto& r : rows) {
    require(r.size() == header.size(), "write_csv: row width differs from header");
    for (size_t i = 0; i < r.size(); ++i) {
      if (i) f.put(',');
      f << format_double(r[i]);
    }
    f.put('\n');
  }
  if (!f) fail(path, "write failed");
}

}  // namespace depthlab
