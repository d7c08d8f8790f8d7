#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "eat/errors.hpp"

namespace eat::sfc {

enum class Curve { sweep, scan, zorder, hilbert, sweep_in_sweep };

// A named finite curve family. SweepInSweep carries its block side length.
struct CurveKind {
  Curve curve = Curve::sweep;
  int slice_side = 0;  // only meaningful for sweep_in_sweep

  static CurveKind Sweep() { return {Curve::sweep, 0}; }
  static CurveKind Scan() { return {Curve::scan, 0}; }
  static CurveKind ZOrder() { return {Curve::zorder, 0}; }
  static CurveKind Hilbert() { return {Curve::hilbert, 0}; }
  static CurveKind Sis(int side) { return {Curve::sweep_in_sweep, side}; }

  // "sweep" | "scan" | "zorder" | "hilbert" | "sis:<side>"
  static CurveKind parse(const std::string& text);
  std::string name() const;

  bool operator==(const CurveKind&) const = default;
};

struct Grid {
  int height = 0;
  int width = 0;
  int depth = 1;  // > 1 only for the 3D Hilbert curve

  long long cells() const {
    return static_cast<long long>(height) * width * depth;
  }
  bool operator==(const Grid&) const = default;
};

// Throws InvalidGrid when the curve cannot be defined on the grid
// (Z-Order/Hilbert need square power-of-two sides, SIS(s) needs s | H and
// s | W, every curve needs H, W >= 1).
void validate(CurveKind kind, const Grid& grid);

// k = SFC(x, y). Zero-based; bijection onto [0, H*W).
long long curve_index(CurveKind kind, const Grid& grid, int x, int y);

// Inverse of curve_index: the (x, y) cell visited at position k.
std::pair<int, int> curve_point(CurveKind kind, const Grid& grid, long long k);

// 3D Hilbert on a cubic power-of-two grid; bijection onto [0, H*W*D).
long long curve_index_3d(const Grid& grid, int x, int y, int z);
std::array<int, 3> curve_point_3d(const Grid& grid, long long k);

// A serialized image: row k holds the pixel visited at curve position k.
template <class T>
struct PixelSequence {
  CurveKind kind;
  Grid grid;
  int channels = 0;
  std::vector<T> values;  // (H*W) x C, row-major
};

// image: H x W x C row-major. Output row k = image pixel at curve_point(k).
template <class T>
PixelSequence<T> serialize(const std::vector<T>& image, const Grid& grid,
                           int channels, CurveKind kind) {
  validate(kind, grid);
  const long long n = grid.cells();
  if (static_cast<long long>(image.size()) != n * channels) {
    throw LengthMismatch("serialize: image has " + std::to_string(image.size()) +
                         " values, expected " + std::to_string(n * channels));
  }
  PixelSequence<T> seq{kind, grid, channels, std::vector<T>(image.size())};
  for (long long k = 0; k < n; ++k) {
    const auto [x, y] = curve_point(kind, grid, k);
    const long long src = (static_cast<long long>(y) * grid.width + x) * channels;
    for (int c = 0; c < channels; ++c) seq.values[k * channels + c] = image[src + c];
  }
  return seq;
}

// Exact inverse of serialize.
template <class T>
std::vector<T> deserialize(const std::vector<T>& values, CurveKind kind,
                           const Grid& grid, int channels) {
  validate(kind, grid);
  const long long n = grid.cells();
  if (static_cast<long long>(values.size()) != n * channels) {
    throw LengthMismatch("deserialize: sequence has " + std::to_string(values.size()) +
                         " values, expected " + std::to_string(n * channels));
  }
  std::vector<T> image(values.size());
  for (long long k = 0; k < n; ++k) {
    const auto [x, y] = curve_point(kind, grid, k);
    const long long dst = (static_cast<long long>(y) * grid.width + x) * channels;
    for (int c = 0; c < channels; ++c) image[dst + c] = values[k * channels + c];
  }
  return image;
}

template <class T>
std::vector<T> deserialize(const PixelSequence<T>& seq) {
  return deserialize(seq.values, seq.kind, seq.grid, seq.channels);
}

// Mean Manhattan distance between the 2D cells of consecutive 1D indices.
// 1.0 exactly when every step of the traversal is a unit step.
double locality_score(CurveKind kind, const Grid& grid);

}  // namespace eat::sfc
