#ifndef PATCHFORGE_COLOR_GRID_HPP
#define PATCHFORGE_COLOR_GRID_HPP

#include "patchforge/geometry.hpp"
#include "patchforge/image.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace patchforge {

using Rgb = Eigen::Array3d;

/// K x K grid of RGB colors over the bounding box, row-major, channels in [0,1].
class ColorGrid {
 public:
  ColorGrid(int k, std::vector<Rgb> colors);

  static ColorGrid uniform(int k, const Rgb& color);
  /// Reads a flat optimizer vector (r, g, b per cell, row-major) and clamps
  /// each channel into [0,1]. Length must be 3*k*k.
  static ColorGrid from_raw(int k, std::span<const double> raw);

  int k() const { return k_; }
  const std::vector<Rgb>& colors() const { return colors_; }
  const Rgb& cell(int row, int col) const { return colors_[static_cast<std::size_t>(row * k_ + col)]; }

  friend bool operator==(const ColorGrid& a, const ColorGrid& b);

 private:
  int k_;
  std::vector<Rgb> colors_;
};

/// Nearest-cell lookup at a normalized point; x == 1 or y == 1 map to the
/// last column/row.
const Rgb& color_at(const ColorGrid& grid, double x, double y);

/// Blocky rendering sampled at pixel centers.
Image render_grid(const ColorGrid& grid, int width, int height);

/// The cross-modal patch: one shape shared by both modalities, colored by
/// the grid in the visible band.
struct UnifiedPatch {
  PolygonPatch shape;
  ColorGrid grid;

  friend bool operator==(const UnifiedPatch&, const UnifiedPatch&) = default;
};

}  // namespace patchforge

#endif  // PATCHFORGE_COLOR_GRID_HPP
