#include "patchforge/color_grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace patchforge {

ColorGrid::ColorGrid(int k, std::vector<Rgb> colors) : k_(k), colors_(std::move(colors)) {
  if (k_ < 1) throw InputError("grid dimension K must be >= 1, got " + std::to_string(k_));
  if (colors_.size() != static_cast<std::size_t>(k_) * static_cast<std::size_t>(k_))
    throw InputError("color grid needs exactly K*K colors");
  for (const auto& c : colors_) {
    if (!((c >= 0.0).all() && (c <= 1.0).all())) throw InputError("color channels must lie in [0,1]");
  }
}

ColorGrid ColorGrid::uniform(int k, const Rgb& color) {
  if (k < 1) throw InputError("grid dimension K must be >= 1, got " + std::to_string(k));
  return ColorGrid(k, std::vector<Rgb>(static_cast<std::size_t>(k * k), color));
}

ColorGrid ColorGrid::from_raw(int k, std::span<const double> raw) {
  if (k < 1) throw InputError("grid dimension K must be >= 1, got " + std::to_string(k));
  const auto cells = static_cast<std::size_t>(k) * static_cast<std::size_t>(k);
  if (raw.size() != 3 * cells) throw InputError("raw color vector must have length 3*K*K");
  std::vector<Rgb> colors(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    for (int ch = 0; ch < 3; ++ch) {
      const double v = raw[3 * i + static_cast<std::size_t>(ch)];
      colors[i][ch] = std::isnan(v) ? 0.5 : std::clamp(v, 0.0, 1.0);
    }
  }
  return ColorGrid(k, std::move(colors));
}

bool operator==(const ColorGrid& a, const ColorGrid& b) {
  if (a.k_ != b.k_) return false;
  for (std::size_t i = 0; i < a.colors_.size(); ++i) {
    if ((a.colors_[i] != b.colors_[i]).any()) return false;
  }
  return true;
}

const Rgb& color_at(const ColorGrid& grid, double x, double y) {
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0))
    throw InputError("color_at: point outside the unit square");
  const int k = grid.k();
  const int col = std::min(static_cast<int>(std::floor(x * k)), k - 1);
  const int row = std::min(static_cast<int>(std::floor(y * k)), k - 1);
  return grid.cell(row, col);
}

Image render_grid(const ColorGrid& grid, int width, int height) {
  Image out(width, height, 3);
  for (int py = 0; py < height; ++py) {
    const double y = (py + 0.5) / height;
    for (int px = 0; px < width; ++px) {
      const Rgb& c = color_at(grid, (px + 0.5) / width, y);
      for (int ch = 0; ch < 3; ++ch) out(px, py, ch) = c[ch];
    }
  }
  return out;
}

}  // namespace patchforge
