#include "patchforge/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace patchforge {

namespace {

// Cell origin in lattice units, clockwise from the top-left corner.
constexpr std::array<std::array<int, 2>, kPerimeterCells> kCellOrigin{{
    {0, 0}, {1, 0}, {2, 0}, {2, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1},
}};

double orient(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

bool on_segment(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                        const Eigen::Vector2d& p3, const Eigen::Vector2d& p4) {
  const double d1 = orient(p3, p4, p1);
  const double d2 = orient(p3, p4, p2);
  const double d3 = orient(p1, p2, p3);
  const double d4 = orient(p1, p2, p4);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment(p3, p4, p1)) return true;
  if (d2 == 0 && on_segment(p3, p4, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, p3)) return true;
  if (d4 == 0 && on_segment(p1, p2, p4)) return true;
  return false;
}

}  // namespace

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::max(0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

NormalizedRect perimeter_cell_rect(int cell) {
  if (cell < 0 || cell >= kPerimeterCells)
    throw InputError("perimeter cell index out of range: " + std::to_string(cell));
  const auto [cx, cy] = kCellOrigin[static_cast<std::size_t>(cell)];
  return {cx / 3.0, cy / 3.0, (cx + 1) / 3.0, (cy + 1) / 3.0};
}

std::vector<int> default_cells(int n) {
  if (n < kMinVertices || n > kMaxVertices)
    throw InputError("vertex count must be in [3,8], got " + std::to_string(n));
  std::vector<int> cells(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    cells[k] = static_cast<int>(std::lround(static_cast<double>(k) * kPerimeterCells / n));
  return cells;
}

PolygonPatch::PolygonPatch(std::vector<GridCellVertex> vertices) : vertices_(std::move(vertices)) {
  const int n = size();
  if (n < kMinVertices || n > kMaxVertices)
    throw InputError("polygon must have 3..8 vertices, got " + std::to_string(n));
  for (int k = 0; k < n; ++k) {
    const auto& vx = vertices_[k];
    if (vx.cell < 0 || vx.cell >= kPerimeterCells)
      throw InputError("vertex cell index out of range: " + std::to_string(vx.cell));
    if (!(vx.u >= 0.0 && vx.u <= 1.0 && vx.v >= 0.0 && vx.v <= 1.0))
      throw InputError("vertex offsets must lie in [0,1]");
    if (k > 0 && vx.cell <= vertices_[k - 1].cell)
      throw InputError("vertex cells must be strictly increasing in perimeter order");
  }
}

PolygonPatch PolygonPatch::cell_centers(int n) {
  std::vector<GridCellVertex> vs;
  for (int c : default_cells(n)) vs.push_back({c, 0.5, 0.5});
  return PolygonPatch(std::move(vs));
}

PolygonPatch PolygonPatch::full_square() {
  return PolygonPatch({{0, 0.0, 0.0},
                       {1, 0.5, 0.0},
                       {2, 1.0, 0.0},
                       {3, 1.0, 0.5},
                       {4, 1.0, 1.0},
                       {5, 0.5, 1.0},
                       {6, 0.0, 1.0},
                       {7, 0.0, 0.5}});
}

std::vector<int> PolygonPatch::cells() const {
  std::vector<int> out;
  out.reserve(vertices_.size());
  for (const auto& v : vertices_) out.push_back(v.cell);
  return out;
}

std::vector<Eigen::Vector2d> to_normalized_vertices(const PolygonPatch& patch) {
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(patch.vertices().size());
  for (const auto& v : patch.vertices()) {
    // origin + offset, then /3, so that box corners land exactly on 0 or 1.
    const auto [cx, cy] = kCellOrigin[static_cast<std::size_t>(v.cell)];
    pts.emplace_back((cx + v.u) / 3.0, (cy + v.v) / 3.0);
  }
  return pts;
}

double signed_area(std::span<const Eigen::Vector2d> points) {
  const std::size_t n = points.size();
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = points[i];
    const auto& b = points[(i + 1) % n];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

double polygon_area(const PolygonPatch& patch) {
  const auto pts = to_normalized_vertices(patch);
  return std::abs(signed_area(pts));
}

bool is_simple(const PolygonPatch& patch) {
  const auto pts = to_normalized_vertices(patch);
  const int n = static_cast<int>(pts.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n])) return false;
    }
  }
  return true;
}

RasterizedMask rasterize_mask(const PolygonPatch& patch, int width, int height) {
  if (width < 1 || height < 1) throw InputError("mask dimensions must be positive");
  const auto norm = to_normalized_vertices(patch);
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(norm.size());
  for (const auto& p : norm) pts.emplace_back(p.x() * width, p.y() * height);

  RasterizedMask out{Mask::Constant(height, width, false), false};
  const std::size_t n = pts.size();
  std::vector<double> xs;
  xs.reserve(n);
  for (int py = 0; py < height; ++py) {
    const double yc = py + 0.5;
    xs.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = pts[i];
      const auto& b = pts[(i + 1) % n];
      // Half-open crossing rule: each vertex is counted on exactly one side.
      if ((a.y() > yc) != (b.y() > yc)) {
        xs.push_back(a.x() + (yc - a.y()) * (b.x() - a.x()) / (b.y() - a.y()));
      }
    }
    std::sort(xs.begin(), xs.end());
    // Center xc is inside iff an odd number of crossings lie strictly right
    // of it, i.e. xc in [xs[2j], xs[2j+1]).
    for (std::size_t j = 0; j + 1 < xs.size(); j += 2) {
      const int first = std::max(0, static_cast<int>(std::ceil(xs[j] - 0.5)));
      const int last = std::min(width - 1, static_cast<int>(std::ceil(xs[j + 1] - 0.5)) - 1);
      for (int px = first; px <= last; ++px) out.pixels(py, px) = true;
    }
  }
  out.degenerate = !out.pixels.any();
  return out;
}

PolygonPatch clamp_to_cells(std::span<const double> raw) {
  if (raw.size() % 2 != 0) throw InputError("raw patch vector must have even length");
  const int n = static_cast<int>(raw.size() / 2);
  const auto cells = default_cells(n);
  std::vector<GridCellVertex> vs;
  vs.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double u = std::clamp(raw[2 * k], 0.0, 1.0);
    const double v = std::clamp(raw[2 * k + 1], 0.0, 1.0);
    vs.push_back({cells[k], std::isnan(u) ? 0.5 : u, std::isnan(v) ? 0.5 : v});
  }
  return PolygonPatch(std::move(vs));
}

}  // namespace patchforge
