#ifndef PATCHFORGE_GEOMETRY_HPP
#define PATCHFORGE_GEOMETRY_HPP

#include "patchforge/image.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace patchforge {

/// Axis-aligned pixel rectangle.
struct BoundingBox {
  int x = 0;
  int y = 0;
  int w = 1;
  int h = 1;

  bool fits_in(int width, int height) const {
    return w > 0 && h > 0 && x >= 0 && y >= 0 && x + w <= width && y + h <= height;
  }
  double area() const { return static_cast<double>(w) * h; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

double iou(const BoundingBox& a, const BoundingBox& b);

inline constexpr int kPerimeterCells = 8;
inline constexpr int kMinVertices = 3;
inline constexpr int kMaxVertices = 8;

/// A polygon vertex confined to one of the eight outer cells of the 3x3
/// lattice over the bounding box. Cells are numbered clockwise from the
/// top-left corner; (u, v) is the position inside the cell, normalized.
struct GridCellVertex {
  int cell = 0;
  double u = 0.5;
  double v = 0.5;

  friend bool operator==(const GridCellVertex&, const GridCellVertex&) = default;
};

struct NormalizedRect {
  double x0, y0, x1, y1;
};

/// Sub-square of the unit box occupied by perimeter cell `cell` (0..7).
NormalizedRect perimeter_cell_rect(int cell);

/// Maximally spaced cells for an n-vertex patch: round(k * 8 / n).
std::vector<int> default_cells(int n);

/// Polygon with 3..8 vertices in distinct, strictly increasing perimeter
/// cells. Immutable once constructed.
class PolygonPatch {
 public:
  explicit PolygonPatch(std::vector<GridCellVertex> vertices);

  /// Every vertex at the center of its cell, on the default layout.
  static PolygonPatch cell_centers(int n);
  /// Cells {0..7} with vertices at the outer box corners and edge midpoints;
  /// the resulting polygon is the whole box.
  static PolygonPatch full_square();

  const std::vector<GridCellVertex>& vertices() const { return vertices_; }
  int size() const { return static_cast<int>(vertices_.size()); }
  std::vector<int> cells() const;

  friend bool operator==(const PolygonPatch&, const PolygonPatch&) = default;

 private:
  std::vector<GridCellVertex> vertices_;
};

/// Vertex positions in [0,1]^2, in patch order.
std::vector<Eigen::Vector2d> to_normalized_vertices(const PolygonPatch& patch);

/// Signed shoelace area (positive for counter-clockwise in y-up axes).
double signed_area(std::span<const Eigen::Vector2d> points);

/// Unsigned shoelace area of the normalized polygon.
double polygon_area(const PolygonPatch& patch);

/// True when no two non-adjacent edges intersect.
bool is_simple(const PolygonPatch& patch);

/// Binary mask of the patch at a given resolution. `degenerate` is set when
/// no pixel center falls inside the polygon; this is a legal state.
struct RasterizedMask {
  Mask pixels;
  bool degenerate = false;
};

/// Even-odd scanline fill sampled at pixel centers.
RasterizedMask rasterize_mask(const PolygonPatch& patch, int width, int height);

/// Builds a patch from a flat optimizer vector (u0, v0, u1, v1, ...).
/// Offsets are clamped into [0,1]; vertex k takes default_cells(n)[k].
PolygonPatch clamp_to_cells(std::span<const double> raw);

}  // namespace patchforge

#endif  // PATCHFORGE_GEOMETRY_HPP
