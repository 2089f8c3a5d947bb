#include "patchforge/geometry.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

namespace pf = patchforge;
using pf::testing::brute_force_pixels;
using pf::testing::lattice_polygon;
using pf::testing::shoelace;

namespace {

double set_fraction(const pf::RasterizedMask& m) {
  return static_cast<double>(m.pixels.count()) / static_cast<double>(m.pixels.size());
}

pf::PolygonPatch at_centers(std::vector<int> cells) {
  std::vector<pf::GridCellVertex> vs;
  for (int c : cells) vs.push_back({c, 0.5, 0.5});
  return pf::PolygonPatch(std::move(vs));
}

}  // namespace

TEST(PerimeterCell, CornerAndEdgeCells) {
  const auto r0 = pf::perimeter_cell_rect(0);
  EXPECT_DOUBLE_EQ(r0.x0, 0.0);
  EXPECT_DOUBLE_EQ(r0.y0, 0.0);
  EXPECT_DOUBLE_EQ(r0.x1, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r0.y1, 1.0 / 3.0);

  const auto r4 = pf::perimeter_cell_rect(4);
  EXPECT_DOUBLE_EQ(r4.x0, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r4.y0, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r4.x1, 1.0);
  EXPECT_DOUBLE_EQ(r4.y1, 1.0);

  const auto r7 = pf::perimeter_cell_rect(7);
  EXPECT_DOUBLE_EQ(r7.x0, 0.0);
  EXPECT_DOUBLE_EQ(r7.y0, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r7.x1, 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(r7.y1, 2.0 / 3.0);
}

TEST(PerimeterCell, OutOfRangeIsInputError) {
  EXPECT_THROW(pf::perimeter_cell_rect(-1), pf::InputError);
  EXPECT_THROW(pf::perimeter_cell_rect(8), pf::InputError);
}

TEST(DefaultCells, RoundedSpacing) {
  EXPECT_EQ(pf::default_cells(8), (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7}));
  EXPECT_EQ(pf::default_cells(4), (std::vector<int>{0, 2, 4, 6}));
  EXPECT_EQ(pf::default_cells(3), (std::vector<int>{0, 3, 5}));
  EXPECT_THROW(pf::default_cells(2), pf::InputError);
  EXPECT_THROW(pf::default_cells(9), pf::InputError);
}

TEST(PolygonPatch, RejectsInvalidVertices) {
  using V = pf::GridCellVertex;
  EXPECT_THROW(pf::PolygonPatch({V{0}, V{1}}), pf::InputError);
  EXPECT_THROW(pf::PolygonPatch({V{0}, V{2}, V{2}}), pf::InputError);
  EXPECT_THROW(pf::PolygonPatch({V{3}, V{2}, V{5}}), pf::InputError);
  EXPECT_THROW(pf::PolygonPatch({V{0}, V{2}, V{8}}), pf::InputError);
  EXPECT_THROW(pf::PolygonPatch({V{0, 1.5, 0.5}, V{2}, V{4}}), pf::InputError);
  EXPECT_THROW(pf::PolygonPatch({V{0, 0.5, -0.1}, V{2}, V{4}}), pf::InputError);
}

TEST(NormalizedVertices, CellCenterAndBoxCorner) {
  const pf::PolygonPatch p({{0, 0.5, 0.5}, {2, 1.0, 0.0}, {5, 0.5, 0.5}});
  const auto pts = pf::to_normalized_vertices(p);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_DOUBLE_EQ(pts[0].x(), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(pts[0].y(), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(pts[1].x(), 1.0);
  EXPECT_DOUBLE_EQ(pts[1].y(), 0.0);
}

TEST(NormalizedVertices, MatchesIndependentLattice) {
  std::mt19937_64 rng(3);
  for (int n = 3; n <= 8; ++n) {
    const auto p = pf::testing::random_patch(rng, n);
    const auto pts = pf::to_normalized_vertices(p);
    const auto ref = lattice_polygon(p);
    for (int k = 0; k < n; ++k) {
      EXPECT_NEAR(pts[k].x(), ref[k].first, 1e-15);
      EXPECT_NEAR(pts[k].y(), ref[k].second, 1e-15);
    }
  }
}

TEST(NormalizedVertices, NeverInsideCenterCell) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const auto p = pf::testing::random_patch(rng, 3 + i % 6);
    for (const auto& q : pf::to_normalized_vertices(p)) {
      EXPECT_TRUE(q.x() >= 0.0 && q.x() <= 1.0 && q.y() >= 0.0 && q.y() <= 1.0);
      const bool in_center = q.x() > 1.0 / 3 && q.x() < 2.0 / 3 && q.y() > 1.0 / 3 && q.y() < 2.0 / 3;
      EXPECT_FALSE(in_center);
    }
  }
}

TEST(PolygonArea, KnownShapes) {
  // Cell-center octagon: the square [1/6, 5/6]^2, side 2/3.
  EXPECT_NEAR(pf::polygon_area(pf::PolygonPatch::cell_centers(8)), 4.0 / 9.0, 1e-15);
  EXPECT_NEAR(pf::polygon_area(pf::PolygonPatch::full_square()), 1.0, 1e-15);
  // Cells 0, 3, 6 at centers: (1/6,1/6), (5/6,1/2), (1/6,5/6); half |(2/3)(2/3) - 0| = 2/9.
  const double tri = shoelace({{1.0 / 6, 1.0 / 6}, {5.0 / 6, 0.5}, {1.0 / 6, 5.0 / 6}});
  EXPECT_NEAR(tri, 2.0 / 9.0, 1e-15);
  EXPECT_NEAR(pf::polygon_area(at_centers({0, 3, 6})), tri, 1e-15);
}

TEST(PolygonArea, CollinearIsZero) {
  // Top row: (cell 0, v=0), (cell 1, v=0), (cell 2, v=0) all on y = 0.
  const pf::PolygonPatch p({{0, 0.2, 0.0}, {1, 0.5, 0.0}, {2, 0.9, 0.0}});
  EXPECT_DOUBLE_EQ(pf::polygon_area(p), 0.0);
  const auto m = pf::rasterize_mask(p, 50, 50);
  EXPECT_TRUE(m.degenerate);
  EXPECT_EQ(m.pixels.count(), 0);
}

TEST(PolygonArea, MatchesIndependentShoelace) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto p = pf::testing::random_patch(rng, 3 + i % 6);
    EXPECT_NEAR(pf::polygon_area(p), shoelace(lattice_polygon(p)), 1e-14);
  }
}

TEST(RasterizeMask, FullSquareFillsBox) {
  const auto m = pf::rasterize_mask(pf::PolygonPatch::full_square(), 90, 90);
  EXPECT_EQ(m.pixels.count(), 8100);
  EXPECT_FALSE(m.degenerate);
}

TEST(RasterizeMask, CenterOctagonAt300) {
  const auto m = pf::rasterize_mask(pf::PolygonPatch::cell_centers(8), 300, 300);
  EXPECT_NEAR(set_fraction(m), 4.0 / 9.0, 0.01 * 4.0 / 9.0);
}

TEST(RasterizeMask, TriangleAt300) {
  const auto p = at_centers({0, 3, 6});
  const double area = shoelace(lattice_polygon(p));
  EXPECT_NEAR(set_fraction(pf::rasterize_mask(p, 300, 300)), area, 0.01 * area);
}

TEST(RasterizeMask, ConvergesWithResolution) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 30; ++i) {
    const auto p = pf::testing::random_patch(rng, 3 + i % 6);
    const auto pts = lattice_polygon(p);
    const double area = shoelace(pts);
    const double per = pf::testing::perimeter(pts);
    for (int r : {100, 300, 1000}) {
      EXPECT_LE(std::abs(set_fraction(pf::rasterize_mask(p, r, r)) - area), 4.0 * per / r);
    }
  }
}

TEST(RasterizeMask, AgreesWithPointInPolygon) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 60; ++i) {
    const auto p = pf::testing::random_patch(rng, 3 + i % 6);
    const int w = 37 + i;
    const int h = 29 + 2 * i;
    const auto m = pf::rasterize_mask(p, w, h);
    const long expected = brute_force_pixels(lattice_polygon(p), w, h);
    // Pixel centers exactly on an edge may resolve either way.
    EXPECT_NEAR(static_cast<double>(m.pixels.count()), static_cast<double>(expected), 0.002 * w * h + 2);
  }
}

TEST(RasterizeMask, Deterministic) {
  std::mt19937_64 rng(29);
  const auto p = pf::testing::random_patch(rng, 7);
  const auto a = pf::rasterize_mask(p, 123, 77);
  const auto b = pf::rasterize_mask(p, 123, 77);
  EXPECT_TRUE((a.pixels == b.pixels).all());
}

TEST(RasterizeMask, RejectsEmptySize) {
  EXPECT_THROW(pf::rasterize_mask(pf::PolygonPatch::full_square(), 0, 5), pf::InputError);
}

TEST(ClampToCells, Examples) {
  const std::vector<double> feasible{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  const auto p = pf::clamp_to_cells(feasible);
  EXPECT_EQ(p.cells(), pf::default_cells(3));
  for (int k = 0; k < 3; ++k) {
    EXPECT_EQ(p.vertices()[k].u, feasible[2 * k]);
    EXPECT_EQ(p.vertices()[k].v, feasible[2 * k + 1]);
  }
  const std::vector<double> raw{1.7, 0.5, -0.3, 0.4, 0.5, 0.5};
  const auto q = pf::clamp_to_cells(raw);
  EXPECT_EQ(q.vertices()[0].u, 1.0);
  EXPECT_EQ(q.vertices()[1].u, 0.0);
  EXPECT_EQ(q.vertices()[1].v, 0.4);
}

TEST(ClampToCells, BadLengthIsInputError) {
  EXPECT_THROW(pf::clamp_to_cells(std::vector<double>(5, 0.5)), pf::InputError);
  EXPECT_THROW(pf::clamp_to_cells(std::vector<double>(4, 0.5)), pf::InputError);
  EXPECT_THROW(pf::clamp_to_cells(std::vector<double>(18, 0.5)), pf::InputError);
}

TEST(Simplicity, DefaultLayoutsAreSimple) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 2000; ++i) EXPECT_TRUE(pf::is_simple(pf::testing::random_patch(rng, 3 + i % 6)));
}

TEST(Simplicity, IncreasingCellsAloneDoNotGuaranteeSimplicity) {
  const pf::PolygonPatch p({{3, 1.0, 0.8}, {4, 0.5, 0.6}, {5, 0.1, 0.1}, {6, 0.8, 0.7}});
  EXPECT_GT(pf::testing::crossing_pairs(lattice_polygon(p)), 0);
  EXPECT_FALSE(pf::is_simple(p));
}

TEST(Iou, Basic) {
  EXPECT_DOUBLE_EQ(pf::iou({0, 0, 10, 10}, {0, 0, 10, 10}), 1.0);
  EXPECT_DOUBLE_EQ(pf::iou({0, 0, 10, 10}, {20, 20, 5, 5}), 0.0);
  EXPECT_DOUBLE_EQ(pf::iou({0, 0, 10, 10}, {5, 0, 10, 10}), 50.0 / 150.0);
}
