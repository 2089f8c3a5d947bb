#include "patchforge/fusion.hpp"

namespace patchforge {

namespace {

void require_box(const Image& x, const BoundingBox& box) {
  if (!box.fits_in(x.width(), x.height())) throw InputError("bounding box exceeds the image");
}

}  // namespace

Image fuse_infrared(const Image& x, const BoundingBox& box, const PolygonPatch& shape,
                    ColdIntensity cold) {
  require_modality(x, Modality::Infrared);
  require_box(x, box);
  const auto mask = rasterize_mask(shape, box.w, box.h);
  Image out = x;
  auto region = out.plane(0).block(box.y, box.x, box.h, box.w);
  region = mask.pixels.select(cold.value(), region);
  return out;
}

Image fuse_visible(const Image& x, const BoundingBox& box, const UnifiedPatch& patch) {
  require_modality(x, Modality::Visible);
  require_box(x, box);
  const auto mask = rasterize_mask(patch.shape, box.w, box.h);
  Image out = x;
  if (mask.degenerate) return out;
  const Image colors = render_grid(patch.grid, box.w, box.h);
  for (int c = 0; c < 3; ++c) {
    auto region = out.plane(c).block(box.y, box.x, box.h, box.w);
    region = mask.pixels.select(colors.plane(c), region);
  }
  return out;
}

}  // namespace patchforge
