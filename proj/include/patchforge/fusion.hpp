#ifndef PATCHFORGE_FUSION_HPP
#define PATCHFORGE_FUSION_HPP

#include "patchforge/color_grid.hpp"
#include "patchforge/geometry.hpp"
#include "patchforge/image.hpp"

namespace patchforge {

/// Infrared intensity of the cold patch material.
class ColdIntensity {
 public:
  constexpr ColdIntensity() = default;
  explicit ColdIntensity(double value) : value_(value) {
    if (!(value >= 0.0 && value <= 1.0)) throw InputError("cold intensity must lie in [0,1]");
  }
  double value() const { return value_; }

 private:
  double value_ = 0.1;
};

// Both fusions rasterize the shape at box resolution and replace the masked
// pixels at integer offsets; nothing outside the box is touched.

Image fuse_infrared(const Image& x, const BoundingBox& box, const PolygonPatch& shape,
                    ColdIntensity cold = ColdIntensity{});

Image fuse_visible(const Image& x, const BoundingBox& box, const UnifiedPatch& patch);

}  // namespace patchforge

#endif  // PATCHFORGE_FUSION_HPP
