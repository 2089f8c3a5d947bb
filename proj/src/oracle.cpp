#include "patchforge/oracle.hpp"

#include <algorithm>

namespace patchforge {

namespace {

void require_box(const Image& image, const BoundingBox& box) {
  if (!box.fits_in(image.width(), image.height()))
    throw InputError("toy oracle box exceeds the image");
}

double saturating(double fraction, double saturation) {
  return std::max(0.0, 1.0 - fraction / saturation);
}

}  // namespace

double matched_confidence(const std::vector<Detection>& detections, const BoundingBox& target,
                          std::string_view class_label) {
  double best = 0.0;
  for (const auto& d : detections) {
    if (d.class_label != class_label) continue;
    if (iou(d.box, target) < kMatchIou) continue;
    best = std::max(best, d.confidence);
  }
  return best;
}

double target_confidence(DetectorOracle& oracle, const Image& image, const BoundingBox& target,
                         std::string_view class_label) {
  return matched_confidence(oracle.detect(image), target, class_label);
}

double toy_infrared_confidence(const Image& image, const BoundingBox& box,
                               const ToyInfraredParams& params) {
  require_modality(image, Modality::Infrared);
  require_box(image, box);
  const auto region = image.plane(0).block(box.y, box.x, box.h, box.w);
  const double dark = static_cast<double>((region < params.dark_threshold).count()) / box.area();
  return saturating(dark, params.saturation);
}

double toy_visible_confidence(const Image& image, const BoundingBox& box,
                              const ToyVisibleParams& params) {
  require_modality(image, Modality::Visible);
  require_box(image, box);
  Image::Plane dist2 = Image::Plane::Zero(box.h, box.w);
  for (int c = 0; c < 3; ++c) {
    dist2 += (image.plane(c).block(box.y, box.x, box.h, box.w) - params.reference_color[c]).square();
  }
  const double t2 = params.color_threshold * params.color_threshold;
  const double off = static_cast<double>((dist2 > t2).count()) / box.area();
  return saturating(off, params.saturation);
}

std::vector<Detection> ToyInfraredOracle::do_detect(const Image& image) {
  const double conf = toy_infrared_confidence(image, box_, params_);
  if (conf <= 0.0) return {};
  return {Detection{label_, conf, box_}};
}

std::vector<Detection> ToyVisibleOracle::do_detect(const Image& image) {
  const double conf = toy_visible_confidence(image, box_, params_);
  if (conf <= 0.0) return {};
  return {Detection{label_, conf, box_}};
}

}  // namespace patchforge
