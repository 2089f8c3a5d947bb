#ifndef PATCHFORGE_EOT_HPP
#define PATCHFORGE_EOT_HPP

#include "patchforge/geometry.hpp"
#include "patchforge/image.hpp"
#include "patchforge/oracle.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace patchforge {

struct Range {
  double lo = 0.0;
  double hi = 0.0;

  bool valid() const { return lo <= hi; }
  bool contains(double v) const { return lo <= v && v <= hi; }
  friend bool operator==(const Range&, const Range&) = default;
};

/// Transform distribution. Translation is a fraction of the image size,
/// applied independently to x and y.
struct EotConfig {
  int n_samples = 5;       // per fitness evaluation
  int eval_samples = 20;   // for final success measurement
  Range rotation_deg{-10.0, 10.0};
  Range translation{-0.05, 0.05};
  Range scale{0.9, 1.1};
  Range brightness{-0.15, 0.15};
  Range downsample{0.5, 1.0};
  std::uint64_t seed = 0;

  /// A config whose every sample is the identity.
  static EotConfig identity(int n_samples = 1);
  void validate() const;
};

/// Rotation about the image center, then scaling about the center, then
/// translation.
struct ViewTransform {
  double angle_deg = 0.0;
  double tx = 0.0;
  double ty = 0.0;
  double scale = 1.0;

  bool is_identity() const { return angle_deg == 0.0 && tx == 0.0 && ty == 0.0 && scale == 1.0; }
  friend bool operator==(const ViewTransform&, const ViewTransform&) = default;
};

struct BrightnessTransform {
  double delta = 0.0;

  bool is_identity() const { return delta == 0.0; }
  friend bool operator==(const BrightnessTransform&, const BrightnessTransform&) = default;
};

/// Resize down by `factor`, then back up to the original size.
struct DownsampleTransform {
  double factor = 1.0;

  bool is_identity() const { return factor == 1.0; }
  friend bool operator==(const DownsampleTransform&, const DownsampleTransform&) = default;
};

using TransformSpec = std::variant<ViewTransform, BrightnessTransform, DownsampleTransform>;

/// view o brightness o downsample: the downsample runs first.
struct CompositeTransform {
  ViewTransform view;
  BrightnessTransform brightness;
  DownsampleTransform downsample;

  bool is_identity() const {
    return view.is_identity() && brightness.is_identity() && downsample.is_identity();
  }
  friend bool operator==(const CompositeTransform&, const CompositeTransform&) = default;
};

std::vector<CompositeTransform> sample_transforms(const EotConfig& cfg, std::mt19937_64& rng);
std::vector<CompositeTransform> sample_transforms(const EotConfig& cfg, int count,
                                                  std::mt19937_64& rng);

Image apply(const ViewTransform& t, const Image& x);
Image apply(const BrightnessTransform& t, const Image& x);
Image apply(const DownsampleTransform& t, const Image& x);
Image apply(const TransformSpec& t, const Image& x);
Image apply(const CompositeTransform& t, const Image& x);

/// Bilinear resize sampling at pixel centers with edge clamping.
Image resize_bilinear(const Image& x, int width, int height);

/// Monte Carlo estimate of E_t[confidence(t(make_adv()))]: one oracle query
/// per transform. On oracle failure throws OracleError with the number of
/// queries already completed in this call.
double expected_confidence(DetectorOracle& oracle, const std::function<Image()>& make_adv,
                           std::span<const CompositeTransform> transforms,
                           const BoundingBox& target, std::string_view class_label);

}  // namespace patchforge

#endif  // PATCHFORGE_EOT_HPP
