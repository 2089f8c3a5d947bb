#include "patchforge/eot.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace patchforge {

namespace {

// a + t*(b-a) keeps constant inputs exact.
double lerp(double a, double b, double t) { return a + t * (b - a); }

double sample_bilinear(const Image::Plane& p, double fx, double fy) {
  const int w = static_cast<int>(p.cols());
  const int h = static_cast<int>(p.rows());
  const double x0f = std::floor(fx);
  const double y0f = std::floor(fy);
  const double ax = fx - x0f;
  const double ay = fy - y0f;
  const int x0 = std::clamp(static_cast<int>(x0f), 0, w - 1);
  const int x1 = std::clamp(static_cast<int>(x0f) + 1, 0, w - 1);
  const int y0 = std::clamp(static_cast<int>(y0f), 0, h - 1);
  const int y1 = std::clamp(static_cast<int>(y0f) + 1, 0, h - 1);
  const double top = lerp(p(y0, x0), p(y0, x1), ax);
  const double bottom = lerp(p(y1, x0), p(y1, x1), ax);
  return std::clamp(lerp(top, bottom, ay), 0.0, 1.0);
}

double draw(const Range& r, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(r.lo, r.hi);
  const double v = dist(rng);
  return r.lo == r.hi ? r.lo : v;
}

}  // namespace

EotConfig EotConfig::identity(int n_samples) {
  EotConfig cfg;
  cfg.n_samples = n_samples;
  cfg.eval_samples = n_samples;
  cfg.rotation_deg = {0.0, 0.0};
  cfg.translation = {0.0, 0.0};
  cfg.scale = {1.0, 1.0};
  cfg.brightness = {0.0, 0.0};
  cfg.downsample = {1.0, 1.0};
  return cfg;
}

void EotConfig::validate() const {
  if (n_samples < 1) throw InputError("eot.n_samples must be >= 1");
  if (eval_samples < 1) throw InputError("eot.eval_samples must be >= 1");
  for (const Range* r : {&rotation_deg, &translation, &scale, &brightness, &downsample}) {
    if (!r->valid()) throw InputError("eot ranges must be non-empty (lo <= hi)");
  }
  if (scale.lo <= 0.0) throw InputError("eot.scale must be positive");
  if (downsample.lo <= 0.0 || downsample.hi > 1.0)
    throw InputError("eot.downsample must lie in (0,1]");
}

std::vector<CompositeTransform> sample_transforms(const EotConfig& cfg, int count,
                                                  std::mt19937_64& rng) {
  cfg.validate();
  std::vector<CompositeTransform> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    CompositeTransform t;
    t.view.angle_deg = draw(cfg.rotation_deg, rng);
    t.view.tx = draw(cfg.translation, rng);
    t.view.ty = draw(cfg.translation, rng);
    t.view.scale = draw(cfg.scale, rng);
    t.brightness.delta = draw(cfg.brightness, rng);
    t.downsample.factor = draw(cfg.downsample, rng);
    out.push_back(t);
  }
  return out;
}

std::vector<CompositeTransform> sample_transforms(const EotConfig& cfg, std::mt19937_64& rng) {
  return sample_transforms(cfg, cfg.n_samples, rng);
}

Image resize_bilinear(const Image& x, int width, int height) {
  if (width == x.width() && height == x.height()) return x;
  Image out(width, height, x.channels());
  const double sx = static_cast<double>(x.width()) / width;
  const double sy = static_cast<double>(x.height()) / height;
  for (int c = 0; c < x.channels(); ++c) {
    const auto& src = x.plane(c);
    auto& dst = out.plane(c);
    for (int py = 0; py < height; ++py) {
      const double fy = (py + 0.5) * sy - 0.5;
      for (int px = 0; px < width; ++px) dst(py, px) = sample_bilinear(src, (px + 0.5) * sx - 0.5, fy);
    }
  }
  return out;
}

Image apply(const ViewTransform& t, const Image& x) {
  if (t.is_identity()) return x;
  const double w = x.width();
  const double h = x.height();
  const double cx = 0.5 * w;
  const double cy = 0.5 * h;
  const double rad = t.angle_deg * std::numbers::pi / 180.0;
  const double cs = std::cos(rad);
  const double sn = std::sin(rad);
  Image out(x.width(), x.height(), x.channels());
  for (int py = 0; py < x.height(); ++py) {
    for (int px = 0; px < x.width(); ++px) {
      // Inverse map: undo translation, scale, then rotation.
      const double qx = (px + 0.5 - cx - t.tx * w) / t.scale;
      const double qy = (py + 0.5 - cy - t.ty * h) / t.scale;
      const double sx = cx + cs * qx + sn * qy;
      const double sy = cy - sn * qx + cs * qy;
      for (int c = 0; c < x.channels(); ++c)
        out(px, py, c) = sample_bilinear(x.plane(c), sx - 0.5, sy - 0.5);
    }
  }
  return out;
}

Image apply(const BrightnessTransform& t, const Image& x) {
  if (t.is_identity()) return x;
  Image out = x;
  for (int c = 0; c < out.channels(); ++c) out.plane(c) = (out.plane(c) + t.delta).min(1.0).max(0.0);
  return out;
}

Image apply(const DownsampleTransform& t, const Image& x) {
  if (t.is_identity()) return x;
  const int dw = std::max(1, static_cast<int>(std::lround(x.width() * t.factor)));
  const int dh = std::max(1, static_cast<int>(std::lround(x.height() * t.factor)));
  return resize_bilinear(resize_bilinear(x, dw, dh), x.width(), x.height());
}

Image apply(const TransformSpec& t, const Image& x) {
  return std::visit([&x](const auto& spec) { return apply(spec, x); }, t);
}

Image apply(const CompositeTransform& t, const Image& x) {
  if (t.is_identity()) return x;
  return apply(t.view, apply(t.brightness, apply(t.downsample, x)));
}

double expected_confidence(DetectorOracle& oracle, const std::function<Image()>& make_adv,
                           std::span<const CompositeTransform> transforms,
                           const BoundingBox& target, std::string_view class_label) {
  if (transforms.empty()) throw InputError("expected_confidence needs at least one transform");
  const Image adv = make_adv();
  double sum = 0.0;
  std::uint64_t done = 0;
  for (const auto& t : transforms) {
    try {
      sum += target_confidence(oracle, apply(t, adv), target, class_label);
    } catch (const InputError&) {
      throw;
    } catch (const std::exception& e) {
      throw OracleError(e.what(), done);
    }
    ++done;
  }
  return sum / static_cast<double>(transforms.size());
}

}  // namespace patchforge
