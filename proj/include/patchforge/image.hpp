#ifndef PATCHFORGE_IMAGE_HPP
#define PATCHFORGE_IMAGE_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace patchforge {

/// Raised for malformed arguments: out-of-range indices, modality mismatches,
/// bad configuration values.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Modality { Infrared, Visible };

inline int channels_for(Modality m) { return m == Modality::Infrared ? 1 : 3; }

inline const char* to_string(Modality m) {
  return m == Modality::Infrared ? "infrared" : "visible";
}

using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Planar image with values in [0,1]. One plane for infrared, three (RGB)
/// for visible. Planes are row-major height x width arrays.
template <typename Scalar>
class BasicImage {
 public:
  using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  BasicImage() = default;

  BasicImage(int width, int height, int channels, Scalar fill = Scalar(0)) {
    if (width < 1 || height < 1) throw InputError("image dimensions must be positive");
    if (channels != 1 && channels != 3) throw InputError("image must have 1 or 3 channels");
    planes_.assign(static_cast<std::size_t>(channels), Plane::Constant(height, width, fill));
  }

  static BasicImage uniform(int width, int height, std::initializer_list<Scalar> value) {
    BasicImage img(width, height, static_cast<int>(value.size()));
    int c = 0;
    for (Scalar v : value) img.planes_[c++].setConstant(v);
    return img;
  }

  int width() const { return planes_.empty() ? 0 : static_cast<int>(planes_.front().cols()); }
  int height() const { return planes_.empty() ? 0 : static_cast<int>(planes_.front().rows()); }
  int channels() const { return static_cast<int>(planes_.size()); }
  bool empty() const { return planes_.empty(); }

  Plane& plane(int c) { return planes_.at(static_cast<std::size_t>(c)); }
  const Plane& plane(int c) const { return planes_.at(static_cast<std::size_t>(c)); }

  Scalar& operator()(int x, int y, int c = 0) { return planes_[c](y, x); }
  Scalar operator()(int x, int y, int c = 0) const { return planes_[c](y, x); }

  bool has_modality(Modality m) const { return channels() == channels_for(m); }

  bool in_unit_range() const {
    for (const auto& p : planes_) {
      if ((p < Scalar(0)).any() || (p > Scalar(1)).any()) return false;
    }
    return true;
  }

  friend bool operator==(const BasicImage& a, const BasicImage& b) {
    if (a.channels() != b.channels() || a.width() != b.width() || a.height() != b.height())
      return false;
    for (int c = 0; c < a.channels(); ++c) {
      if ((a.planes_[c] != b.planes_[c]).any()) return false;
    }
    return true;
  }

 private:
  std::vector<Plane> planes_;
};

using Image = BasicImage<double>;

inline void require_modality(const Image& img, Modality m) {
  if (!img.has_modality(m)) {
    throw InputError(std::string("expected a ") + to_string(m) + " image with " +
                     std::to_string(channels_for(m)) + " channel(s), got " +
                     std::to_string(img.channels()));
  }
}

/// Pixels whose value differs in any channel.
inline Mask changed_pixels(const Image& a, const Image& b) {
  if (a.channels() != b.channels() || a.width() != b.width() || a.height() != b.height())
    throw InputError("changed_pixels: image shapes differ");
  Mask diff = Mask::Constant(a.height(), a.width(), false);
  for (int c = 0; c < a.channels(); ++c) diff = diff || (a.plane(c) != b.plane(c));
  return diff;
}

}  // namespace patchforge

#endif  // PATCHFORGE_IMAGE_HPP
