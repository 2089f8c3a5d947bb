#ifndef PATCHFORGE_PNG_IO_HPP
#define PATCHFORGE_PNG_IO_HPP

#include "patchforge/image.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace patchforge {

class ImageIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::uint8_t to_byte(double v);

/// Gray and gray+alpha PNGs load as one channel; RGB and RGBA as three.
/// Alpha is dropped. A three-channel image whose channels are all equal is
/// still returned as RGB; use to_grayscale() for replicated-channel infrared.
Image decode_png(std::span<const std::uint8_t> bytes);
Image read_png(const std::filesystem::path& path);

/// Takes the first channel when all three channels are identical, otherwise
/// the Rec. 601 luma.
Image to_grayscale(const Image& x);

/// 8-bit encode. `alpha`, when given, must match the image size and is
/// written as a 0/255 alpha channel.
std::vector<std::uint8_t> encode_png(const Image& x, const Mask* alpha = nullptr);
void write_png(const std::filesystem::path& path, const Image& x, const Mask* alpha = nullptr);

}  // namespace patchforge

#endif  // PATCHFORGE_PNG_IO_HPP
