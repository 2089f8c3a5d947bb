#include "patchforge/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

namespace patchforge {

namespace {

struct PngImageGuard {
  png_image* img;
  ~PngImageGuard() { png_image_free(img); }
};

}  // namespace

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

Image decode_png(std::span<const std::uint8_t> bytes) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  PngImageGuard guard{&img};
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size()))
    throw ImageIoError(std::string("png decode failed: ") + img.message);
  const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr))
    throw ImageIoError(std::string("png decode failed: ") + img.message);
  const int w = static_cast<int>(img.width);
  const int h = static_cast<int>(img.height);
  Image out(w, h, channels);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < channels; ++c)
        out(x, y, c) = buf[static_cast<std::size_t>((y * w + x) * channels + c)] / 255.0;
  return out;
}

Image read_png(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_png(bytes);
  } catch (const ImageIoError& e) {
    throw ImageIoError(path.string() + ": " + e.what());
  }
}

Image to_grayscale(const Image& x) {
  if (x.channels() == 1) return x;
  Image out(x.width(), x.height(), 1);
  const bool replicated = (x.plane(0) == x.plane(1)).all() && (x.plane(0) == x.plane(2)).all();
  if (replicated) {
    out.plane(0) = x.plane(0);
  } else {
    out.plane(0) = (0.299 * x.plane(0) + 0.587 * x.plane(1) + 0.114 * x.plane(2)).min(1.0).max(0.0);
  }
  return out;
}

std::vector<std::uint8_t> encode_png(const Image& x, const Mask* alpha) {
  if (x.empty()) throw ImageIoError("cannot encode an empty image");
  if (alpha && (alpha->rows() != x.height() || alpha->cols() != x.width()))
    throw InputError("alpha mask size does not match the image");
  const int w = x.width();
  const int h = x.height();
  const int in_ch = x.channels();
  const int out_ch = in_ch + (alpha ? 1 : 0);
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(w) * h * out_ch);
  for (int y = 0; y < h; ++y) {
    for (int xx = 0; xx < w; ++xx) {
      auto* px = &buf[static_cast<std::size_t>((y * w + xx) * out_ch)];
      for (int c = 0; c < in_ch; ++c) px[c] = to_byte(x(xx, y, c));
      if (alpha) px[in_ch] = (*alpha)(y, xx) ? 255 : 0;
    }
  }
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(w);
  img.height = static_cast<png_uint_32>(h);
  img.format = in_ch == 3 ? (alpha ? PNG_FORMAT_RGBA : PNG_FORMAT_RGB)
                          : (alpha ? PNG_FORMAT_GA : PNG_FORMAT_GRAY);
  PngImageGuard guard{&img};
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, buf.data(), 0, nullptr))
    throw ImageIoError(std::string("png encode failed: ") + img.message);
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, buf.data(), 0, nullptr))
    throw ImageIoError(std::string("png encode failed: ") + img.message);
  out.resize(size);
  return out;
}

void write_png(const std::filesystem::path& path, const Image& x, const Mask* alpha) {
  const auto bytes = encode_png(x, alpha);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageIoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ImageIoError("write failed: " + path.string());
}

}  // namespace patchforge
