#ifndef PATCHFORGE_BASE64_HPP
#define PATCHFORGE_BASE64_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace patchforge {

/// Standard alphabet with '=' padding.
std::string base64_encode(std::span<const std::uint8_t> bytes);

/// Empty optional on any character outside the alphabet or bad padding.
std::optional<std::vector<std::uint8_t>> base64_decode(std::string_view text);

}  // namespace patchforge

#endif  // PATCHFORGE_BASE64_HPP
