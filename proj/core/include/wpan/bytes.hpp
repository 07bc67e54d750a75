#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wpan {

using Bytes = std::vector<std::uint8_t>;

/// Lowercase hex, two characters per octet, no separators.
std::string to_hex(const Bytes& data);

/// Inverse of to_hex; accepts upper or lower case.
/// Throws std::invalid_argument on odd length or non-hex characters.
Bytes from_hex(const std::string& hex);

}  // namespace wpan
