#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace dln {

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = 0xcbf29ce484222325ULL);

std::string to_hex(std::uint64_t value);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

}  // namespace dln
