#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace voxenc::detail {

// Shortest decimal that parses back to the same double.
std::string format_double(double v);

// Like format_double in fixed notation, padded to at least `min_decimals`.
std::string format_fixed(double v, int min_decimals);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<std::uint64_t> parse_uint(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

}  // namespace voxenc::detail
