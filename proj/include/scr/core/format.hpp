#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scr {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

std::optional<double> parse_double(std::string_view text);

std::vector<std::string_view> split(std::string_view text, char sep);

std::string_view trim(std::string_view text);

/// 16 lowercase hex digits.
std::string hex64(std::uint64_t v);

} // namespace scr
