#pragma once

#include <cstddef>
#include <string_view>

namespace scr::log {

void warn(std::string_view message);
void info(std::string_view message);

/// Number of warnings emitted by this process so far.
std::size_t warning_count();

/// Silences stderr output (counters still advance). Used by tests.
void set_quiet(bool quiet);

} // namespace scr::log
