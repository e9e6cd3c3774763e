#pragma once

#include <string>

namespace sscope {

/// Formats a double with 17 significant digits (round-trip exact).
std::string g17(double x);

/// Writes content to path atomically enough for our purposes (truncate +
/// write + close), throwing std::runtime_error on failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace sscope
