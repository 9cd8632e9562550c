#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace umig::io {

/// Whole file contents. Throws Error when the file cannot be read.
std::string read_file(const std::filesystem::path& p);

/// Writes to a sibling temporary file, then renames it over `p`.
void write_file_atomic(const std::filesystem::path& p, std::string_view content);

}  // namespace umig::io
