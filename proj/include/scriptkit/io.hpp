#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace scriptkit::io {

/// Whole file as bytes. Throws scriptkit::Error when it cannot be read.
std::string read_file(const std::filesystem::path& path);
/// Lines without terminators; a trailing '\r' is dropped.
std::vector<std::string> read_lines(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over the target.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace scriptkit::io
