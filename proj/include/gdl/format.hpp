#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace gdl {

/// 17 significant digits, round-trip exact for doubles ("nan"/"inf" for non-finite).
std::string format_double(double v);

/// Writes to a temporary sibling file and renames it over `path`.
void write_file_atomically(const std::filesystem::path& path, std::string_view contents);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace gdl
