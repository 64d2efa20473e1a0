#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace uniclass::detail {

std::string read_file(const std::filesystem::path& path);

/// Writes the whole buffer, creating parent directories.
void write_file(const std::filesystem::path& path, std::string_view contents);

std::string trim(std::string_view s);
std::string ascii_lower(std::string_view s);

/// 16 lowercase hex digits.
std::string hex64(std::uint64_t value);

}  // namespace uniclass::detail
