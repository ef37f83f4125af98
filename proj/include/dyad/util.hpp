#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace dyad {

std::string read_text_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename so readers never see partial output.
void write_text_file(const std::filesystem::path& path, std::string_view content);

/// 64-bit FNV-1a; stable across platforms.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

/// Shortest round-trippable decimal form.
std::string format_double(double value);
/// Fixed-significance form used in tables.
std::string format_table_double(double value);

std::string_view trim(std::string_view s);

}  // namespace dyad
