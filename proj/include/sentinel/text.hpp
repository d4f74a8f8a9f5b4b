#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sentinel {

/// Decodes bytes as UTF-8, replacing each invalid sequence with U+FFFD.
std::string decode_utf8_lossy(std::string_view bytes);

/// Number of code points in a valid UTF-8 string.
std::size_t utf8_length(std::string_view text) noexcept;

std::string ascii_lower(std::string_view text);
std::string_view trim(std::string_view text) noexcept;
bool iequals(std::string_view a, std::string_view b) noexcept;
bool istarts_with(std::string_view text, std::string_view prefix) noexcept;

/// Splits on \n, \r\n or \r. A trailing newline does not produce an empty last line.
std::vector<std::string_view> split_lines(std::string_view text);

/// Parses a word-list file: one entry per line, '#' starts a comment, blanks ignored.
std::vector<std::string> parse_word_list(std::string_view text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

} // namespace sentinel
