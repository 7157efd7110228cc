#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace cascadenet {

/// Six significant digits, the precision used for every human-facing CSV.
std::string format_sig6(double value);

/// Shortest decimal that round-trips to the same double.
std::string format_full(double value);

/// Writes `content` to `path`, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, std::string_view content);

std::string read_text_file(const std::filesystem::path& path);

/// Quotes a CSV field only when it contains a delimiter, quote, or newline.
std::string csv_field(std::string_view text);

}  // namespace cascadenet
