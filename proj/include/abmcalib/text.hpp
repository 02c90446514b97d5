#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace abmcalib {

/// Shortest decimal representation that round-trips the exact double.
/// Used for every number written to an artifact file so that identical
/// runs produce byte-identical output.
std::string fmt_double(double v);

/// Locale-independent double parse of the whole field.
/// Accepts "inf"/"-inf"/"nan"; throws InputError otherwise on failure.
double parse_double(std::string_view field);

/// Strict non-negative integer parse of the whole field.
long long parse_int(std::string_view field);

std::string_view trim(std::string_view s);

/// Splits one CSV line on commas. No quoting: none of the file formats
/// handled here carry embedded commas.
std::vector<std::string_view> split_csv(std::string_view line);

/// Reads a whole text file; throws IoError if it cannot be opened.
std::string read_text_file(const std::string& path);

/// Writes text to a file, replacing it; throws IoError on failure.
void write_text_file(const std::string& path, std::string_view content);

} // namespace abmcalib
