#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace lmsm {

/// Shortest round-trip decimal form; always '.' as separator, independent of locale.
std::string format_double(double x);
/// Fixed-point form with the given number of decimals (for SVG coordinates).
std::string format_fixed(double x, int decimals);
double parse_double(std::string_view text);

/// Numeric CSV with optional leading '#' comment lines.
struct CsvTable {
  std::vector<std::string> comments;  // without the leading '#', trimmed
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(std::string_view name) const;  // throws SchemaError if absent
};

/// Throws SchemaError on ragged rows or non-numeric cells.
CsvTable read_csv(std::istream& in);

/// Writes to "<path>.tmp" and renames over `path`. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace lmsm
