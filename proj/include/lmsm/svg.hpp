#pragma once

#include <string>

#include "lmsm/csv.hpp"

namespace lmsm {

/// Static SVG: one stacked panel per data column, plotted against the first
/// column. Comment lines of the CSV are echoed as a caption. A column with a
/// single row is drawn as one marker. Throws SchemaError for tables with fewer
/// than two columns, no rows, or non-finite values.
std::string render_svg(const CsvTable& table);

}  // namespace lmsm
