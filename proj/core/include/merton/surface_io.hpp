#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "merton/surface.hpp"

// Text and image encodings of a SurfaceGrid. Metadata is written as
// "# key=value" lines ahead of the table in both text formats.
//
//   GRID_TEXT     maturity_days\moneyness,<m_1>,...,<m_k>
//                 <T_1>,<v_11>,...,<v_1k>          (10 significant digits)
//   RECORDS_TEXT  maturity_days,moneyness,value,residual,flags
//                 one line per cell, full precision; flags as in flag_codes()
//   HEATMAP_SVG   standalone SVG with axis labels and a value color bar
//
// Missing values are written as "nan".

namespace merton {

enum class ExportFormat { GridText, RecordsText, HeatmapSvg };

std::string_view to_string(ExportFormat format) noexcept;
/// Accepts "grid", "records" or "heatmap".
ExportFormat parse_export_format(std::string_view text);
/// Conventional file suffix, e.g. ".grid.csv".
std::string_view file_suffix(ExportFormat format) noexcept;

std::string to_grid_text(const SurfaceGrid& surface);
std::string to_records_text(const SurfaceGrid& surface);
std::string to_heatmap_svg(const SurfaceGrid& surface);

/// Inverse of to_records_text: recovers axes, values, residuals, flags,
/// kind and metadata. Throws DataError on malformed or incomplete input.
SurfaceGrid parse_records_text(std::istream& in);
SurfaceGrid import_records(const std::filesystem::path& path);

/// Writes the encoding to `path`; throws IoError when the file cannot be written.
void export_surface(const SurfaceGrid& surface, ExportFormat format, const std::filesystem::path& path);

/// Writes `content` to `path` in one piece; throws IoError on failure.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace merton
