#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "radiomap/grid.hpp"

namespace radiomap {

// CSV grids: row-major, one grid row per line, comma separated decimal reals.
// Values are written in shortest round-trip form, so write/read is exact.

Grid parse_grid(std::string_view text, std::string_view source = "<string>");
std::string format_grid(const Grid& grid);

Grid read_grid_file(const std::filesystem::path& path);
void write_grid_file(const std::filesystem::path& path, const Grid& grid);

/// 0/1 grids (mask: 1 = restricted; obstacles: 1 = building).
Mask read_mask_file(const std::filesystem::path& path);
void write_mask_file(const std::filesystem::path& path, const Mask& mask);

/// Raw CSV rows without the rectangular-shape check.
std::vector<std::vector<double>> parse_csv_rows(std::string_view text, std::string_view source);

/// Binary PGM (P5, 8-bit); each cell becomes round(255 * clamp(v, 0, 1)).
void write_pgm(const std::filesystem::path& path, const Grid& values);

std::string format_double(double v);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

} // namespace radiomap
