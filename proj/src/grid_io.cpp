#include "radiomap/grid_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace radiomap {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail_at(std::string_view source, std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << source << ": line " << line << ": " << what;
  throw Error(os.str());
}

} // namespace

std::vector<std::vector<double>> parse_csv_rows(std::string_view text, std::string_view source) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  std::size_t blank_run_start = 0;
  while (pos < text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    const auto line = trim(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (line.empty()) {
      if (blank_run_start == 0) blank_run_start = line_no;
      continue;
    }
    if (blank_run_start != 0) fail_at(source, blank_run_start, "blank line inside grid");

    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      auto comma = line.find(',', start);
      const auto token = trim(line.substr(start, comma == std::string_view::npos
                                                      ? std::string_view::npos
                                                      : comma - start));
      double value = 0.0;
      const auto* first = token.data();
      const auto* last = token.data() + token.size();
      if (!token.empty() && *first == '+') ++first;
      const auto [ptr, ec] = std::from_chars(first, last, value);
      if (token.empty() || ec != std::errc() || ptr != last) {
        fail_at(source, line_no, "non-numeric token '" + std::string(token) + "'");
      }
      if (!std::isfinite(value)) fail_at(source, line_no, "non-finite value");
      row.push_back(value);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Grid parse_grid(std::string_view text, std::string_view source) {
  auto rows = parse_csv_rows(text, source);
  if (rows.empty()) throw Error(std::string(source) + ": empty grid");
  const auto width = rows.front().size();
  Grid g(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      std::ostringstream os;
      os << "ragged row: expected " << width << " values, found " << rows[r].size();
      // rows are contiguous non-blank lines, so row index maps to line number
      fail_at(source, r + 1, os.str());
    }
    for (std::size_t c = 0; c < width; ++c) g(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
  }
  return g;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error("format_double: conversion failed");
  return std::string(buf, ptr);
}

std::string format_grid(const Grid& grid) {
  std::string out;
  out.reserve(static_cast<std::size_t>(grid.size()) * 12);
  for (Index r = 0; r < grid.rows(); ++r) {
    for (Index c = 0; c < grid.cols(); ++c) {
      if (c) out.push_back(',');
      out += format_double(grid(r, c));
    }
    out.push_back('\n');
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error("write failed for " + path.string());
}

Grid read_grid_file(const std::filesystem::path& path) {
  return parse_grid(read_text_file(path), path.string());
}

void write_grid_file(const std::filesystem::path& path, const Grid& grid) {
  write_text_file(path, format_grid(grid));
}

Mask read_mask_file(const std::filesystem::path& path) {
  const Grid g = read_grid_file(path);
  Mask m(g.rows(), g.cols());
  for (Index r = 0; r < g.rows(); ++r) {
    for (Index c = 0; c < g.cols(); ++c) {
      if (g(r, c) != 0.0 && g(r, c) != 1.0) {
        std::ostringstream os;
        os << path.string() << ": line " << r + 1 << ": mask entries must be 0 or 1";
        throw Error(os.str());
      }
      m(r, c) = g(r, c) == 1.0;
    }
  }
  return m;
}

void write_mask_file(const std::filesystem::path& path, const Mask& mask) {
  write_grid_file(path, mask.cast<double>().matrix());
}

void write_pgm(const std::filesystem::path& path, const Grid& values) {
  std::ostringstream header;
  header << "P5\n" << values.cols() << ' ' << values.rows() << "\n255\n";
  std::string data = header.str();
  for (Index r = 0; r < values.rows(); ++r) {
    for (Index c = 0; c < values.cols(); ++c) {
      const double v = std::clamp(std::isfinite(values(r, c)) ? values(r, c) : 0.0, 0.0, 1.0);
      data.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v))));
    }
  }
  write_text_file(path, data);
}

} // namespace radiomap
