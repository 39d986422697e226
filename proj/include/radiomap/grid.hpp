#pragma once

#include <Eigen/Core>

#include <compare>
#include <cstdint>
#include <string>

#include "radiomap/error.hpp"

namespace radiomap {

using Index = Eigen::Index;

/// Dense 2-D grid; row index is the grid row, column index the grid column.
template <typename Scalar>
using GridOf = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
using Grid = GridOf<double>;

/// Boolean cell mask with the same layout as Grid.
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Planar vectors are stored as (row, col) throughout.
using Vec2 = Eigen::Vector2d;

struct CellCoord {
  Index row = 0;
  Index col = 0;

  friend auto operator<=>(const CellCoord&, const CellCoord&) = default;

  Vec2 as_vector() const { return {static_cast<double>(row), static_cast<double>(col)}; }
};

/// Axis-aligned rectangle of cells: rows [top, top+height), cols [left, left+width).
struct Rect {
  Index top = 0;
  Index left = 0;
  Index height = 0;
  Index width = 0;

  friend bool operator==(const Rect&, const Rect&) = default;

  Index area() const { return height * width; }
  bool contains(CellCoord c) const {
    return c.row >= top && c.row < top + height && c.col >= left && c.col < left + width;
  }
  bool fits_in(Index rows, Index cols) const {
    return height >= 1 && width >= 1 && top >= 0 && left >= 0 && top + height <= rows &&
           left + width <= cols;
  }
  std::string to_string() const;
};

/// Cells of `rect` set, everything else clear. Throws if the rect does not fit.
Mask rect_mask(Index rows, Index cols, const Rect& rect);

/// Smallest rect covering every set cell of `mask`; zero-sized when mask is empty.
Rect bounding_rect(const Mask& mask);

/// Normalized power map together with the linear map back to watts.
struct RadioMap {
  Grid values;
  double cell_size = 1.0;
  double norm_min = 0.0;
  double norm_max = 0.0;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
  bool in_bounds(Index r, Index c) const { return r >= 0 && c >= 0 && r < rows() && c < cols(); }
  bool in_bounds(CellCoord c) const { return in_bounds(c.row, c.col); }
  double operator()(CellCoord c) const { return values(c.row, c.col); }
};

/// Linear map of `raw` onto [0,1]. A constant grid maps to zeros with norm_min == norm_max.
RadioMap normalize(const Grid& raw, double cell_size = 1.0);

/// values * (norm_max - norm_min) + norm_min.
Grid denormalize(const RadioMap& map);

/// Normalized value of a raw reading under the map's existing normalization.
double renormalize_value(const RadioMap& map, double raw);

struct ObstacleMap {
  Mask cells;

  static ObstacleMap empty(Index rows, Index cols) {
    return ObstacleMap{Mask::Constant(rows, cols, false)};
  }
  Index rows() const { return cells.rows(); }
  Index cols() const { return cells.cols(); }
  bool is_building(Index r, Index c) const { return cells(r, c); }
};

struct Transmitter {
  Vec2 position = Vec2::Zero(); // (row, col) in cell units, may lie outside the grid
  int id = 0;
};

enum class CellStatus : std::uint8_t { Observed = 0, Missing = 1, Filled = 2 };

/// Observed / missing / filled bookkeeping plus per-cell confidence.
///
/// Only the fill loop mutates it, and only through mark_filled(): Missing
/// cells become Filled, never the other way round.
class RegionState {
public:
  RegionState() = default;
  RegionState(const RadioMap& map, const Mask& restricted);

  Index rows() const { return status_.rows(); }
  Index cols() const { return status_.cols(); }

  CellStatus status(Index r, Index c) const { return static_cast<CellStatus>(status_(r, c)); }
  CellStatus status(CellCoord c) const { return status(c.row, c.col); }
  bool is_missing(Index r, Index c) const { return status(r, c) == CellStatus::Missing; }
  bool is_known(Index r, Index c) const { return status(r, c) != CellStatus::Missing; }

  double confidence(Index r, Index c) const { return confidence_(r, c); }
  const Grid& confidence() const { return confidence_; }

  /// Snapshot of the initially observed set.
  const Mask& original_observed() const { return original_observed_; }
  /// Cells currently Missing.
  Mask missing_mask() const;
  /// Cells currently Observed or Filled.
  Mask known_mask() const;
  /// Cells that were restricted at construction time.
  Mask restricted_mask() const { return !original_observed_; }

  Index missing_count() const { return missing_; }
  Index filled_count() const { return filled_; }
  Index observed_count() const { return rows() * cols() - missing_ - filled_; }

  void mark_filled(CellCoord c, double confidence);

private:
  GridOf<std::uint8_t> status_;
  Grid confidence_;
  Mask original_observed_;
  Index missing_ = 0;
  Index filled_ = 0;
};

RegionState init_region_state(const RadioMap& map, const Rect& restricted);
RegionState init_region_state(const RadioMap& map, const Mask& restricted);

} // namespace radiomap
