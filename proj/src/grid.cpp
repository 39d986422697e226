#include "radiomap/grid.hpp"

#include <cmath>
#include <sstream>

namespace radiomap {

std::string Rect::to_string() const {
  std::ostringstream os;
  os << "rect(top=" << top << ", left=" << left << ", height=" << height << ", width=" << width
     << ")";
  return os.str();
}

Mask rect_mask(Index rows, Index cols, const Rect& rect) {
  if (!rect.fits_in(rows, cols)) {
    std::ostringstream os;
    os << rect.to_string() << " does not fit inside a " << rows << "x" << cols << " grid";
    throw Error(os.str());
  }
  Mask m = Mask::Constant(rows, cols, false);
  m.block(rect.top, rect.left, rect.height, rect.width).setConstant(true);
  return m;
}

Rect bounding_rect(const Mask& mask) {
  Index top = mask.rows(), left = mask.cols(), bottom = -1, right = -1;
  for (Index c = 0; c < mask.cols(); ++c) {
    for (Index r = 0; r < mask.rows(); ++r) {
      if (!mask(r, c)) continue;
      top = std::min(top, r);
      left = std::min(left, c);
      bottom = std::max(bottom, r);
      right = std::max(right, c);
    }
  }
  if (bottom < 0) return Rect{};
  return Rect{top, left, bottom - top + 1, right - left + 1};
}

RadioMap normalize(const Grid& raw, double cell_size) {
  if (raw.size() == 0) throw Error("normalize: empty grid");
  for (Index c = 0; c < raw.cols(); ++c) {
    for (Index r = 0; r < raw.rows(); ++r) {
      if (!std::isfinite(raw(r, c))) {
        std::ostringstream os;
        os << "normalize: non-finite value at row " << r << ", col " << c;
        throw Error(os.str());
      }
    }
  }
  RadioMap map;
  map.cell_size = cell_size;
  map.norm_min = raw.minCoeff();
  map.norm_max = raw.maxCoeff();
  const double span = map.norm_max - map.norm_min;
  if (span > 0.0) {
    map.values = (raw.array() - map.norm_min) / span;
  } else {
    map.values = Grid::Zero(raw.rows(), raw.cols());
  }
  return map;
}

Grid denormalize(const RadioMap& map) {
  return (map.values.array() * (map.norm_max - map.norm_min) + map.norm_min).matrix();
}

double renormalize_value(const RadioMap& map, double raw) {
  const double span = map.norm_max - map.norm_min;
  return span > 0.0 ? (raw - map.norm_min) / span : 0.0;
}

RegionState::RegionState(const RadioMap& map, const Mask& restricted) {
  if (restricted.rows() != map.rows() || restricted.cols() != map.cols()) {
    throw Error("region state: restricted mask shape does not match the radio map");
  }
  status_.resize(map.rows(), map.cols());
  confidence_.resize(map.rows(), map.cols());
  original_observed_ = !restricted;
  for (Index c = 0; c < map.cols(); ++c) {
    for (Index r = 0; r < map.rows(); ++r) {
      const bool miss = restricted(r, c);
      status_(r, c) = static_cast<std::uint8_t>(miss ? CellStatus::Missing : CellStatus::Observed);
      confidence_(r, c) = miss ? 0.0 : 1.0;
      missing_ += miss ? 1 : 0;
    }
  }
}

Mask RegionState::missing_mask() const {
  return status_.array() == static_cast<std::uint8_t>(CellStatus::Missing);
}

Mask RegionState::known_mask() const { return !missing_mask(); }

void RegionState::mark_filled(CellCoord c, double confidence) {
  if (status(c) != CellStatus::Missing) {
    throw Error("region state: only Missing cells can be filled");
  }
  if (!(confidence > 0.0 && confidence <= 1.0)) {
    throw Error("region state: fill confidence must lie in (0, 1]");
  }
  status_(c.row, c.col) = static_cast<std::uint8_t>(CellStatus::Filled);
  confidence_(c.row, c.col) = confidence;
  --missing_;
  ++filled_;
}

RegionState init_region_state(const RadioMap& map, const Rect& restricted) {
  return RegionState(map, rect_mask(map.rows(), map.cols(), restricted));
}

RegionState init_region_state(const RadioMap& map, const Mask& restricted) {
  return RegionState(map, restricted);
}

} // namespace radiomap
