#include "radiomap/estimators.hpp"

#include <limits>
#include <sstream>

namespace radiomap {

void EstimatorConfig::validate() const {
  if (!(lambda >= 0.0)) throw Error("estimator: lambda must be >= 0");
  if (dictionary_size < 1) throw Error("estimator: dictionary size must be >= 1");
  if (training_patches < 1) throw Error("estimator: training patch count must be >= 1");
  if (ksvd_iters < 1 || sparse_max_iters < 1) throw Error("estimator: iteration counts must be >= 1");
  if (!(sparse_tol > 0.0)) throw Error("estimator: sparse tolerance must be > 0");
}

std::vector<CellCoord> legal_windows(const Mask& source, int patch_size) {
  std::vector<CellCoord> out;
  const Index rows = source.rows(), cols = source.cols(), n = patch_size;
  if (n < 1 || n > rows || n > cols) return out;
  // summed-area table with a zero border
  GridOf<Index> sat = GridOf<Index>::Zero(rows + 1, cols + 1);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      sat(r + 1, c + 1) = sat(r, c + 1) + sat(r + 1, c) - sat(r, c) + (source(r, c) ? 1 : 0);
    }
  }
  for (Index r = 0; r + n <= rows; ++r) {
    for (Index c = 0; c + n <= cols; ++c) {
      const Index set = sat(r + n, c + n) - sat(r, c + n) - sat(r + n, c) + sat(r, c);
      if (set == n * n) out.push_back({r, c});
    }
  }
  return out;
}

Mask search_source_mask(const RegionState& state, SearchSource source) {
  return source == SearchSource::OriginalObservedOnly ? state.original_observed()
                                                      : state.known_mask();
}

ExemplarMatch epc_search(const Patch& target, const RadioMap& map, const RegionState& state,
                         SearchSource source) {
  struct Known {
    Index r, c;
    double v;
  };
  std::vector<Known> known;
  for (Index r = 0; r < target.size; ++r) {
    for (Index c = 0; c < target.size; ++c) {
      if (target.at(r, c) == CellValidity::Valid) known.push_back({r, c, target.values(r, c)});
    }
  }
  if (known.empty()) throw Error("epc_search: target patch has no valid cell");

  const auto windows = legal_windows(search_source_mask(state, source), target.size);
  if (windows.empty()) {
    std::ostringstream os;
    os << "epc_search: no exemplar window of size " << target.size
       << " lies inside the search region; use a smaller patch size";
    throw Error(os.str());
  }

  ExemplarMatch best{windows.front(), std::numeric_limits<double>::infinity()};
  const auto& v = map.values;
  for (const auto& w : windows) {
    double cost = 0.0;
    for (const auto& k : known) {
      const double d = v(w.row + k.r, w.col + k.c) - k.v;
      cost += d * d;
      if (cost >= best.cost) break;
    }
    if (cost < best.cost) best = {w, cost};
  }
  return best;
}

Patch window_patch(const RadioMap& map, CellCoord top_left, int patch_size) {
  if (!map.in_bounds(top_left) ||
      !map.in_bounds(top_left.row + patch_size - 1, top_left.col + patch_size - 1)) {
    throw Error("window_patch: window leaves the grid");
  }
  Patch p;
  p.size = patch_size;
  p.center = {top_left.row + patch_size / 2, top_left.col + patch_size / 2};
  p.values = map.values.block(top_left.row, top_left.col, patch_size, patch_size);
  p.validity = GridOf<std::uint8_t>::Constant(patch_size, patch_size,
                                              static_cast<std::uint8_t>(CellValidity::Valid));
  return p;
}

Patch epc_fill(const Patch& target, const Patch& exemplar) {
  if (target.size != exemplar.size) throw Error("epc_fill: patch sizes differ");
  Patch out = target;
  for (Index c = 0; c < target.size; ++c) {
    for (Index r = 0; r < target.size; ++r) {
      if (target.at(r, c) == CellValidity::Hole) out.values(r, c) = exemplar.values(r, c);
    }
  }
  return out;
}

PatchEstimate ExemplarCopyEstimator::estimate(const Patch& target, const RadioMap& map,
                                              const RegionState& state) {
  const auto match = epc_search(target, map, state, source_);
  PatchEstimate est;
  est.patch = epc_fill(target, window_patch(map, match.top_left, target.size));
  est.score = match.cost;
  est.source = match.top_left;
  return est;
}

std::string ExemplarCopyEstimator::summary() const {
  return source_ == SearchSource::OriginalObservedOnly ? "epc source=observed"
                                                       : "epc source=observed+filled";
}

} // namespace radiomap
