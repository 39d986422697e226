#include "radiomap/fill.hpp"

#include <cmath>
#include <sstream>

#include "radiomap/grid_io.hpp"

namespace radiomap {

Patch extract_patch(const RadioMap& map, const RegionState& state, CellCoord center,
                    int patch_size) {
  if (!map.in_bounds(center)) throw Error("extract_patch: center outside the grid");
  if (patch_size < 1 || patch_size % 2 == 0) throw Error("extract_patch: patch size must be odd");
  Patch p;
  p.center = center;
  p.size = patch_size;
  p.values = Grid::Zero(patch_size, patch_size);
  p.validity.resize(patch_size, patch_size);
  const CellCoord tl = p.top_left();
  for (Index c = 0; c < patch_size; ++c) {
    for (Index r = 0; r < patch_size; ++r) {
      const Index gr = tl.row + r, gc = tl.col + c;
      CellValidity v = CellValidity::OutOfGrid;
      if (map.in_bounds(gr, gc)) {
        v = state.is_missing(gr, gc) ? CellValidity::Hole : CellValidity::Valid;
        if (v == CellValidity::Valid) p.values(r, c) = map.values(gr, gc);
      }
      p.validity(r, c) = static_cast<std::uint8_t>(v);
    }
  }
  return p;
}

Index commit_patch(RegionState& state, RadioMap& map, const Patch& estimate, double confidence) {
  const CellCoord tl = estimate.top_left();
  for (Index c = 0; c < estimate.size; ++c) {
    for (Index r = 0; r < estimate.size; ++r) {
      if (estimate.at(r, c) == CellValidity::Hole && !std::isfinite(estimate.values(r, c))) {
        std::ostringstream os;
        os << "commit_patch: non-finite estimate at cell (" << tl.row + r << ", " << tl.col + c << ")";
        throw Error(os.str());
      }
    }
  }
  Index filled = 0;
  for (Index c = 0; c < estimate.size; ++c) {
    for (Index r = 0; r < estimate.size; ++r) {
      if (estimate.at(r, c) != CellValidity::Hole) continue;
      const CellCoord g{tl.row + r, tl.col + c};
      if (!map.in_bounds(g) || !state.is_missing(g.row, g.col)) continue;
      map.values(g.row, g.col) = estimate.values(r, c);
      state.mark_filled(g, confidence);
      ++filled;
    }
  }
  return filled;
}

FillResult reconstruct(const RadioMap& map, RegionState& state, const ObstacleMap& obstacles,
                       std::span<const Transmitter> txs, const PriorityConfig& cfg,
                       PatchEstimator& estimator, const FillObserver& observer) {
  cfg.validate();
  if (state.rows() != map.rows() || state.cols() != map.cols()) {
    throw Error("reconstruct: region state shape does not match the radio map");
  }
  if (obstacles.rows() != map.rows() || obstacles.cols() != map.cols()) {
    throw Error("reconstruct: obstacle map shape does not match the radio map");
  }

  FillResult result{map, {}};
  result.report.estimator = estimator.summary();
  if (state.missing_count() == 0) return result;
  if (state.observed_count() == 0) throw Error("reconstruct: no observed cell to fill from");

  std::vector<double> priorities;
  while (state.missing_count() > 0) {
    const Index iteration = result.report.iterations;
    const auto boundary = extract_boundary(state);
    if (boundary.empty()) throw Error("reconstruct: missing cells remain but the fill front is empty");

    priorities.resize(boundary.size());
    std::vector<double> confidences(boundary.size());
    for (std::size_t i = 0; i < boundary.size(); ++i) {
      const auto terms = priority_terms(boundary[i], state, result.map, obstacles, txs, cfg);
      priorities[i] = terms.value;
      confidences[i] = terms.confidence;
    }
    const std::size_t q = select_patch(boundary, priorities);
    const Patch target = extract_patch(result.map, state, boundary[q].coord, cfg.patch_size);

    PatchEstimate est;
    try {
      est = estimator.estimate(target, result.map, state);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "reconstruct: " << estimator.name() << " failed at iteration " << iteration << ": "
         << e.what();
      throw Error(os.str());
    }
    if (est.patch.size != target.size || est.patch.center != target.center ||
        est.patch.validity != target.validity) {
      throw Error("reconstruct: estimator returned a patch that does not match the target");
    }

    const Index filled = commit_patch(state, result.map, est.patch, confidences[q]);
    if (filled == 0) {
      std::ostringstream os;
      os << "reconstruct: iteration " << iteration << " filled no cell (internal error)";
      throw Error(os.str());
    }

    FillStep step;
    step.iteration = iteration;
    step.center = boundary[q].coord;
    step.priority = priorities[q];
    step.confidence = confidences[q];
    step.cells_filled = filled;
    step.estimator_score = est.score;
    step.source = est.source;
    result.report.fill_order.push_back(step);
    result.report.cells_filled += filled;
    ++result.report.iterations;
    if (observer) observer(step, state, result.map);
  }
  return result;
}

std::string format_fill_order(const FillReport& report) {
  std::string out = "iteration,center_row,center_col,priority\n";
  for (const auto& s : report.fill_order) {
    out += std::to_string(s.iteration) + ',' + std::to_string(s.center.row) + ',' +
           std::to_string(s.center.col) + ',' + format_double(s.priority) + '\n';
  }
  return out;
}

void write_fill_order_csv(const std::filesystem::path& path, const FillReport& report) {
  write_text_file(path, format_fill_order(report));
}

} // namespace radiomap
