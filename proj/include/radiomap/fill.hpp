#pragma once

#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "radiomap/grid.hpp"
#include "radiomap/priority.hpp"

namespace radiomap {

enum class CellValidity : std::uint8_t { Valid = 0, Hole = 1, OutOfGrid = 2 };

/// n x n window centred on a cell. Values are meaningful where validity is Valid,
/// and carry estimates on Hole cells once an estimator has run.
struct Patch {
  CellCoord center;
  int size = 0;
  Grid values;
  GridOf<std::uint8_t> validity;

  CellCoord top_left() const { return {center.row - size / 2, center.col - size / 2}; }
  CellValidity at(Index r, Index c) const { return static_cast<CellValidity>(validity(r, c)); }
  Index count(CellValidity v) const {
    return (validity.array() == static_cast<std::uint8_t>(v)).count();
  }
  /// Column-major stacking of the window (the n^2 vector x_q).
  Eigen::VectorXd vectorized() const {
    return Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
  }
};

Patch extract_patch(const RadioMap& map, const RegionState& state, CellCoord center, int patch_size);

/// Writes Hole cells of `estimate` into `map` and marks them Filled with `confidence`.
/// Known cells are never touched. Returns the number of cells filled.
Index commit_patch(RegionState& state, RadioMap& map, const Patch& estimate, double confidence);

struct PatchEstimate {
  Patch patch;
  double score = 0.0; ///< estimator-specific: SSD for exemplar copy, lasso objective for dictionary
  CellCoord source;   ///< exemplar top-left (exemplar copy only)
};

/// Produces values for the Hole cells of a selected patch.
class PatchEstimator {
public:
  virtual ~PatchEstimator() = default;
  virtual std::string name() const = 0;
  virtual PatchEstimate estimate(const Patch& target, const RadioMap& map,
                                 const RegionState& state) = 0;
  /// Configuration echo recorded in the fill report.
  virtual std::string summary() const { return name(); }
};

struct FillStep {
  Index iteration = 0;
  CellCoord center;
  double priority = 0.0;
  double confidence = 0.0;
  Index cells_filled = 0;
  double estimator_score = 0.0;
  CellCoord source;
};

struct FillReport {
  Index iterations = 0;
  Index cells_filled = 0;
  std::vector<FillStep> fill_order;
  std::string estimator;
};

struct FillResult {
  RadioMap map;
  FillReport report;
};

/// Called after each committed patch with the updated state.
using FillObserver = std::function<void(const FillStep&, const RegionState&, const RadioMap&)>;

/// Exemplar-based fill loop: repeatedly select the highest-priority boundary
/// patch, estimate its holes and commit them until nothing is missing.
FillResult reconstruct(const RadioMap& map, RegionState& state, const ObstacleMap& obstacles,
                       std::span<const Transmitter> txs, const PriorityConfig& cfg,
                       PatchEstimator& estimator, const FillObserver& observer = {});

/// iteration,center_row,center_col,priority
std::string format_fill_order(const FillReport& report);
void write_fill_order_csv(const std::filesystem::path& path, const FillReport& report);

} // namespace radiomap
