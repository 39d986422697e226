#pragma once

#include <span>
#include <utility>
#include <vector>

#include "radiomap/grid.hpp"

namespace radiomap {

enum class PriorityMode {
  TextureOnly, ///< C * D * B (exemplar copy without the propagation term)
  Full,        ///< C * D * B * L, or C * D * sum_i B_i * L_i for several transmitters
};

struct PriorityConfig {
  int patch_size = 15;     ///< odd, >= 3
  double beta = 2.0;       ///< inverse-distance exponent of the radio term
  double alpha = 1.0;      ///< data-term normalization; 1 for unit vectors
  double term_floor = 1e-3;
  double line_step = 0.25; ///< sampling step along the transmitter ray, cells
  PriorityMode mode = PriorityMode::Full;

  void validate() const;
};

/// Missing cell on the fill front, with the unit normal of the front at that cell.
struct BoundaryPoint {
  CellCoord coord;
  Vec2 normal = Vec2::Zero();
};

/// Missing cells with at least one non-Missing 4-neighbour, in row-major order.
/// Empty when nothing is missing; throws when every cell is missing.
std::vector<BoundaryPoint> extract_boundary(const RegionState& state);

/// Unit normal of the missing region at `p`: Sobel gradient of the missing
/// indicator, or the direction to the nearest known 4-neighbour if that vanishes.
Vec2 boundary_normal(const RegionState& state, CellCoord p);

/// Sum of confidences of known cells in the n x n window at `p`, divided by n^2.
double confidence_term(const RegionState& state, CellCoord p, int patch_size);

/// Unit isophote at `p`: the strongest known-data gradient inside the window,
/// rotated by 90 degrees. Zero when no gradient can be formed.
Vec2 isophote(const RadioMap& map, const RegionState& state, CellCoord p, int patch_size);

double data_term(const Vec2& isophote, const Vec2& normal, const PriorityConfig& cfg);
double data_term(const RadioMap& map, const RegionState& state, const BoundaryPoint& bp,
                 const PriorityConfig& cfg);

double radio_term(const Transmitter& tx, const BoundaryPoint& bp, const PriorityConfig& cfg);

/// Fraction of the segment from `from` to `to` (clipped to the grid rectangle)
/// whose samples fall on building cells. 0 when the clipped segment is empty.
double blocked_fraction(const ObstacleMap& obstacles, const Vec2& from, const Vec2& to,
                        double line_step);

double block_term(const ObstacleMap& obstacles, const Transmitter& tx, CellCoord p,
                  const PriorityConfig& cfg);

/// One (B_i, L_i) pair per transmitter.
using PropagationTerms = std::pair<double, double>;

/// Product rule: Full -> C * D * sum_i B_i * L_i; TextureOnly -> C * D * B_0 (B = 1 without transmitters).
double combine_priority(double confidence, double data, std::span<const PropagationTerms> terms,
                        PriorityMode mode);

struct PriorityTerms {
  double confidence = 0.0;
  double data = 0.0;
  std::vector<PropagationTerms> propagation;
  double value = 0.0;
};

PriorityTerms priority_terms(const BoundaryPoint& bp, const RegionState& state,
                             const RadioMap& map, const ObstacleMap& obstacles,
                             std::span<const Transmitter> txs, const PriorityConfig& cfg);

double priority(const BoundaryPoint& bp, const RegionState& state, const RadioMap& map,
                const ObstacleMap& obstacles, std::span<const Transmitter> txs,
                const PriorityConfig& cfg);

/// Index of the largest priority; ties go to the smallest (row, col).
std::size_t select_patch(std::span<const BoundaryPoint> boundary,
                         std::span<const double> priorities);

} // namespace radiomap
