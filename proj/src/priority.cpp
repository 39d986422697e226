#include "radiomap/priority.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace radiomap {

void PriorityConfig::validate() const {
  if (patch_size < 3 || patch_size % 2 == 0) throw Error("priority: patch size must be odd and >= 3");
  if (!(beta >= 0.0)) throw Error("priority: beta must be >= 0");
  if (!(alpha > 0.0)) throw Error("priority: alpha must be > 0");
  if (!(term_floor > 0.0 && term_floor < 1.0)) throw Error("priority: term floor must lie in (0, 1)");
  if (!(line_step > 0.0 && line_step <= 1.0)) throw Error("priority: line step must lie in (0, 1]");
}

namespace {

constexpr std::array<std::array<int, 2>, 4> kFourNeighbours{{{-1, 0}, {0, -1}, {0, 1}, {1, 0}}};

bool has_known_neighbour(const RegionState& state, Index r, Index c) {
  for (const auto& [dr, dc] : kFourNeighbours) {
    const Index rr = r + dr, cc = c + dc;
    if (rr >= 0 && cc >= 0 && rr < state.rows() && cc < state.cols() && state.is_known(rr, cc)) {
      return true;
    }
  }
  return false;
}

double missing_indicator(const RegionState& state, Index r, Index c) {
  r = std::clamp<Index>(r, 0, state.rows() - 1);
  c = std::clamp<Index>(c, 0, state.cols() - 1);
  return state.is_missing(r, c) ? 1.0 : 0.0;
}

} // namespace

Vec2 boundary_normal(const RegionState& state, CellCoord p) {
  const auto m = [&](int dr, int dc) { return missing_indicator(state, p.row + dr, p.col + dc); };
  const double g_row = (m(1, -1) + 2.0 * m(1, 0) + m(1, 1)) - (m(-1, -1) + 2.0 * m(-1, 0) + m(-1, 1));
  const double g_col = (m(-1, 1) + 2.0 * m(0, 1) + m(1, 1)) - (m(-1, -1) + 2.0 * m(0, -1) + m(1, -1));
  Vec2 g(g_row, g_col);
  if (g.norm() > 1e-12) return g.normalized();

  for (const auto& [dr, dc] : kFourNeighbours) {
    const Index rr = p.row + dr, cc = p.col + dc;
    if (rr >= 0 && cc >= 0 && rr < state.rows() && cc < state.cols() && state.is_known(rr, cc)) {
      return Vec2(dr, dc);
    }
  }
  // interior of the missing region: no front here, any unit vector will do
  return Vec2(1.0, 0.0);
}

std::vector<BoundaryPoint> extract_boundary(const RegionState& state) {
  std::vector<BoundaryPoint> out;
  if (state.missing_count() == 0) return out;
  if (state.missing_count() == state.rows() * state.cols()) {
    throw Error("boundary: every cell is missing, nothing to fill from");
  }
  for (Index r = 0; r < state.rows(); ++r) {
    for (Index c = 0; c < state.cols(); ++c) {
      if (state.is_missing(r, c) && has_known_neighbour(state, r, c)) {
        const CellCoord p{r, c};
        out.push_back({p, boundary_normal(state, p)});
      }
    }
  }
  return out;
}

double confidence_term(const RegionState& state, CellCoord p, int patch_size) {
  const Index h = patch_size / 2;
  double sum = 0.0;
  for (Index r = p.row - h; r <= p.row + h; ++r) {
    if (r < 0 || r >= state.rows()) continue;
    for (Index c = p.col - h; c <= p.col + h; ++c) {
      if (c < 0 || c >= state.cols()) continue;
      if (state.is_known(r, c)) sum += state.confidence(r, c);
    }
  }
  return sum / static_cast<double>(patch_size * patch_size);
}

Vec2 isophote(const RadioMap& map, const RegionState& state, CellCoord p, int patch_size) {
  const Index h = patch_size / 2;
  const auto known = [&](Index r, Index c) {
    return r >= 0 && c >= 0 && r < state.rows() && c < state.cols() && state.is_known(r, c);
  };
  const auto derivative = [&](Index r, Index c, Index dr, Index dc) {
    const bool fwd = known(r + dr, c + dc);
    const bool back = known(r - dr, c - dc);
    const auto& v = map.values;
    if (fwd && back) return 0.5 * (v(r + dr, c + dc) - v(r - dr, c - dc));
    if (fwd) return v(r + dr, c + dc) - v(r, c);
    if (back) return v(r, c) - v(r - dr, c - dc);
    return 0.0;
  };

  Vec2 best = Vec2::Zero();
  double best_sq = 0.0;
  for (Index r = p.row - h; r <= p.row + h; ++r) {
    for (Index c = p.col - h; c <= p.col + h; ++c) {
      if (!known(r, c)) continue;
      const Vec2 g(derivative(r, c, 1, 0), derivative(r, c, 0, 1));
      const double sq = g.squaredNorm();
      if (sq > best_sq) {
        best_sq = sq;
        best = g;
      }
    }
  }
  if (best_sq <= 0.0) return Vec2::Zero();
  return Vec2(-best.y(), best.x()).normalized();
}

double data_term(const Vec2& iso, const Vec2& normal, const PriorityConfig& cfg) {
  return std::max(std::abs(iso.dot(normal)) / cfg.alpha, cfg.term_floor);
}

double data_term(const RadioMap& map, const RegionState& state, const BoundaryPoint& bp,
                 const PriorityConfig& cfg) {
  return data_term(isophote(map, state, bp.coord, cfg.patch_size), bp.normal, cfg);
}

double radio_term(const Transmitter& tx, const BoundaryPoint& bp, const PriorityConfig& cfg) {
  const Vec2 ray = bp.coord.as_vector() - tx.position;
  const double d = ray.norm();
  if (!(d > 1e-12)) {
    std::ostringstream os;
    os << "radio term: transmitter " << tx.id << " coincides with cell (" << bp.coord.row << ", "
       << bp.coord.col << ")";
    throw Error(os.str());
  }
  // The floor acts on the alignment factor only: flooring the whole product
  // would pin every cell farther than term_floor^(-1/beta) cells to the same value.
  const double aligned = std::max(std::abs((ray / d).dot(bp.normal)), cfg.term_floor);
  return std::pow(d, -cfg.beta) * aligned;
}

double blocked_fraction(const ObstacleMap& obstacles, const Vec2& from, const Vec2& to,
                        double line_step) {
  const Index rows = obstacles.rows(), cols = obstacles.cols();
  const Vec2 lo(-0.5, -0.5);
  const Vec2 hi(static_cast<double>(rows) - 0.5, static_cast<double>(cols) - 0.5);
  const Vec2 delta = to - from;

  // Liang-Barsky clip against the grid rectangle
  double t0 = 0.0, t1 = 1.0;
  for (int axis = 0; axis < 2; ++axis) {
    const double p[2] = {-delta[axis], delta[axis]};
    const double q[2] = {from[axis] - lo[axis], hi[axis] - from[axis]};
    for (int k = 0; k < 2; ++k) {
      if (p[k] == 0.0) {
        if (q[k] < 0.0) return 0.0;
        continue;
      }
      const double t = q[k] / p[k];
      if (p[k] < 0.0) t0 = std::max(t0, t);
      else t1 = std::min(t1, t);
    }
  }
  if (t0 > t1) return 0.0;

  const auto cell_at = [&](const Vec2& x) {
    const Index r = std::clamp<Index>(static_cast<Index>(std::floor(x[0] + 0.5)), 0, rows - 1);
    const Index c = std::clamp<Index>(static_cast<Index>(std::floor(x[1] + 0.5)), 0, cols - 1);
    return obstacles.is_building(r, c);
  };

  const Vec2 a = from + t0 * delta;
  const double length = (t1 - t0) * delta.norm();
  if (length < 1e-12) return cell_at(a) ? 1.0 : 0.0;

  const Index samples = std::max<Index>(1, static_cast<Index>(std::ceil(length / line_step - 1e-9)));
  const Vec2 step = (t1 - t0) * delta / static_cast<double>(samples);
  Index blocked = 0;
  for (Index i = 0; i < samples; ++i) {
    if (cell_at(a + (static_cast<double>(i) + 0.5) * step)) ++blocked;
  }
  return static_cast<double>(blocked) / static_cast<double>(samples);
}

double block_term(const ObstacleMap& obstacles, const Transmitter& tx, CellCoord p,
                  const PriorityConfig& cfg) {
  const double frac = blocked_fraction(obstacles, tx.position, p.as_vector(), cfg.line_step);
  return std::max(1.0 - frac, cfg.term_floor);
}

double combine_priority(double confidence, double data, std::span<const PropagationTerms> terms,
                        PriorityMode mode) {
  if (mode == PriorityMode::TextureOnly) {
    const double block = terms.empty() ? 1.0 : terms.front().first;
    return confidence * data * block;
  }
  if (terms.empty()) throw Error("priority: full mode needs at least one transmitter");
  double propagation = 0.0;
  for (const auto& [block, radio] : terms) propagation += block * radio;
  return confidence * data * propagation;
}

PriorityTerms priority_terms(const BoundaryPoint& bp, const RegionState& state,
                             const RadioMap& map, const ObstacleMap& obstacles,
                             std::span<const Transmitter> txs, const PriorityConfig& cfg) {
  if (cfg.mode == PriorityMode::Full && txs.empty()) {
    throw Error("priority: full mode needs at least one transmitter");
  }
  PriorityTerms t;
  t.confidence = confidence_term(state, bp.coord, cfg.patch_size);
  t.data = data_term(map, state, bp, cfg);
  if (cfg.mode == PriorityMode::TextureOnly) {
    if (!txs.empty()) t.propagation.emplace_back(block_term(obstacles, txs.front(), bp.coord, cfg), 1.0);
  } else {
    for (const auto& tx : txs) {
      t.propagation.emplace_back(block_term(obstacles, tx, bp.coord, cfg), radio_term(tx, bp, cfg));
    }
  }
  t.value = combine_priority(t.confidence, t.data, t.propagation, cfg.mode);
  return t;
}

double priority(const BoundaryPoint& bp, const RegionState& state, const RadioMap& map,
                const ObstacleMap& obstacles, std::span<const Transmitter> txs,
                const PriorityConfig& cfg) {
  return priority_terms(bp, state, map, obstacles, txs, cfg).value;
}

std::size_t select_patch(std::span<const BoundaryPoint> boundary,
                         std::span<const double> priorities) {
  if (boundary.empty() || boundary.size() != priorities.size()) {
    throw Error("select_patch: boundary must be non-empty and match the priority list");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < boundary.size(); ++i) {
    if (priorities[i] > priorities[best] ||
        (priorities[i] == priorities[best] && boundary[i].coord < boundary[best].coord)) {
      best = i;
    }
  }
  return best;
}

} // namespace radiomap
