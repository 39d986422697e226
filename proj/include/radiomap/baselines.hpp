#pragma once

#include <vector>

#include "radiomap/grid.hpp"

namespace radiomap {

// ---------------------------------------------------------------- RBF interpolation

enum class RbfKernel { Multiquadric, InverseMultiquadric, Gaussian };

struct RbfOptions {
  RbfKernel kernel = RbfKernel::Multiquadric;
  double shape_param = 0.0;  ///< <= 0: mean nearest-centre spacing
  Index center_budget = 500;
  Index halo = 4;            ///< ring width (cells) of centres kept around the missing region
  int poly_degree = 1;       ///< -1 none, 0 constant, 1 linear tail
  double ridge = 1e-8;
};

/// Radial-basis interpolant with an optional low-degree polynomial tail.
class RbfInterpolant {
public:
  RbfInterpolant(std::vector<CellCoord> centers, const Eigen::VectorXd& values,
                 const RbfOptions& opt);

  double operator()(double row, double col) const;
  double shape_param() const { return shape_; }
  int poly_degree() const { return degree_; }
  const std::vector<CellCoord>& centers() const { return centers_; }

private:
  double kernel(double r2) const;

  std::vector<CellCoord> centers_;
  RbfKernel kind_;
  double shape_ = 1.0;
  int degree_ = 1;
  Eigen::VectorXd weights_;
  Eigen::VectorXd poly_;
};

/// Observed cells used as RBF centres: the halo ring first, then a strided
/// subsample of the rest, capped at the budget. Row-major and deterministic.
std::vector<CellCoord> select_rbf_centers(const RegionState& state, const RbfOptions& opt);

/// Interpolates every Missing cell; known cells are copied through.
RadioMap rbf_reconstruct(const RadioMap& map, const RegionState& state, const RbfOptions& opt = {});

// ---------------------------------------------------------------- model-based (LDPL)

struct LdplFit {
  double intercept_db = 0.0; ///< a in  P_dB(d) = a - 10 gamma log10 d
  double exponent = 0.0;     ///< gamma
  Index samples = 0;

  double predict_db(double distance) const;
};

/// Least-squares fit of the log-distance path-loss line on the known cells.
LdplFit fit_ldpl(const RadioMap& map, const RegionState& state, const Transmitter& tx);

/// Fills Missing cells from the fitted LDPL line, mapped back through the map's normalization.
RadioMap mbi_reconstruct(const RadioMap& map, const RegionState& state, const Transmitter& tx);

} // namespace radiomap
