#include "radiomap/baselines.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace radiomap {

namespace {

Index poly_terms(int degree) { return degree < 0 ? 0 : (degree == 0 ? 1 : 3); }

// Cells within Chebyshev distance `halo` of a missing cell.
Mask dilate_missing(const RegionState& state, Index halo) {
  const Index rows = state.rows(), cols = state.cols();
  GridOf<Index> sat = GridOf<Index>::Zero(rows + 1, cols + 1);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      sat(r + 1, c + 1) = sat(r, c + 1) + sat(r + 1, c) - sat(r, c) + (state.is_missing(r, c) ? 1 : 0);
    }
  }
  Mask out(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      const Index r0 = std::max<Index>(0, r - halo), r1 = std::min(rows, r + halo + 1);
      const Index c0 = std::max<Index>(0, c - halo), c1 = std::min(cols, c + halo + 1);
      out(r, c) = sat(r1, c1) - sat(r0, c1) - sat(r1, c0) + sat(r0, c0) > 0;
    }
  }
  return out;
}

} // namespace

std::vector<CellCoord> select_rbf_centers(const RegionState& state, const RbfOptions& opt) {
  if (opt.center_budget < 1) throw Error("rbf: center budget must be >= 1");
  const Mask near = dilate_missing(state, std::max<Index>(0, opt.halo));
  std::vector<CellCoord> ring, rest;
  for (Index r = 0; r < state.rows(); ++r) {
    for (Index c = 0; c < state.cols(); ++c) {
      if (!state.is_known(r, c)) continue;
      (near(r, c) ? ring : rest).push_back({r, c});
    }
  }
  std::vector<CellCoord> centers;
  const auto budget = static_cast<std::size_t>(opt.center_budget);
  if (ring.size() > budget) {
    const double stride = static_cast<double>(ring.size()) / static_cast<double>(budget);
    for (std::size_t i = 0; i < budget; ++i) {
      centers.push_back(ring[static_cast<std::size_t>(std::floor(static_cast<double>(i) * stride))]);
    }
    return centers;
  }
  centers = ring;
  const std::size_t remaining = budget - centers.size();
  if (remaining == 0 || rest.empty()) return centers;

  Index stride = std::max<Index>(
      1, static_cast<Index>(std::ceil(std::sqrt(static_cast<double>(rest.size()) /
                                                static_cast<double>(remaining)))));
  std::vector<CellCoord> lattice;
  while (true) {
    lattice.clear();
    for (const auto& p : rest) {
      if (p.row % stride == 0 && p.col % stride == 0) lattice.push_back(p);
    }
    if (lattice.size() <= remaining) break;
    ++stride;
  }
  centers.insert(centers.end(), lattice.begin(), lattice.end());
  std::sort(centers.begin(), centers.end());
  return centers;
}

RbfInterpolant::RbfInterpolant(std::vector<CellCoord> centers, const Eigen::VectorXd& values,
                               const RbfOptions& opt)
    : centers_(std::move(centers)), kind_(opt.kernel), degree_(opt.poly_degree) {
  const auto m = static_cast<Index>(centers_.size());
  if (m < 1) throw Error("rbf: at least one centre is required");
  if (values.size() != m) throw Error("rbf: one value per centre is required");

  if (opt.shape_param > 0.0) {
    shape_ = opt.shape_param;
  } else if (m > 1) {
    double sum = 0.0;
    for (Index i = 0; i < m; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (Index j = 0; j < m; ++j) {
        if (i != j) best = std::min(best, (centers_[i].as_vector() - centers_[j].as_vector()).norm());
      }
      sum += best;
    }
    shape_ = sum / static_cast<double>(m);
  }

  // drop to a lower polynomial degree when the centres cannot determine it
  const auto tail = [&](int degree) {
    Grid p(m, poly_terms(degree));
    for (Index i = 0; i < m; ++i) {
      if (degree >= 0) p(i, 0) = 1.0;
      if (degree >= 1) {
        p(i, 1) = static_cast<double>(centers_[i].row);
        p(i, 2) = static_cast<double>(centers_[i].col);
      }
    }
    return p;
  };
  degree_ = std::min(degree_, 1);
  while (degree_ >= 0) {
    const Grid p = tail(degree_);
    if (m >= p.cols() && Eigen::ColPivHouseholderQR<Grid>(p).rank() == p.cols()) break;
    --degree_;
  }

  const Index t = poly_terms(degree_);
  Grid system = Grid::Zero(m + t, m + t);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < m; ++j) {
      system(i, j) = kernel((centers_[i].as_vector() - centers_[j].as_vector()).squaredNorm());
    }
    system(i, i) += opt.ridge;
  }
  if (t > 0) {
    const Grid p = tail(degree_);
    system.topRightCorner(m, t) = p;
    system.bottomLeftCorner(t, m) = p.transpose();
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + t);
  rhs.head(m) = values;

  Eigen::FullPivLU<Grid> lu(system);
  if (!lu.isInvertible()) throw Error("rbf: interpolation system is singular");
  const Eigen::VectorXd sol = lu.solve(rhs);
  if (!sol.allFinite()) throw Error("rbf: interpolation system is singular");
  weights_ = sol.head(m);
  poly_ = sol.tail(t);
}

double RbfInterpolant::kernel(double r2) const {
  const double c2 = shape_ * shape_;
  switch (kind_) {
    case RbfKernel::Multiquadric: return std::sqrt(r2 + c2);
    case RbfKernel::InverseMultiquadric: return 1.0 / std::sqrt(r2 + c2);
    case RbfKernel::Gaussian: return std::exp(-r2 / c2);
  }
  return 0.0;
}

double RbfInterpolant::operator()(double row, double col) const {
  const Vec2 x(row, col);
  double v = 0.0;
  for (std::size_t i = 0; i < centers_.size(); ++i) {
    v += weights_[static_cast<Index>(i)] * kernel((x - centers_[i].as_vector()).squaredNorm());
  }
  if (degree_ >= 0) v += poly_[0];
  if (degree_ >= 1) v += poly_[1] * row + poly_[2] * col;
  return v;
}

RadioMap rbf_reconstruct(const RadioMap& map, const RegionState& state, const RbfOptions& opt) {
  if (state.rows() != map.rows() || state.cols() != map.cols()) {
    throw Error("rbf: region state shape does not match the radio map");
  }
  if (state.missing_count() == state.rows() * state.cols()) throw Error("rbf: no observed cell");
  auto centers = select_rbf_centers(state, opt);
  Eigen::VectorXd values(static_cast<Index>(centers.size()));
  for (std::size_t i = 0; i < centers.size(); ++i) values[static_cast<Index>(i)] = map(centers[i]);
  const RbfInterpolant rbf(std::move(centers), values, opt);

  RadioMap out = map;
  for (Index r = 0; r < map.rows(); ++r) {
    for (Index c = 0; c < map.cols(); ++c) {
      if (state.is_missing(r, c)) {
        out.values(r, c) = std::clamp(rbf(static_cast<double>(r), static_cast<double>(c)), 0.0, 1.0);
      }
    }
  }
  return out;
}

double LdplFit::predict_db(double distance) const {
  return intercept_db - 10.0 * exponent * std::log10(distance);
}

LdplFit fit_ldpl(const RadioMap& map, const RegionState& state, const Transmitter& tx) {
  const Grid raw = denormalize(map);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  Index n = 0;
  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  for (Index r = 0; r < map.rows(); ++r) {
    for (Index c = 0; c < map.cols(); ++c) {
      if (!state.is_known(r, c)) continue;
      const double d = (CellCoord{r, c}.as_vector() - tx.position).norm();
      if (d < 1e-9) continue;
      const double x = -10.0 * std::log10(d);
      const double y = 10.0 * std::log10(std::max(raw(r, c), 1e-12));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      ++n;
    }
  }
  if (n < 2 || !(x_max - x_min > 1e-12)) {
    throw Error("mbi: need observed cells at two or more distinct distances from the transmitter");
  }
  const double nn = static_cast<double>(n);
  const double mean_x = sx / nn, mean_y = sy / nn;
  const double var_x = sxx / nn - mean_x * mean_x;
  const double cov = sxy / nn - mean_x * mean_y;
  LdplFit fit;
  fit.exponent = cov / var_x;
  fit.intercept_db = mean_y - fit.exponent * mean_x;
  fit.samples = n;
  return fit;
}

RadioMap mbi_reconstruct(const RadioMap& map, const RegionState& state, const Transmitter& tx) {
  const LdplFit fit = fit_ldpl(map, state, tx);
  RadioMap out = map;
  for (Index r = 0; r < map.rows(); ++r) {
    for (Index c = 0; c < map.cols(); ++c) {
      if (!state.is_missing(r, c)) continue;
      const double d = std::max((CellCoord{r, c}.as_vector() - tx.position).norm(), 1e-9);
      const double raw = std::pow(10.0, fit.predict_db(d) / 10.0);
      out.values(r, c) = std::clamp(renormalize_value(map, raw), 0.0, 1.0);
    }
  }
  return out;
}

} // namespace radiomap
