#pragma once

#include <Eigen/Core>

#include "radiomap/grid.hpp"

namespace radiomap {

namespace detail {

template <typename DA, typename DB>
void check_metric_inputs(const Eigen::MatrixBase<DA>& truth, const Eigen::MatrixBase<DB>& estimate,
                         const Mask& region) {
  if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols() ||
      truth.rows() != region.rows() || truth.cols() != region.cols()) {
    throw Error("metrics: truth, estimate and region must share one shape");
  }
  if (region.count() == 0) throw Error("metrics: empty evaluation region");
}

} // namespace detail

/// Sum of squared differences over the region.
template <typename DA, typename DB>
typename DA::Scalar squared_error(const Eigen::MatrixBase<DA>& truth,
                                  const Eigen::MatrixBase<DB>& estimate, const Mask& region) {
  detail::check_metric_inputs(truth, estimate, region);
  return region.select((truth - estimate).array().square(), 0).sum();
}

/// Mean squared error over the region cells.
template <typename DA, typename DB>
typename DA::Scalar mse(const Eigen::MatrixBase<DA>& truth, const Eigen::MatrixBase<DB>& estimate,
                        const Mask& region) {
  using Scalar = typename DA::Scalar;
  return squared_error(truth, estimate, region) / static_cast<Scalar>(region.count());
}

/// Squared error normalized by the truth energy over the region.
template <typename DA, typename DB>
typename DA::Scalar ne(const Eigen::MatrixBase<DA>& truth, const Eigen::MatrixBase<DB>& estimate,
                       const Mask& region) {
  using Scalar = typename DA::Scalar;
  const Scalar energy = region.select(truth.array().square(), 0).sum();
  detail::check_metric_inputs(truth, estimate, region);
  if (!(energy > Scalar(0))) throw Error("metrics: NE undefined, truth is zero over the region");
  return squared_error(truth, estimate, region) / energy;
}

struct MetricReport {
  double mse = 0.0;
  double ne = 0.0;
  Index cell_count = 0;
  Rect region;
};

inline MetricReport evaluate(const Grid& truth, const Grid& estimate, const Mask& region) {
  MetricReport m;
  m.mse = mse(truth, estimate, region);
  m.ne = ne(truth, estimate, region);
  m.cell_count = region.count();
  m.region = bounding_rect(region);
  return m;
}

inline MetricReport evaluate(const Grid& truth, const Grid& estimate, const Rect& region) {
  return evaluate(truth, estimate, rect_mask(truth.rows(), truth.cols(), region));
}

} // namespace radiomap
