#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "radiomap/grid.hpp"

namespace radiomap {

/// Sparse coefficient vector for one signal, with the objective it achieved.
template <typename Scalar>
struct BasicSparseCode {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> coefficients;
  Scalar objective = 0;
  Index nnz = 0;
  int iterations = 0;
};
using SparseCode = BasicSparseCode<double>;

struct LassoOptions {
  double lambda = 0.01;
  int max_iters = 200;
  double tol = 1e-6; ///< stop once the largest coefficient change in a sweep is below this
};

/// ||x - A beta||_2^2 + lambda ||beta||_1
template <typename DA, typename DX, typename DB>
typename DA::Scalar lasso_objective(const Eigen::MatrixBase<DA>& atoms,
                                    const Eigen::MatrixBase<DX>& x,
                                    const Eigen::MatrixBase<DB>& beta, double lambda) {
  using Scalar = typename DA::Scalar;
  return (x - atoms * beta).squaredNorm() + static_cast<Scalar>(lambda) * beta.template lpNorm<1>();
}

/// Feature-sign active-set refinement, started from the coordinate descent result.
/// CD on near-collinear atoms can stall far from the optimum on the wrong support;
/// this finishes the job exactly. The result is kept only if the objective does not rise.
template <typename DA, typename DX, typename Scalar>
void refine_active_set(const Eigen::MatrixBase<DA>& atoms, const Eigen::MatrixBase<DX>& x,
                       Scalar half_lambda, BasicSparseCode<Scalar>& code) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Index k = atoms.cols();
  const Scalar lambda = 2 * half_lambda;
  const Scalar slack = Scalar(1e-10) * std::max(Scalar(1), half_lambda);
  const auto objective = [&](const Vector& b) {
    return (x - atoms * b).squaredNorm() + lambda * b.template lpNorm<1>();
  };

  Vector beta = code.coefficients;
  const Vector col_sq = atoms.colwise().squaredNorm().transpose();
  for (int step = 0; step < 20 * static_cast<int>(k) + 20; ++step) {
    const Vector corr = atoms.transpose() * (x - atoms * beta);
    std::vector<Index> active;
    for (Index j = 0; j < k; ++j) {
      if (beta[j] != Scalar(0)) active.push_back(j);
    }
    // stationarity on the active set
    bool stationary = true;
    for (Index j : active) {
      if (std::abs(corr[j] - (beta[j] > 0 ? half_lambda : -half_lambda)) > slack) stationary = false;
    }
    Vector sign = beta.cwiseSign();
    if (stationary) {
      Index worst = -1;
      Scalar worst_abs = half_lambda + slack;
      for (Index j = 0; j < k; ++j) {
        if (beta[j] == Scalar(0) && col_sq[j] > Scalar(0) && std::abs(corr[j]) > worst_abs) {
          worst_abs = std::abs(corr[j]);
          worst = j;
        }
      }
      if (worst < 0) break; // KKT holds everywhere
      active.push_back(worst);
      sign[worst] = corr[worst] > 0 ? Scalar(1) : Scalar(-1);
    }

    const Index s = static_cast<Index>(active.size());
    Matrix sub(atoms.rows(), s);
    Vector rhs(s);
    for (Index i = 0; i < s; ++i) {
      sub.col(i) = atoms.col(active[i]);
      rhs[i] = sub.col(i).dot(x) - half_lambda * sign[active[i]];
    }
    const Matrix gram = sub.transpose() * sub;
    const Vector target = gram.completeOrthogonalDecomposition().solve(rhs);
    if (!target.allFinite()) break;

    // objective is convex on the segment's sign-constant pieces: check the end and every crossing
    Vector best = beta;
    Scalar best_obj = objective(beta);
    Vector end = beta;
    for (Index i = 0; i < s; ++i) end[active[i]] = target[i];
    std::vector<Scalar> stops{Scalar(1)};
    for (Index i = 0; i < s; ++i) {
      const Scalar from = beta[active[i]], to = target[i];
      if (from != Scalar(0) && (from > 0) != (to > 0)) stops.push_back(from / (from - to));
    }
    for (Scalar t : stops) {
      Vector trial = beta + t * (end - beta);
      for (Index i = 0; i < s; ++i) {
        const Scalar from = beta[active[i]], to = target[i];
        if (from != Scalar(0) && (from > 0) != (to > 0) && t == from / (from - to)) trial[active[i]] = 0;
        else if (from == Scalar(0) && t < Scalar(1) && (trial[active[i]] > 0) != (sign[active[i]] > 0)) {
          trial[active[i]] = 0;
        }
      }
      const Scalar o = objective(trial);
      if (o < best_obj) {
        best_obj = o;
        best = trial;
      }
    }
    if (best == beta) break; // no progress possible
    beta = best;
  }
  const Scalar final_obj = objective(beta);
  if (final_obj <= code.objective) {
    code.coefficients = beta;
    code.objective = final_obj;
  }
}

/// Cyclic coordinate descent with soft thresholding for the lasso above.
///
/// Starts from beta = 0, so any lambda >= 2 ||A^T x||_inf returns exactly zero.
/// Columns with zero norm (e.g. atoms whose support is entirely masked out) stay at zero.
template <typename DA, typename DX>
BasicSparseCode<typename DA::Scalar> sparse_code(const Eigen::MatrixBase<DA>& atoms,
                                                 const Eigen::MatrixBase<DX>& x,
                                                 const LassoOptions& opt) {
  using Scalar = typename DA::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Index k = atoms.cols();
  const Scalar half_lambda = static_cast<Scalar>(opt.lambda) / 2;

  BasicSparseCode<Scalar> code;
  code.coefficients = Vector::Zero(k);
  Vector residual = x;
  const Vector col_sq = atoms.colwise().squaredNorm().transpose();

  auto& beta = code.coefficients;
  // beta = 0 is optimal exactly when every correlation is within lambda / 2
  const Vector corr = atoms.transpose() * x;
  if (k == 0 || corr.cwiseAbs().maxCoeff() <= half_lambda) {
    code.objective = x.squaredNorm();
    return code;
  }
  for (int it = 0; it < opt.max_iters; ++it) {
    Scalar max_change = 0;
    for (Index j = 0; j < k; ++j) {
      if (col_sq[j] <= Scalar(0)) continue;
      const Scalar old = beta[j];
      const Scalar rho = atoms.col(j).dot(residual) + col_sq[j] * old;
      Scalar updated = 0;
      if (rho > half_lambda) updated = (rho - half_lambda) / col_sq[j];
      else if (rho < -half_lambda) updated = (rho + half_lambda) / col_sq[j];
      if (updated != old) {
        residual.noalias() -= (updated - old) * atoms.col(j);
        beta[j] = updated;
        max_change = std::max(max_change, std::abs(updated - old));
      }
    }
    code.iterations = it + 1;
    if (max_change < static_cast<Scalar>(opt.tol)) break;
  }

  code.objective = lasso_objective(atoms, x, beta, opt.lambda);
  refine_active_set(atoms, x, half_lambda, code);
  const Scalar zero_objective = x.squaredNorm();
  if (!(code.objective <= zero_objective)) {
    beta.setZero();
    code.objective = zero_objective;
  }
  code.nnz = (beta.array().abs() > Scalar(1e-12)).count();
  return code;
}

/// Batch orthogonal matching pursuit from a precomputed Gram matrix G = A^T A
/// and correlations A^T y. Selects at most `sparsity` atoms.
template <typename DG, typename DC>
Eigen::Matrix<typename DG::Scalar, Eigen::Dynamic, 1>
batch_omp(const Eigen::MatrixBase<DG>& gram, const Eigen::MatrixBase<DC>& correlations,
          Index sparsity) {
  using Scalar = typename DG::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Index k = gram.rows();
  Vector alpha = correlations;
  Vector code = Vector::Zero(k);
  std::vector<Index> support;
  std::vector<char> chosen(static_cast<std::size_t>(k), 0);
  Vector solved;
  const Scalar scale = correlations.cwiseAbs().maxCoeff();

  for (Index step = 0; step < std::min(sparsity, k); ++step) {
    Index best = -1;
    Scalar best_abs = 0;
    for (Index j = 0; j < k; ++j) {
      if (chosen[static_cast<std::size_t>(j)]) continue;
      if (std::abs(alpha[j]) > best_abs) {
        best_abs = std::abs(alpha[j]);
        best = j;
      }
    }
    if (best < 0 || best_abs <= Scalar(1e-12) * std::max(scale, Scalar(1))) break;
    support.push_back(best);
    chosen[static_cast<std::size_t>(best)] = 1;

    const Index s = static_cast<Index>(support.size());
    Matrix g_ss(s, s);
    Vector rhs(s);
    for (Index a = 0; a < s; ++a) {
      rhs[a] = correlations[support[a]];
      for (Index b = 0; b < s; ++b) g_ss(a, b) = gram(support[a], support[b]);
    }
    solved = g_ss.ldlt().solve(rhs);
    alpha = correlations;
    for (Index a = 0; a < s; ++a) alpha.noalias() -= solved[a] * gram.col(support[a]);
  }
  for (std::size_t a = 0; a < support.size(); ++a) code[support[a]] = solved[static_cast<Index>(a)];
  return code;
}

} // namespace radiomap
