#include "radiomap/ksvd.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "radiomap/estimators.hpp"
#include "radiomap/grid_io.hpp"
#include "radiomap/sparse.hpp"

namespace radiomap {

Index default_ksvd_sparsity(Index atoms) { return std::max<Index>(1, (atoms + 49) / 50); }

namespace {

double mean_squared_columns(const Grid& residual) {
  return residual.colwise().squaredNorm().sum() / static_cast<double>(residual.cols());
}

Grid initial_atoms(const Grid& samples, Index k, std::mt19937_64& rng) {
  std::vector<Index> usable;
  for (Index j = 0; j < samples.cols(); ++j) {
    if (samples.col(j).norm() > 1e-12) usable.push_back(j);
  }
  if (usable.empty()) throw Error("train_dictionary: every training sample is zero");
  std::shuffle(usable.begin(), usable.end(), rng);

  Grid atoms(samples.rows(), k);
  std::normal_distribution<double> jitter(0.0, 1e-3);
  for (Index a = 0; a < k; ++a) {
    const auto pick = usable[static_cast<std::size_t>(a) % usable.size()];
    Eigen::VectorXd v = samples.col(pick).normalized();
    if (a >= static_cast<Index>(usable.size())) {
      // resampled atom: perturb so it is not an exact copy of an earlier one
      for (Index i = 0; i < v.size(); ++i) v[i] += jitter(rng);
      v.normalize();
    }
    atoms.col(a) = v;
  }
  return atoms;
}

} // namespace

Dictionary train_dictionary(const Grid& samples, const KsvdOptions& opt) {
  if (samples.cols() < 1 || samples.rows() < 1) throw Error("train_dictionary: no samples");
  if (opt.atoms < 1) throw Error("train_dictionary: dictionary size must be >= 1");
  if (opt.iterations < 1) throw Error("train_dictionary: iteration count must be >= 1");
  if (!samples.allFinite()) throw Error("train_dictionary: non-finite training sample");

  const Index len = samples.rows();
  const Index n_samples = samples.cols();
  const Index k = opt.atoms;
  const Index sparsity = std::min(opt.sparsity > 0 ? opt.sparsity : default_ksvd_sparsity(k), k);

  std::mt19937_64 rng(opt.seed);
  Dictionary dict;
  dict.atoms = initial_atoms(samples, k, rng);
  const auto n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(len))));
  dict.patch_size = n * n == len ? n : 0;
  dict.meta.samples = n_samples;

  Grid codes = Grid::Zero(k, n_samples);
  Grid residual = samples;

  for (int iter = 0; iter < opt.iterations; ++iter) {
    // sparse coding stage
    const Grid gram = dict.atoms.transpose() * dict.atoms;
    const Grid corr = dict.atoms.transpose() * samples;
    for (Index i = 0; i < n_samples; ++i) {
      const Eigen::VectorXd code = batch_omp(gram, corr.col(i), sparsity);
      const Eigen::VectorXd r = samples.col(i) - dict.atoms * code;
      if (r.squaredNorm() < residual.col(i).squaredNorm()) {
        codes.col(i) = code;
        residual.col(i) = r;
      }
    }

    // atom update stage
    std::vector<Index> unused;
    std::vector<Index> users;
    for (Index a = 0; a < k; ++a) {
      users.clear();
      for (Index i = 0; i < n_samples; ++i) {
        if (codes(a, i) != 0.0) users.push_back(i);
      }
      if (users.empty()) {
        unused.push_back(a);
        continue;
      }
      const auto m = static_cast<Index>(users.size());
      Grid err(len, m);
      for (Index u = 0; u < m; ++u) {
        err.col(u) = residual.col(users[u]) + dict.atoms.col(a) * codes(a, users[u]);
      }
      Eigen::BDCSVD<Grid> svd(err, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const double sigma = svd.singularValues()[0];
      Eigen::VectorXd atom = svd.matrixU().col(0);
      const double norm = atom.norm();
      if (!(norm > 0.0) || !(sigma > 0.0)) continue;
      atom /= norm;
      const Eigen::VectorXd coef = svd.matrixV().col(0) * (sigma * norm);
      dict.atoms.col(a) = atom;
      for (Index u = 0; u < m; ++u) {
        codes(a, users[u]) = coef[u];
        residual.col(users[u]) = err.col(u) - atom * coef[u];
      }
    }

    // re-seed dead atoms from the samples we reconstruct worst
    if (!unused.empty()) {
      const Eigen::VectorXd res_sq = residual.colwise().squaredNorm().transpose();
      std::vector<Index> order(static_cast<std::size_t>(n_samples));
      std::iota(order.begin(), order.end(), Index{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](Index a, Index b) { return res_sq[a] > res_sq[b]; });
      std::size_t next = 0;
      for (const Index a : unused) {
        while (next < order.size() && samples.col(order[next]).norm() <= 1e-12) ++next;
        if (next >= order.size() || res_sq[order[next]] <= 1e-24) break;
        dict.atoms.col(a) = samples.col(order[next]).normalized();
        ++next;
      }
    }

    residual = samples - dict.atoms * codes;
    dict.meta.error_history.push_back(mean_squared_columns(residual));
  }
  dict.meta.iterations = opt.iterations;
  dict.meta.final_error = dict.meta.error_history.back();
  return dict;
}

Grid sample_training_patches(const RadioMap& map, const RegionState& state, Index count,
                             int patch_size, std::mt19937_64& rng) {
  if (count < 1) throw Error("sample_training_patches: sample count must be >= 1");
  const auto windows = legal_windows(state.original_observed(), patch_size);
  if (windows.empty()) {
    std::ostringstream os;
    os << "sample_training_patches: no fully observed " << patch_size << "x" << patch_size
       << " window; use a smaller patch size";
    throw Error(os.str());
  }
  std::uniform_int_distribution<std::size_t> pick(0, windows.size() - 1);
  const Index len = static_cast<Index>(patch_size) * patch_size;
  Grid out(len, count);
  for (Index j = 0; j < count; ++j) {
    const CellCoord tl = windows[pick(rng)];
    const auto block = map.values.block(tl.row, tl.col, patch_size, patch_size);
    for (Index c = 0; c < patch_size; ++c) {
      out.col(j).segment(c * patch_size, patch_size) = block.col(c);
    }
  }
  return out;
}

void write_dictionary(const std::filesystem::path& path, const Dictionary& dict) {
  std::string out = std::to_string(dict.size()) + ',' + std::to_string(dict.patch_size) + '\n';
  out += format_grid(dict.atoms);
  write_text_file(path, out);
}

Dictionary read_dictionary(const std::filesystem::path& path) {
  const auto rows = parse_csv_rows(read_text_file(path), path.string());
  if (rows.empty() || rows.front().size() != 2) {
    throw Error(path.string() + ": line 1: dictionary header must be 'K,n'");
  }
  const double k_raw = rows[0][0], n_raw = rows[0][1];
  if (k_raw < 1 || n_raw < 1 || k_raw != std::floor(k_raw) || n_raw != std::floor(n_raw)) {
    throw Error(path.string() + ": line 1: K and n must be positive integers");
  }
  const auto k = static_cast<Index>(k_raw);
  const auto n = static_cast<int>(n_raw);
  const Index len = static_cast<Index>(n) * n;
  if (static_cast<Index>(rows.size()) != len + 1) {
    std::ostringstream os;
    os << path.string() << ": expected " << len + 1 << " rows, found " << rows.size();
    throw Error(os.str());
  }
  Dictionary dict;
  dict.patch_size = n;
  dict.atoms.resize(len, k);
  for (Index r = 0; r < len; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r + 1)];
    if (static_cast<Index>(row.size()) != k) {
      std::ostringstream os;
      os << path.string() << ": line " << r + 2 << ": expected " << k << " values";
      throw Error(os.str());
    }
    for (Index c = 0; c < k; ++c) dict.atoms(r, c) = row[static_cast<std::size_t>(c)];
  }
  for (Index c = 0; c < k; ++c) {
    if (std::abs(dict.atoms.col(c).norm() - 1.0) > 1e-6) {
      throw Error(path.string() + ": atom " + std::to_string(c) + " is not unit norm");
    }
  }
  return dict;
}

} // namespace radiomap
