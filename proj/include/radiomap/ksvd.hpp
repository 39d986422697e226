#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "radiomap/grid.hpp"

namespace radiomap {

/// K unit-norm atoms of length n^2, one per column.
struct Dictionary {
  Grid atoms;
  int patch_size = 0;

  struct TrainingMeta {
    Index samples = 0;
    int iterations = 0;
    double final_error = 0.0;
    std::vector<double> error_history; ///< mean squared residual per sample, after each iteration
  } meta;

  Index size() const { return atoms.cols(); }
  Index signal_length() const { return atoms.rows(); }
};

struct KsvdOptions {
  Index atoms = 500;
  int iterations = 15;
  Index sparsity = 0; ///< OMP target; 0 selects ceil(atoms / 50)
  std::uint64_t seed = 0;
};

/// OMP sparsity used by K-SVD's coding stage when none is given.
Index default_ksvd_sparsity(Index atoms);

/// K-SVD on the columns of `samples`.
///
/// Coding uses batch OMP; a sample keeps its previous code whenever the new one
/// reconstructs it worse, so the recorded error never increases. Atoms nobody
/// uses are re-seeded from the worst-reconstructed sample.
Dictionary train_dictionary(const Grid& samples, const KsvdOptions& opt);

/// Draws `count` windows uniformly with replacement from positions fully inside
/// the original observed region; column j is window j stacked column-major.
Grid sample_training_patches(const RadioMap& map, const RegionState& state, Index count,
                             int patch_size, std::mt19937_64& rng);

/// First row "K,n", then n^2 rows of K atom entries.
void write_dictionary(const std::filesystem::path& path, const Dictionary& dict);
Dictionary read_dictionary(const std::filesystem::path& path);

} // namespace radiomap
