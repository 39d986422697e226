#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "radiomap/fill.hpp"
#include "radiomap/ksvd.hpp"
#include "radiomap/sparse.hpp"

namespace radiomap {

enum class EstimatorMethod { EPC, EPD };

/// Where exemplar windows may come from.
enum class SearchSource { OriginalObservedOnly, IncludeFilled };

struct EstimatorConfig {
  EstimatorMethod method = EstimatorMethod::EPC;
  double lambda = 0.01;
  Index dictionary_size = 500;  ///< K
  Index training_patches = 2000; ///< W
  int ksvd_iters = 15;
  int sparse_max_iters = 200;
  double sparse_tol = 1e-6;
  SearchSource search_source = SearchSource::OriginalObservedOnly;
  bool clamp_output = true;
  std::uint64_t rng_seed = 0;

  void validate() const;
  LassoOptions lasso() const { return {lambda, sparse_max_iters, sparse_tol}; }
};

// ---------------------------------------------------------------- exemplar copy

struct ExemplarMatch {
  CellCoord top_left;
  double cost = 0.0;
};

/// Top-left corners of every n x n window whose cells are all set in `source`.
std::vector<CellCoord> legal_windows(const Mask& source, int patch_size);

/// Cells an exemplar window may cover under the given source policy.
Mask search_source_mask(const RegionState& state, SearchSource source);

/// Minimum-SSD window over the Valid cells of `target`; ties go to the
/// smallest (row, col) top-left corner. Throws when no window qualifies.
ExemplarMatch epc_search(const Patch& target, const RadioMap& map, const RegionState& state,
                         SearchSource source = SearchSource::OriginalObservedOnly);

/// The fully known window whose top-left corner is `top_left`.
Patch window_patch(const RadioMap& map, CellCoord top_left, int patch_size);

/// Valid cells keep the target's values, Hole cells take the exemplar's.
Patch epc_fill(const Patch& target, const Patch& exemplar);

class ExemplarCopyEstimator final : public PatchEstimator {
public:
  explicit ExemplarCopyEstimator(SearchSource source = SearchSource::OriginalObservedOnly)
      : source_(source) {}
  std::string name() const override { return "epc"; }
  PatchEstimate estimate(const Patch& target, const RadioMap& map,
                         const RegionState& state) override;
  std::string summary() const override;

private:
  SearchSource source_;
};

// ---------------------------------------------------------------- dictionary

/// Hole cells become (A beta)_i where beta sparse-codes the Valid rows.
Patch epd_fill(const Patch& target, const Dictionary& dict, const EstimatorConfig& cfg,
               SparseCode* code = nullptr);

class DictionaryEstimator final : public PatchEstimator {
public:
  DictionaryEstimator(Dictionary dict, EstimatorConfig cfg);
  std::string name() const override { return "epd"; }
  PatchEstimate estimate(const Patch& target, const RadioMap& map,
                         const RegionState& state) override;
  std::string summary() const override;
  const Dictionary& dictionary() const { return dict_; }

private:
  Dictionary dict_;
  EstimatorConfig cfg_;
};

/// Samples W training windows from the original observed region and runs K-SVD.
Dictionary train_for_map(const RadioMap& map, const RegionState& state, int patch_size,
                         const EstimatorConfig& cfg);

/// Builds the configured estimator; for EPD a dictionary is trained unless one is given.
std::unique_ptr<PatchEstimator> make_estimator(const EstimatorConfig& cfg, const RadioMap& map,
                                               const RegionState& state, int patch_size,
                                               const Dictionary* pretrained = nullptr);

} // namespace radiomap
