#include <algorithm>
#include <sstream>

#include "radiomap/estimators.hpp"

namespace radiomap {

Patch epd_fill(const Patch& target, const Dictionary& dict, const EstimatorConfig& cfg,
               SparseCode* code_out) {
  const Index len = static_cast<Index>(target.size) * target.size;
  if (dict.signal_length() != len) {
    std::ostringstream os;
    os << "epd_fill: dictionary atoms have length " << dict.signal_length() << " but the patch has "
       << len << " cells";
    throw Error(os.str());
  }
  std::vector<Index> rows;
  for (Index i = 0; i < len; ++i) {
    if (target.validity.data()[i] == static_cast<std::uint8_t>(CellValidity::Valid)) rows.push_back(i);
  }
  if (rows.empty()) throw Error("epd_fill: target patch has no valid cell");

  const Eigen::VectorXd x = target.vectorized();
  const auto m = static_cast<Index>(rows.size());
  Grid masked_atoms(m, dict.size());
  Eigen::VectorXd masked_x(m);
  for (Index i = 0; i < m; ++i) {
    masked_atoms.row(i) = dict.atoms.row(rows[static_cast<std::size_t>(i)]);
    masked_x[i] = x[rows[static_cast<std::size_t>(i)]];
  }
  const SparseCode code = sparse_code(masked_atoms, masked_x, cfg.lasso());
  const Eigen::VectorXd synth = dict.atoms * code.coefficients;

  Patch out = target;
  for (Index i = 0; i < len; ++i) {
    if (target.validity.data()[i] != static_cast<std::uint8_t>(CellValidity::Hole)) continue;
    double v = synth[i];
    if (cfg.clamp_output) v = std::clamp(v, 0.0, 1.0);
    out.values.data()[i] = v;
  }
  if (code_out) *code_out = code;
  return out;
}

DictionaryEstimator::DictionaryEstimator(Dictionary dict, EstimatorConfig cfg)
    : dict_(std::move(dict)), cfg_(cfg) {
  cfg_.validate();
  if (dict_.size() < 1) throw Error("dictionary estimator: empty dictionary");
}

PatchEstimate DictionaryEstimator::estimate(const Patch& target, const RadioMap&,
                                            const RegionState&) {
  SparseCode code;
  PatchEstimate est;
  est.patch = epd_fill(target, dict_, cfg_, &code);
  est.score = code.objective;
  return est;
}

std::string DictionaryEstimator::summary() const {
  std::ostringstream os;
  os << "epd K=" << dict_.size() << " n=" << dict_.patch_size << " W=" << dict_.meta.samples
     << " ksvd_iters=" << dict_.meta.iterations << " train_error=" << dict_.meta.final_error
     << " lambda=" << cfg_.lambda << " sparse_max_iters=" << cfg_.sparse_max_iters
     << " sparse_tol=" << cfg_.sparse_tol << " clamp=" << (cfg_.clamp_output ? 1 : 0)
     << " seed=" << cfg_.rng_seed;
  return os.str();
}

Dictionary train_for_map(const RadioMap& map, const RegionState& state, int patch_size,
                         const EstimatorConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.rng_seed);
  const Grid samples = sample_training_patches(map, state, cfg.training_patches, patch_size, rng);
  KsvdOptions opt;
  opt.atoms = cfg.dictionary_size;
  opt.iterations = cfg.ksvd_iters;
  opt.seed = cfg.rng_seed + 1;
  Dictionary dict = train_dictionary(samples, opt);
  dict.patch_size = patch_size;
  return dict;
}

std::unique_ptr<PatchEstimator> make_estimator(const EstimatorConfig& cfg, const RadioMap& map,
                                               const RegionState& state, int patch_size,
                                               const Dictionary* pretrained) {
  cfg.validate();
  if (cfg.method == EstimatorMethod::EPC) {
    return std::make_unique<ExemplarCopyEstimator>(cfg.search_source);
  }
  if (pretrained) {
    if (pretrained->signal_length() != static_cast<Index>(patch_size) * patch_size) {
      throw Error("make_estimator: pretrained dictionary does not match the patch size");
    }
    return std::make_unique<DictionaryEstimator>(*pretrained, cfg);
  }
  return std::make_unique<DictionaryEstimator>(train_for_map(map, state, patch_size, cfg), cfg);
}

} // namespace radiomap
