#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "radiomap/baselines.hpp"
#include "radiomap/estimators.hpp"
#include "radiomap/fill.hpp"
#include "radiomap/metrics.hpp"
#include "radiomap/scenegen.hpp"

namespace radiomap {

/// epc / epd: full priority; ebc: texture-only priority with exemplar copy.
enum class Method { EPC, EPD, EBC, RBF, MBI };

std::string to_string(Method m);
Method parse_method(const std::string& name);

struct MethodConfig {
  PriorityConfig priority;
  EstimatorConfig estimator;
  RbfOptions rbf;
};

struct MethodRun {
  RadioMap map;
  FillReport report; ///< empty for the interpolation baselines
  double runtime_ms = 0.0;
};

/// Runs one reconstruction method. Restricted cells of `map` are never read.
MethodRun run_method(Method method, const RadioMap& map, const RegionState& state,
                     const ObstacleMap& obstacles, std::span<const Transmitter> txs,
                     const MethodConfig& cfg);

/// Copy of `map` with every restricted cell zeroed, so estimators cannot peek.
RadioMap hide_restricted(const RadioMap& map, const RegionState& state);

/// Uniformly placed h x w rect keeping `margin` cells from the grid edge.
Rect random_rect(Index rows, Index cols, Index height, Index width, Index margin,
                 std::mt19937_64& rng);

struct TrialResult {
  Method method = Method::EPC;
  std::string scenario;
  Rect mask;
  std::uint64_t seed = 0;
  MetricReport metrics;
  double runtime_ms = 0.0;
};

TrialResult run_trial(const Scene& scene, const Rect& mask, Method method, const MethodConfig& cfg,
                      std::uint64_t seed);

struct SweepConfig {
  SceneSpec scene;
  std::vector<Method> methods{Method::EPC, Method::EPD, Method::EBC, Method::RBF, Method::MBI};
  std::vector<Index> mask_sizes{6, 14, 20, 26, 32};
  int trials = 10;
  std::uint64_t seed = 1;
  Index margin = 2;
  MethodConfig method;
};

/// Scene and mask for trial `trial` of a sweep at mask size `size`.
Scene sweep_scene(const SweepConfig& cfg, int trial);
Rect sweep_mask(const SweepConfig& cfg, int trial, Index size);

/// Every (method, size, trial) combination; trials share scene and mask across methods.
std::vector<TrialResult> run_sweep(const SweepConfig& cfg,
                                   const std::function<void(const TrialResult&)>& on_trial = {});

struct SweepSummary {
  Method method = Method::EPC;
  std::string scenario;
  Index mask_size = 0;
  int trials = 0;
  double mean_mse = 0.0;
  double mean_ne = 0.0;
};

std::vector<SweepSummary> summarize(const std::vector<TrialResult>& results);

/// method,scenario,mask_h,mask_w,seed,mse,ne,runtime_ms (header written when the file is new).
void append_result_rows(const std::filesystem::path& path, std::span<const TrialResult> rows);
void write_summary_csv(const std::filesystem::path& path, std::span<const SweepSummary> rows);

} // namespace radiomap
