#include "radiomap/experiment.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <sstream>

#include "radiomap/grid_io.hpp"

namespace radiomap {

std::string to_string(Method m) {
  switch (m) {
    case Method::EPC: return "epc";
    case Method::EPD: return "epd";
    case Method::EBC: return "ebc";
    case Method::RBF: return "rbf";
    case Method::MBI: return "mbi";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "epc") return Method::EPC;
  if (name == "epd") return Method::EPD;
  if (name == "ebc") return Method::EBC;
  if (name == "rbf") return Method::RBF;
  if (name == "mbi") return Method::MBI;
  throw Error("unknown method '" + name + "' (expected epc, epd, ebc, rbf, mbi)");
}

RadioMap hide_restricted(const RadioMap& map, const RegionState& state) {
  RadioMap out = map;
  for (Index c = 0; c < map.cols(); ++c) {
    for (Index r = 0; r < map.rows(); ++r) {
      if (!state.original_observed()(r, c)) out.values(r, c) = 0.0;
    }
  }
  return out;
}

MethodRun run_method(Method method, const RadioMap& map, const RegionState& state,
                     const ObstacleMap& obstacles, std::span<const Transmitter> txs,
                     const MethodConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const RadioMap input = hide_restricted(map, state);
  MethodRun run;
  switch (method) {
    case Method::RBF:
      run.map = rbf_reconstruct(input, state, cfg.rbf);
      break;
    case Method::MBI:
      if (txs.empty()) throw Error("mbi: a transmitter is required");
      run.map = mbi_reconstruct(input, state, txs.front());
      break;
    case Method::EPC:
    case Method::EPD:
    case Method::EBC: {
      PriorityConfig pc = cfg.priority;
      pc.mode = method == Method::EBC ? PriorityMode::TextureOnly : PriorityMode::Full;
      EstimatorConfig ec = cfg.estimator;
      ec.method = method == Method::EPD ? EstimatorMethod::EPD : EstimatorMethod::EPC;
      auto estimator = make_estimator(ec, input, state, pc.patch_size);
      RegionState work = state;
      auto result = reconstruct(input, work, obstacles, txs, pc, *estimator);
      run.map = std::move(result.map);
      run.report = std::move(result.report);
      break;
    }
  }
  run.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return run;
}

Rect random_rect(Index rows, Index cols, Index height, Index width, Index margin,
                 std::mt19937_64& rng) {
  const Index max_top = rows - height - margin, max_left = cols - width - margin;
  if (height < 1 || width < 1 || max_top < margin || max_left < margin) {
    std::ostringstream os;
    os << "random_rect: a " << height << "x" << width << " rect with margin " << margin
       << " does not fit a " << rows << "x" << cols << " grid";
    throw Error(os.str());
  }
  const auto span_r = static_cast<std::uint64_t>(max_top - margin + 1);
  const auto span_c = static_cast<std::uint64_t>(max_left - margin + 1);
  const Index top = margin + static_cast<Index>(rng() % span_r);
  const Index left = margin + static_cast<Index>(rng() % span_c);
  return Rect{top, left, height, width};
}

TrialResult run_trial(const Scene& scene, const Rect& mask, Method method, const MethodConfig& cfg,
                      std::uint64_t seed) {
  const RegionState state = init_region_state(scene.map, mask);
  const Transmitter txs[] = {scene.tx};
  MethodConfig mc = cfg;
  mc.estimator.rng_seed = seed;
  const MethodRun run = run_method(method, scene.map, state, scene.obstacles, txs, mc);
  TrialResult t;
  t.method = method;
  t.scenario = to_string(scene.spec.pattern);
  t.mask = mask;
  t.seed = seed;
  t.metrics = evaluate(scene.map.values, run.map.values, mask);
  t.runtime_ms = run.runtime_ms;
  return t;
}

Scene sweep_scene(const SweepConfig& cfg, int trial) {
  SceneSpec spec = cfg.scene;
  spec.seed = cfg.seed * 1000003ULL + static_cast<std::uint64_t>(trial);
  return generate(spec);
}

Rect sweep_mask(const SweepConfig& cfg, int trial, Index size) {
  std::mt19937_64 rng(cfg.seed * 7919ULL + static_cast<std::uint64_t>(trial) * 104729ULL +
                      static_cast<std::uint64_t>(size));
  return random_rect(cfg.scene.rows, cfg.scene.cols, size, size, cfg.margin, rng);
}

std::vector<TrialResult> run_sweep(const SweepConfig& cfg,
                                   const std::function<void(const TrialResult&)>& on_trial) {
  if (cfg.trials < 1) throw Error("sweep: trial count must be >= 1");
  std::vector<TrialResult> out;
  for (int trial = 0; trial < cfg.trials; ++trial) {
    const Scene scene = sweep_scene(cfg, trial);
    for (const Index size : cfg.mask_sizes) {
      const Rect mask = sweep_mask(cfg, trial, size);
      for (const Method m : cfg.methods) {
        out.push_back(run_trial(scene, mask, m, cfg.method, scene.spec.seed));
        if (on_trial) on_trial(out.back());
      }
    }
  }
  return out;
}

std::vector<SweepSummary> summarize(const std::vector<TrialResult>& results) {
  std::map<std::tuple<std::string, int, Index>, SweepSummary> acc;
  for (const auto& r : results) {
    auto& s = acc[{r.scenario, static_cast<int>(r.method), r.mask.height}];
    s.method = r.method;
    s.scenario = r.scenario;
    s.mask_size = r.mask.height;
    s.mean_mse += r.metrics.mse;
    s.mean_ne += r.metrics.ne;
    ++s.trials;
  }
  std::vector<SweepSummary> out;
  for (auto& [key, s] : acc) {
    s.mean_mse /= s.trials;
    s.mean_ne /= s.trials;
    out.push_back(s);
  }
  return out;
}

void append_result_rows(const std::filesystem::path& path, std::span<const TrialResult> rows) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw Error("cannot append to " + path.string());
  if (fresh) out << "method,scenario,mask_h,mask_w,seed,mse,ne,runtime_ms\n";
  for (const auto& r : rows) {
    out << to_string(r.method) << ',' << r.scenario << ',' << r.mask.height << ',' << r.mask.width
        << ',' << r.seed << ',' << format_double(r.metrics.mse) << ',' << format_double(r.metrics.ne)
        << ',' << format_double(r.runtime_ms) << '\n';
  }
}

void write_summary_csv(const std::filesystem::path& path, std::span<const SweepSummary> rows) {
  std::string out = "method,scenario,mask_h,mask_w,trials,mean_mse,mean_ne\n";
  for (const auto& s : rows) {
    out += to_string(s.method) + ',' + s.scenario + ',' + std::to_string(s.mask_size) + ',' +
           std::to_string(s.mask_size) + ',' + std::to_string(s.trials) + ',' +
           format_double(s.mean_mse) + ',' + format_double(s.mean_ne) + '\n';
  }
  write_text_file(path, out);
}

} // namespace radiomap
