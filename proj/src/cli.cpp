#include "radiomap/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <iostream>
#include <sstream>

#include "radiomap/experiment.hpp"
#include "radiomap/grid_io.hpp"

namespace radiomap::cli {

namespace {

struct UsageError : Error {
  using Error::Error;
};

std::vector<double> parse_numbers(const std::string& text, std::size_t expected, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": cannot parse '" + text + "'");
    }
  }
  if (out.size() != expected) {
    throw UsageError(std::string(what) + ": expected " + std::to_string(expected) +
                     " comma-separated numbers, got '" + text + "'");
  }
  return out;
}

Rect parse_rect(const std::string& text) {
  const auto v = parse_numbers(text, 4, "--rect");
  for (double x : v) {
    if (x != std::floor(x)) throw UsageError("--rect: entries must be integers, got '" + text + "'");
  }
  return Rect{static_cast<Index>(v[0]), static_cast<Index>(v[1]), static_cast<Index>(v[2]),
              static_cast<Index>(v[3])};
}

Vec2 parse_point(const std::string& text, const char* what) {
  const auto v = parse_numbers(text, 2, what);
  return {v[0], v[1]};
}

Mask restricted_region(const std::string& mask_path, const std::string& rect, Index rows,
                       Index cols) {
  if (!mask_path.empty() && !rect.empty()) throw UsageError("give either --mask or --rect, not both");
  if (!mask_path.empty()) {
    Mask m = read_mask_file(mask_path);
    if (m.rows() != rows || m.cols() != cols) throw Error("mask shape does not match the map");
    return m;
  }
  if (rect.empty()) throw UsageError("a restricted region is required (--mask or --rect)");
  const Rect r = parse_rect(rect);
  if (!r.fits_in(rows, cols)) {
    std::ostringstream os;
    os << "--rect " << rect << " (" << r.to_string() << ") does not fit the " << rows << "x" << cols
       << " map";
    throw Error(os.str());
  }
  return rect_mask(rows, cols, r);
}

// ---------------------------------------------------------------- reconstruct

struct ReconstructArgs {
  std::string map, mask, rect, obstacles, manifest, truth;
  std::vector<std::string> tx;
  std::string out = "reconstructed.csv";
  std::string fill_order;
  std::string heatmaps;
  std::string method = "epc";
  std::string priority = "full";
  int patch_size = 15;
  double beta = 2.0;
  double lambda = 0.01;
  Index dict_size = 500;
  Index train_patches = 2000;
  int ksvd_iters = 15;
  std::uint64_t seed = 0;
  bool clamp = true;
  std::string dictionary_in, dictionary_out;
};

void add_reconstruct(CLI::App& app, ReconstructArgs& a) {
  auto* cmd = app.add_subcommand("reconstruct", "Fill the restricted region of a radio map");
  cmd->add_option("--map", a.map, "Radio map CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--mask", a.mask, "Restricted-region mask CSV (1 = restricted)")->check(CLI::ExistingFile);
  cmd->add_option("--rect", a.rect, "Restricted rect top,left,height,width");
  cmd->add_option("--tx", a.tx, "Transmitter row,col (repeatable)");
  cmd->add_option("--manifest", a.manifest, "Scene manifest providing the transmitter")->check(CLI::ExistingFile);
  cmd->add_option("--obstacles", a.obstacles, "Obstacle CSV (1 = building)")->check(CLI::ExistingFile);
  cmd->add_option("--truth", a.truth, "Ground-truth CSV for the error heatmap")->check(CLI::ExistingFile);
  cmd->add_option("--out", a.out, "Reconstructed map CSV")->capture_default_str();
  cmd->add_option("--fill-order", a.fill_order, "Fill-order CSV (default: <out>.fill_order.csv)");
  cmd->add_option("--heatmaps", a.heatmaps, "Directory for PGM heatmaps");
  cmd->add_option("--method", a.method, "epc or epd")->check(CLI::IsMember({"epc", "epd"}))->capture_default_str();
  cmd->add_option("--priority", a.priority, "full or texture")->check(CLI::IsMember({"full", "texture"}))->capture_default_str();
  cmd->add_option("--patch-size", a.patch_size, "Odd patch size")->capture_default_str();
  cmd->add_option("--beta", a.beta, "Inverse-distance exponent")->capture_default_str();
  cmd->add_option("--lambda", a.lambda, "Lasso weight")->capture_default_str();
  cmd->add_option("--dict-size", a.dict_size, "Dictionary atoms K")->capture_default_str();
  cmd->add_option("--train-patches", a.train_patches, "Training windows W")->capture_default_str();
  cmd->add_option("--ksvd-iters", a.ksvd_iters, "K-SVD iterations")->capture_default_str();
  cmd->add_option("--seed", a.seed, "RNG seed")->capture_default_str();
  cmd->add_flag("--clamp,!--no-clamp", a.clamp, "Clamp dictionary estimates to [0,1]")->capture_default_str();
  cmd->add_option("--dictionary-in", a.dictionary_in, "Reuse a saved dictionary")->check(CLI::ExistingFile);
  cmd->add_option("--dictionary-out", a.dictionary_out, "Save the trained dictionary");
}

int do_reconstruct(const ReconstructArgs& a) {
  const RadioMap map = normalize(read_grid_file(a.map));
  const Mask restricted = restricted_region(a.mask, a.rect, map.rows(), map.cols());
  RegionState state = init_region_state(map, restricted);

  std::vector<Transmitter> txs;
  for (const auto& t : a.tx) txs.push_back({parse_point(t, "--tx"), static_cast<int>(txs.size())});
  if (txs.empty() && !a.manifest.empty()) txs.push_back(read_manifest_tx(a.manifest));
  if (a.priority == "full" && txs.empty()) {
    throw UsageError("full priority needs a transmitter (--tx row,col or --manifest)");
  }

  ObstacleMap obstacles = ObstacleMap::empty(map.rows(), map.cols());
  if (!a.obstacles.empty()) {
    obstacles.cells = read_mask_file(a.obstacles);
    if (obstacles.rows() != map.rows() || obstacles.cols() != map.cols()) {
      throw Error("obstacle map shape does not match the radio map");
    }
  }

  PriorityConfig pc;
  pc.patch_size = a.patch_size;
  pc.beta = a.beta;
  pc.mode = a.priority == "full" ? PriorityMode::Full : PriorityMode::TextureOnly;
  pc.validate();

  EstimatorConfig ec;
  ec.method = a.method == "epd" ? EstimatorMethod::EPD : EstimatorMethod::EPC;
  ec.lambda = a.lambda;
  ec.dictionary_size = a.dict_size;
  ec.training_patches = a.train_patches;
  ec.ksvd_iters = a.ksvd_iters;
  ec.rng_seed = a.seed;
  ec.clamp_output = a.clamp;
  ec.validate();

  const RadioMap input = hide_restricted(map, state);
  std::optional<Dictionary> saved;
  if (!a.dictionary_in.empty()) saved = read_dictionary(a.dictionary_in);
  auto estimator = make_estimator(ec, input, state, pc.patch_size, saved ? &*saved : nullptr);
  if (!a.dictionary_out.empty()) {
    const auto* de = dynamic_cast<const DictionaryEstimator*>(estimator.get());
    if (!de) throw UsageError("--dictionary-out requires --method epd");
    write_dictionary(a.dictionary_out, de->dictionary());
  }

  const FillResult result = reconstruct(input, state, obstacles, txs, pc, *estimator);
  write_grid_file(a.out, denormalize(result.map));
  write_fill_order_csv(a.fill_order.empty() ? a.out + ".fill_order.csv" : a.fill_order, result.report);

  if (!a.heatmaps.empty()) {
    const std::filesystem::path dir(a.heatmaps);
    std::filesystem::create_directories(dir);
    write_pgm(dir / "input_masked.pgm", input.values);
    write_pgm(dir / "output.pgm", result.map.values);
    if (!a.truth.empty()) {
      const Grid truth = read_grid_file(a.truth);
      if (truth.rows() != map.rows() || truth.cols() != map.cols()) {
        throw Error("truth shape does not match the radio map");
      }
      Grid truth_n(truth.rows(), truth.cols());
      for (Index c = 0; c < truth.cols(); ++c)
        for (Index r = 0; r < truth.rows(); ++r) truth_n(r, c) = renormalize_value(map, truth(r, c));
      write_pgm(dir / "abs_error.pgm", (truth_n - result.map.values).cwiseAbs());
    }
  }
  std::cout << "filled " << result.report.cells_filled << " cells in " << result.report.iterations
            << " iterations (" << result.report.estimator << ")\n";
  return kSuccess;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string truth, estimate, mask, rect, results;
  std::string method = "unknown";
  std::string scenario = "custom";
  std::uint64_t seed = 0;
  double runtime_ms = 0.0;
};

void add_evaluate(CLI::App& app, EvaluateArgs& a) {
  auto* cmd = app.add_subcommand("evaluate", "MSE and NE of an estimate over the restricted region");
  cmd->add_option("--truth", a.truth, "Ground-truth CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--estimate", a.estimate, "Estimated CSV")->required()->check(CLI::ExistingFile);
  cmd->add_option("--mask", a.mask, "Region mask CSV")->check(CLI::ExistingFile);
  cmd->add_option("--rect", a.rect, "Region rect top,left,height,width");
  cmd->add_option("--results", a.results, "Results CSV to append to");
  cmd->add_option("--method", a.method, "Method label for the results row");
  cmd->add_option("--scenario", a.scenario, "Scenario label for the results row");
  cmd->add_option("--seed", a.seed, "Seed recorded in the results row");
  cmd->add_option("--runtime-ms", a.runtime_ms, "Runtime recorded in the results row");
}

int do_evaluate(const EvaluateArgs& a) {
  const Grid truth_raw = read_grid_file(a.truth);
  const Grid est_raw = read_grid_file(a.estimate);
  if (truth_raw.rows() != est_raw.rows() || truth_raw.cols() != est_raw.cols()) {
    throw Error("truth and estimate shapes differ");
  }
  // both are measured in the truth's normalized units
  const RadioMap truth = normalize(truth_raw);
  Grid est(est_raw.rows(), est_raw.cols());
  for (Index c = 0; c < est.cols(); ++c)
    for (Index r = 0; r < est.rows(); ++r) est(r, c) = renormalize_value(truth, est_raw(r, c));

  const Mask region = restricted_region(a.mask, a.rect, truth.rows(), truth.cols());
  const MetricReport m = evaluate(truth.values, est, region);
  std::cout << "mse=" << format_double(m.mse) << " ne=" << format_double(m.ne)
            << " cells=" << m.cell_count << '\n';
  if (!a.results.empty()) {
    // method label is free text here, so write the row by hand
    const bool fresh = !std::filesystem::exists(a.results) || std::filesystem::file_size(a.results) == 0;
    std::ofstream out(a.results, std::ios::app | std::ios::binary);
    if (!out) throw Error("cannot append to " + a.results);
    if (fresh) out << "method,scenario,mask_h,mask_w,seed,mse,ne,runtime_ms\n";
    out << a.method << ',' << a.scenario << ',' << m.region.height << ',' << m.region.width << ','
        << a.seed << ',' << format_double(m.mse) << ',' << format_double(m.ne) << ','
        << format_double(a.runtime_ms) << '\n';
  }
  return kSuccess;
}

// ---------------------------------------------------------------- scene options shared by sweep/genscene

struct SceneArgs {
  Index rows = 120, cols = 160;
  std::string tx;
  double gamma = 2.0;
  double attenuation = 0.1;
  std::string pattern = "stripes";
  double shadow = 0.15;
  double corr_length = 6.0;
  std::vector<std::string> buildings;
  std::uint64_t seed = 1;
};

void add_scene_options(CLI::App* cmd, SceneArgs& s) {
  cmd->add_option("--rows", s.rows, "Grid rows")->capture_default_str();
  cmd->add_option("--cols", s.cols, "Grid cols")->capture_default_str();
  cmd->add_option("--tx", s.tx, "Transmitter row,col (default: 60 rows above the top edge, centred)");
  cmd->add_option("--gamma", s.gamma, "Path-loss exponent")->capture_default_str();
  cmd->add_option("--attenuation", s.attenuation, "Power factor of a fully blocked ray")->capture_default_str();
  cmd->add_option("--pattern", s.pattern, "empty, stripes or blocks")
      ->check(CLI::IsMember({"empty", "stripes", "blocks"}))
      ->capture_default_str();
  cmd->add_option("--building", s.buildings, "Explicit building rect top,left,height,width (repeatable)");
  cmd->add_option("--shadow", s.shadow, "Shadowing amplitude")->capture_default_str();
  cmd->add_option("--corr-length", s.corr_length, "Shadowing correlation length (cells)")->capture_default_str();
  cmd->add_option("--seed", s.seed, "Scene seed")->capture_default_str();
}

SceneSpec to_spec(const SceneArgs& s) {
  SceneSpec spec;
  spec.rows = s.rows;
  spec.cols = s.cols;
  spec.tx = s.tx.empty() ? Vec2(-60.0, static_cast<double>(s.cols) / 2.0) : parse_point(s.tx, "--tx");
  spec.pathloss_exponent = s.gamma;
  spec.attenuation = s.attenuation;
  spec.pattern = parse_building_pattern(s.pattern);
  for (const auto& b : s.buildings) spec.buildings.push_back(parse_rect(b));
  if (!spec.buildings.empty()) spec.pattern = BuildingPattern::Explicit;
  spec.shadow_amplitude = s.shadow;
  spec.correlation_length = s.corr_length;
  spec.seed = s.seed;
  spec.validate();
  return spec;
}

// ---------------------------------------------------------------- genscene

struct GenSceneArgs {
  SceneArgs scene;
  std::string out = "scene";
};

void add_genscene(CLI::App& app, GenSceneArgs& a) {
  auto* cmd = app.add_subcommand("genscene", "Write a synthetic map/obstacle/manifest triple");
  add_scene_options(cmd, a.scene);
  cmd->add_option("--out", a.out, "Output directory")->capture_default_str();
}

int do_genscene(const GenSceneArgs& a) {
  const Scene scene = generate(to_spec(a.scene));
  write_scene(a.out, scene);
  std::cout << "wrote " << a.out << "/{map,obstacles,scene}.csv\n";
  return kSuccess;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  SceneArgs scene;
  std::vector<std::string> methods{"epc", "epd", "ebc", "rbf", "mbi"};
  std::vector<Index> sizes{6, 14, 20, 26, 32};
  int trials = 10;
  int patch_size = 15;
  double beta = 2.0;
  double lambda = 0.01;
  Index dict_size = 500;
  Index train_patches = 2000;
  int ksvd_iters = 15;
  std::string results = "results.csv";
  std::string summary = "summary.csv";
};

void add_sweep(CLI::App& app, SweepArgs& a) {
  auto* cmd = app.add_subcommand("sweep", "Methods x mask sizes x seeded trials on synthetic scenes");
  add_scene_options(cmd, a.scene);
  cmd->add_option("--methods", a.methods, "Methods to run")
      ->check(CLI::IsMember({"epc", "epd", "ebc", "rbf", "mbi"}))
      ->delimiter(',');
  cmd->add_option("--sizes", a.sizes, "Square mask sizes")->delimiter(',');
  cmd->add_option("--trials", a.trials, "Trials per size")->capture_default_str();
  cmd->add_option("--patch-size", a.patch_size, "Odd patch size")->capture_default_str();
  cmd->add_option("--beta", a.beta, "Inverse-distance exponent")->capture_default_str();
  cmd->add_option("--lambda", a.lambda, "Lasso weight")->capture_default_str();
  cmd->add_option("--dict-size", a.dict_size, "Dictionary atoms K")->capture_default_str();
  cmd->add_option("--train-patches", a.train_patches, "Training windows W")->capture_default_str();
  cmd->add_option("--ksvd-iters", a.ksvd_iters, "K-SVD iterations")->capture_default_str();
  cmd->add_option("--results", a.results, "Per-trial results CSV (appended)")->capture_default_str();
  cmd->add_option("--summary", a.summary, "Aggregate CSV")->capture_default_str();
}

int do_sweep(const SweepArgs& a) {
  SweepConfig cfg;
  cfg.scene = to_spec(a.scene);
  cfg.seed = a.scene.seed;
  cfg.trials = a.trials;
  cfg.methods.clear();
  for (const auto& m : a.methods) cfg.methods.push_back(parse_method(m));
  cfg.mask_sizes = a.sizes;
  cfg.method.priority.patch_size = a.patch_size;
  cfg.method.priority.beta = a.beta;
  cfg.method.priority.validate();
  cfg.method.estimator.lambda = a.lambda;
  cfg.method.estimator.dictionary_size = a.dict_size;
  cfg.method.estimator.training_patches = a.train_patches;
  cfg.method.estimator.ksvd_iters = a.ksvd_iters;
  cfg.method.estimator.validate();

  const auto results = run_sweep(cfg, [&](const TrialResult& t) {
    append_result_rows(a.results, std::span<const TrialResult>(&t, 1));
    std::cout << to_string(t.method) << " size=" << t.mask.height << " seed=" << t.seed
              << " mse=" << format_double(t.metrics.mse) << '\n';
  });
  const auto summary = summarize(results);
  write_summary_csv(a.summary, summary);
  for (const auto& s : summary) {
    std::cout << to_string(s.method) << ' ' << s.scenario << ' ' << s.mask_size
              << " mean_mse=" << format_double(s.mean_mse) << " mean_ne=" << format_double(s.mean_ne)
              << '\n';
  }
  return kSuccess;
}

} // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Radio map reconstruction for restricted areas"};
  app.require_subcommand(1);
  ReconstructArgs rec;
  EvaluateArgs ev;
  SweepArgs sw;
  GenSceneArgs gen;
  add_reconstruct(app, rec);
  add_evaluate(app, ev);
  add_sweep(app, sw);
  add_genscene(app, gen);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (app.got_subcommand("reconstruct")) return do_reconstruct(rec);
    if (app.got_subcommand("evaluate")) return do_evaluate(ev);
    if (app.got_subcommand("sweep")) return do_sweep(sw);
    if (app.got_subcommand("genscene")) return do_genscene(gen);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kUsage;
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("radiomap");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

} // namespace radiomap::cli
