#include "radiomap/scenegen.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "radiomap/grid_io.hpp"
#include "radiomap/priority.hpp"

namespace radiomap {

std::string to_string(BuildingPattern p) {
  switch (p) {
    case BuildingPattern::Empty: return "empty";
    case BuildingPattern::VerticalStripes: return "stripes";
    case BuildingPattern::CityBlocks: return "blocks";
    case BuildingPattern::Explicit: return "explicit";
  }
  return "unknown";
}

BuildingPattern parse_building_pattern(const std::string& name) {
  if (name == "empty") return BuildingPattern::Empty;
  if (name == "stripes") return BuildingPattern::VerticalStripes;
  if (name == "blocks") return BuildingPattern::CityBlocks;
  if (name == "explicit") return BuildingPattern::Explicit;
  throw Error("unknown building pattern '" + name + "' (expected empty, stripes, blocks)");
}

void SceneSpec::validate() const {
  if (rows < 8 || cols < 8) throw Error("scene: grid must be at least 8x8");
  if (!tx.allFinite()) throw Error("scene: transmitter position must be finite");
  if (!(attenuation > 0.0 && attenuation <= 1.0)) throw Error("scene: attenuation must lie in (0, 1]");
  if (!(shadow_amplitude >= 0.0)) throw Error("scene: shadow amplitude must be >= 0");
  if (!(correlation_length > 0.0)) throw Error("scene: correlation length must be > 0");
  if (!(reference_power > 0.0)) throw Error("scene: reference power must be > 0");
  if (!(pathloss_exponent >= 0.0)) throw Error("scene: path-loss exponent must be >= 0");
  if (!(line_step > 0.0 && line_step <= 1.0)) throw Error("scene: line step must lie in (0, 1]");
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// uniform in [-1, 1] at an integer lattice point
double lattice_value(std::uint64_t seed, std::int64_t i, std::int64_t j) {
  const std::uint64_t h = splitmix(seed ^ splitmix(static_cast<std::uint64_t>(i) * 0x632be59bd9b4e019ULL ^
                                                   static_cast<std::uint64_t>(j)));
  return static_cast<double>(h >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

double noise_at(std::uint64_t seed, double y, double x) {
  const double fy = std::floor(y), fx = std::floor(x);
  const auto iy = static_cast<std::int64_t>(fy), ix = static_cast<std::int64_t>(fx);
  const double ty = smoothstep(y - fy), tx = smoothstep(x - fx);
  const double v00 = lattice_value(seed, iy, ix), v01 = lattice_value(seed, iy, ix + 1);
  const double v10 = lattice_value(seed, iy + 1, ix), v11 = lattice_value(seed, iy + 1, ix + 1);
  const double top = v00 + tx * (v01 - v00);
  const double bottom = v10 + tx * (v11 - v10);
  return top + ty * (bottom - top);
}

Index draw(std::mt19937_64& rng, Index lo, Index hi) {
  return lo + static_cast<Index>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

void paint(Mask& m, Index top, Index left, Index h, Index w) {
  const Index r0 = std::max<Index>(0, top), c0 = std::max<Index>(0, left);
  const Index r1 = std::min(m.rows(), top + h), c1 = std::min(m.cols(), left + w);
  if (r1 > r0 && c1 > c0) m.block(r0, c0, r1 - r0, c1 - c0).setConstant(true);
}

} // namespace

Grid value_noise(Index rows, Index cols, double correlation_length, std::uint64_t seed) {
  Grid g(rows, cols);
  const double inv = 1.0 / correlation_length;
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      const double y = static_cast<double>(r) * inv, x = static_cast<double>(c) * inv;
      // two octaves; the second at half the length scale and half the weight
      g(r, c) = (noise_at(seed, y, x) + 0.5 * noise_at(seed + 7919, 2.0 * y, 2.0 * x)) / 1.5;
    }
  }
  return g;
}

ObstacleMap building_layout(const SceneSpec& spec) {
  ObstacleMap obs = ObstacleMap::empty(spec.rows, spec.cols);
  std::mt19937_64 rng(splitmix(spec.seed ^ 0xb5ad4eceda1ce2a9ULL));
  switch (spec.pattern) {
    case BuildingPattern::Empty: break;
    case BuildingPattern::Explicit:
      for (const auto& b : spec.buildings) paint(obs.cells, b.top, b.left, b.height, b.width);
      break;
    case BuildingPattern::VerticalStripes: {
      // long north-south building rows separated by streets, cut by a few cross streets
      const Index period = 10;
      const Index offset = draw(rng, 0, period - 1);
      const Index cross_period = 40;
      const Index cross_offset = draw(rng, 10, cross_period - 1);
      for (Index c0 = offset - period; c0 < spec.cols; c0 += period) {
        const Index width = draw(rng, 4, 5);
        paint(obs.cells, 0, c0, spec.rows, width);
      }
      for (Index r0 = cross_offset - cross_period; r0 < spec.rows; r0 += cross_period) {
        const Index a = std::max<Index>(0, r0), b = std::min(spec.rows, r0 + 3);
        if (b > a) obs.cells.block(a, 0, b - a, spec.cols).setConstant(false);
      }
      break;
    }
    case BuildingPattern::CityBlocks: {
      // irregular blocks separated by streets, each holding one to three buildings
      Index r0 = draw(rng, -6, 0);
      while (r0 < spec.rows) {
        const Index bh = draw(rng, 14, 24);
        Index c0 = draw(rng, -6, 0);
        while (c0 < spec.cols) {
          const Index bw = draw(rng, 14, 26);
          const Index count = draw(rng, 1, 3);
          for (Index k = 0; k < count; ++k) {
            const Index h = draw(rng, 4, bh - 2);
            const Index w = draw(rng, 4, bw - 2);
            paint(obs.cells, r0 + draw(rng, 0, bh - h), c0 + draw(rng, 0, bw - w), h, w);
          }
          c0 += bw + draw(rng, 3, 5);
        }
        r0 += bh + draw(rng, 3, 5);
      }
      break;
    }
  }
  return obs;
}

Scene generate(const SceneSpec& spec) {
  spec.validate();
  Scene scene;
  scene.spec = spec;
  scene.obstacles = building_layout(spec);
  scene.tx = Transmitter{spec.tx, 0};

  const Grid shadow = spec.shadow_amplitude > 0.0
                          ? value_noise(spec.rows, spec.cols, spec.correlation_length,
                                        splitmix(spec.seed))
                          : Grid::Zero(spec.rows, spec.cols);
  scene.raw.resize(spec.rows, spec.cols);
  for (Index r = 0; r < spec.rows; ++r) {
    for (Index c = 0; c < spec.cols; ++c) {
      const Vec2 cell = CellCoord{r, c}.as_vector();
      const double d = std::max((cell - spec.tx).norm(), 0.5);
      double p = spec.reference_power * std::pow(d, -spec.pathloss_exponent);
      if (spec.attenuation < 1.0) {
        p *= std::pow(spec.attenuation, blocked_fraction(scene.obstacles, spec.tx, cell, spec.line_step));
      }
      p *= std::exp(spec.shadow_amplitude * shadow(r, c));
      scene.raw(r, c) = p;
    }
  }
  scene.map = normalize(scene.raw);
  return scene;
}

void write_scene(const std::filesystem::path& dir, const Scene& scene) {
  std::filesystem::create_directories(dir);
  write_grid_file(dir / "map.csv", scene.map.values);
  write_mask_file(dir / "obstacles.csv", scene.obstacles.cells);
  const auto& s = scene.spec;
  std::ostringstream os;
  os << "key,value\n"
     << "rows," << s.rows << '\n'
     << "cols," << s.cols << '\n'
     << "tx_row," << format_double(s.tx[0]) << '\n'
     << "tx_col," << format_double(s.tx[1]) << '\n'
     << "pathloss_exponent," << format_double(s.pathloss_exponent) << '\n'
     << "reference_power," << format_double(s.reference_power) << '\n'
     << "attenuation," << format_double(s.attenuation) << '\n'
     << "pattern," << to_string(s.pattern) << '\n'
     << "shadow_amplitude," << format_double(s.shadow_amplitude) << '\n'
     << "correlation_length," << format_double(s.correlation_length) << '\n'
     << "seed," << s.seed << '\n'
     << "norm_min," << format_double(scene.map.norm_min) << '\n'
     << "norm_max," << format_double(scene.map.norm_max) << '\n';
  write_text_file(dir / "scene.csv", os.str());
}

Transmitter read_manifest_tx(const std::filesystem::path& manifest) {
  std::istringstream in(read_text_file(manifest));
  std::string line;
  double row = std::nan(""), col = std::nan("");
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    const auto key = line.substr(0, comma);
    const auto value = line.substr(comma + 1);
    if (key == "tx_row") row = std::stod(value);
    if (key == "tx_col") col = std::stod(value);
  }
  if (!std::isfinite(row) || !std::isfinite(col)) {
    throw Error(manifest.string() + ": manifest has no tx_row/tx_col entries");
  }
  return Transmitter{Vec2(row, col), 0};
}

} // namespace radiomap
