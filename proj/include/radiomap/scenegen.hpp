#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "radiomap/grid.hpp"

namespace radiomap {

enum class BuildingPattern { Empty, VerticalStripes, CityBlocks, Explicit };

std::string to_string(BuildingPattern p);
BuildingPattern parse_building_pattern(const std::string& name);

/// Parameters of a synthetic scene: log-distance path loss from one transmitter,
/// attenuated by buildings on the ray and modulated by smooth shadowing.
struct SceneSpec {
  Index rows = 120;
  Index cols = 160;
  Vec2 tx{-60.0, 80.0};       ///< (row, col), cells; may be outside the grid
  double pathloss_exponent = 2.0;
  double reference_power = 1.0; ///< watts at unit distance
  double attenuation = 0.1;    ///< power factor for a fully blocked ray, in (0, 1]
  BuildingPattern pattern = BuildingPattern::VerticalStripes;
  std::vector<Rect> buildings;  ///< used when pattern == Explicit
  double shadow_amplitude = 0.15;
  double correlation_length = 6.0; ///< cells
  double line_step = 0.25;
  std::uint64_t seed = 1;

  void validate() const;
};

struct Scene {
  SceneSpec spec;
  Grid raw; ///< watts
  RadioMap map;
  ObstacleMap obstacles;
  Transmitter tx;
};

/// Building cells for the spec's layout (deterministic under the seed).
ObstacleMap building_layout(const SceneSpec& spec);

/// Smooth lattice value noise in [-1, 1] with the given correlation length.
Grid value_noise(Index rows, Index cols, double correlation_length, std::uint64_t seed);

Scene generate(const SceneSpec& spec);

/// Writes <dir>/map.csv, <dir>/obstacles.csv and <dir>/scene.csv (key,value manifest).
void write_scene(const std::filesystem::path& dir, const Scene& scene);

/// Transmitter position recorded in a scene manifest.
Transmitter read_manifest_tx(const std::filesystem::path& manifest);

} // namespace radiomap
