#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sft/quadrature.hpp"
#include "sft/types.hpp"

namespace sft {

inline constexpr int kSceneSchemaVersion = 1;
inline constexpr double kDefaultSpeedOfSound = 343.0;
inline constexpr double kDefaultSampleRate = 16000.0;
inline constexpr int kDefaultFrameSize = 4096;
inline constexpr int kDefaultHopSize = 2048;
inline constexpr double kDefaultEarOffset = 0.09;

/// Reference to a quadrature grid: a bundled `fliege_<Q>` name or a CSV file.
struct GridRef {
  std::string name;               // "fliege_36" or empty
  std::filesystem::path file;     // set when loaded from a user CSV
  std::shared_ptr<const QuadratureGrid> grid;

  bool operator==(const GridRef& other) const { return name == other.name && file == other.file; }
};

struct PointSourceSpec {
  Vec3 position = Vec3::Zero();
  /// Mono sample file; empty means unit gain in every bin.
  std::filesystem::path signal_file;

  bool operator==(const PointSourceSpec& other) const {
    return position == other.position && signal_file == other.signal_file;
  }
};

struct MicrophoneSpec {
  int order = 4;
  double radius = 0.042;
  GridRef sensor_grid;
  /// Order of the simulated physical field hitting the array.
  int simulation_order = 12;
  /// Usable band (Hz); analysis frequencies must fall inside it.
  double band_min_hz = 0.0;
  double band_max_hz = 0.0;

  bool operator==(const MicrophoneSpec&) const = default;
};

enum class SourceModel { planewave, mixedwave };

struct DistributionSpec {
  SourceModel model = SourceModel::planewave;
  GridRef direction_grid;
  /// Empty for planewave, {R_nf, R_ff} for mixedwave.
  std::vector<double> radii;

  bool operator==(const DistributionSpec&) const = default;
};

struct FieldGridSpec {
  std::string plane = "xy";
  Vec3 center = Vec3::Zero();
  double width = 2.0;
  double height = 2.0;
  double resolution = 0.02;

  bool operator==(const FieldGridSpec& other) const {
    return plane == other.plane && center == other.center && width == other.width && height == other.height &&
           resolution == other.resolution;
  }
};

struct AnalysisSpec {
  std::vector<double> frequencies;
  std::vector<Vec3> listener_positions;
  FieldGridSpec field_grid;
  std::vector<double> sphere_radii;
  int sphere_points = 100;
  double band_min_hz = 100.0;
  double band_max_hz = 8000.0;
  int band_count = 50;
  double band_radius = 0.8;

  bool operator==(const AnalysisSpec&) const = default;
};

struct IrlsSettings {
  double p = 1.0;
  int max_iterations = 100;

  bool operator==(const IrlsSettings&) const = default;
};

/// Full experiment description. Immutable after load.
struct Scene {
  int schema_version = kSceneSchemaVersion;
  double speed_of_sound = kDefaultSpeedOfSound;
  double sample_rate = kDefaultSampleRate;
  int frame_size = kDefaultFrameSize;
  int hop_size = kDefaultHopSize;
  std::vector<PointSourceSpec> sources;
  MicrophoneSpec microphone;
  std::optional<DistributionSpec> planewave;
  std::optional<DistributionSpec> mixedwave;
  double ear_offset = kDefaultEarOffset;
  AnalysisSpec analysis;
  IrlsSettings irls;
  /// Directory of the scene file; relative paths resolve against it.
  std::filesystem::path base_dir;

  bool operator==(const Scene& other) const;

  [[nodiscard]] double wavenumber(double hz) const { return 2.0 * kPi * hz / speed_of_sound; }
  [[nodiscard]] const DistributionSpec& distribution(SourceModel model) const;
};

/// Parses and validates a scene file. Throws ParseError or ValidationError;
/// validation messages begin with the offending field path.
Scene load_scene(const std::filesystem::path& path);
Scene parse_scene(const std::string& json_text, const std::filesystem::path& base_dir = {});
/// Re-checks every invariant. Called by the loaders.
void validate_scene(const Scene& scene);

std::string serialize_scene(const Scene& scene);
void save_scene(const Scene& scene, const std::filesystem::path& path);

}  // namespace sft
