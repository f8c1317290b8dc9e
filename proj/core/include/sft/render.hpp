#pragma once

#include <filesystem>
#include <vector>

#include "sft/expansion.hpp"
#include "sft/pipeline.hpp"
#include "sft/stft.hpp"
#include "sft/types.hpp"

namespace sft {

struct AudioBuffer {
  double sample_rate = 0.0;
  /// channels[c][i]
  std::vector<std::vector<double>> channels;

  [[nodiscard]] std::size_t frames() const { return channels.empty() ? 0 : channels.front().size(); }
};

/// Reads PCM int16 or IEEE float32 WAV files.
AudioBuffer read_wav(const std::filesystem::path& path);
/// Writes IEEE float32 WAV; no normalisation.
void write_wav(const std::filesystem::path& path, const AudioBuffer& audio);

struct TrajectoryPoint {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
};

/// Listener path, linearly interpolated and held at its end points.
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::vector<TrajectoryPoint> points);
  static Trajectory stationary(const Vec3& position);
  /// CSV with header `t_sec,x,y,z`, strictly increasing times.
  static Trajectory load_csv(const std::filesystem::path& path);
  void save_csv(const std::filesystem::path& path) const;

  [[nodiscard]] Vec3 position_at(double t) const;
  [[nodiscard]] const std::vector<TrajectoryPoint>& points() const { return points_; }

 private:
  std::vector<TrajectoryPoint> points_;
};

/// Straight line from `from` to `to` over `duration` seconds with `steps` segments.
Trajectory linear_trajectory(const Vec3& from, const Vec3& to, double duration, int steps);

/// Per-bin chain for a method, computed once for a static scene.
class BinTransfers {
 public:
  BinTransfers(const Pipeline& pipeline, Method method, const Stft& stft);

  [[nodiscard]] Method method() const { return method_; }
  /// Ear transfers of every bin at listener position d. DC is zero for every method but the reference.
  [[nodiscard]] std::vector<BinauralPair> at(const Vec3& d) const;

 private:
  const Pipeline* pipeline_;
  Method method_;
  std::vector<std::optional<PreparedMethod>> bins_;
};

/// Block-STFT rendering of `source` (driving every scene source) for a listener
/// moving along `trajectory`. The listener is held fixed within each frame at
/// the trajectory position of the frame centre. Returns stereo (left, right).
AudioBuffer render_trajectory(const Pipeline& pipeline, Method method, const Trajectory& trajectory,
                              const std::vector<double>& source);

}  // namespace sft
