#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "sft/binaural.hpp"
#include "sft/capture.hpp"
#include "sft/expansion.hpp"
#include "sft/field.hpp"
#include "sft/scene.hpp"

namespace sft {

/// A method's frequency-dependent state, ready to be evaluated at any listener position.
struct PreparedMethod {
  Method method = Method::reference;
  double frequency_hz = 0.0;
  double k = 0.0;
  SphericalCoefficients recorded;
  std::optional<DrivingFunction> driving;
  std::optional<BinauralPair> anchor;

  /// Ear signals for a listener translated by d (unit-gain sources).
  [[nodiscard]] BinauralPair auralize(const Scene& scene, const Vec3& d, const EarGeometry& ears) const;
};

/// Scene-level plumbing shared by the CLI, tests and the render engine.
class Pipeline {
 public:
  explicit Pipeline(Scene scene);

  [[nodiscard]] const Scene& scene() const { return scene_; }
  [[nodiscard]] const MicrophoneArray& array() const { return array_; }
  [[nodiscard]] EarGeometry ears() const { return EarGeometry::symmetric(scene_.ear_offset); }
  [[nodiscard]] IrlsOptions irls_options() const;
  /// Throws ModelError when the scene has no distribution of that model.
  [[nodiscard]] std::shared_ptr<const VirtualDistribution> distribution(SourceModel model) const;

  /// Estimated order-N coefficients of the unit-gain scene at `hz`.
  [[nodiscard]] SphericalCoefficients record(double hz) const;
  /// Driving function for an expansion method.
  [[nodiscard]] DrivingFunction expand(Method method, const SphericalCoefficients& alpha, double hz) const;
  [[nodiscard]] PreparedMethod prepare(Method method, double hz) const;
  /// Field of a method: reference = true field, anchor = truncated recording,
  /// expansions = distribution field.
  [[nodiscard]] std::unique_ptr<FieldEvaluator> evaluator(const PreparedMethod& prepared) const;

 private:
  Scene scene_;
  MicrophoneArray array_;
  std::shared_ptr<const VirtualDistribution> planewave_;
  std::shared_ptr<const VirtualDistribution> mixedwave_;
};

/// Direct per-bin transfer of a method chain at listener position d.
BinauralSpectrum compute_brir(Method method, const Pipeline& pipeline, const Vec3& d,
                              const std::vector<double>& frequencies);

/// n log-spaced frequencies from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, int n);

}  // namespace sft
