#pragma once

#include <memory>
#include <vector>

#include "sft/quadrature.hpp"
#include "sft/scene.hpp"
#include "sft/types.hpp"

namespace sft {

/// Interior-field coefficients alpha_nm about the origin for one wavenumber.
struct SphericalCoefficients {
  int order = 0;
  CVector values;
  /// Set when some b_n fell below the regularisation floor during estimation.
  bool ill_conditioned = false;

  SphericalCoefficients() = default;
  SphericalCoefficients(int max_order, CVector coefficients);
  static SphericalCoefficients zeros(int max_order);

  [[nodiscard]] cplx operator()(int n, int m) const { return values[n * n + n + m]; }
  /// Copy limited to orders <= max_order (zero-padded if larger).
  [[nodiscard]] SphericalCoefficients truncated(int max_order) const;
};

/// alpha_nm = i k h_n(k|z|) Y*_nm(z_hat) s for a point source at z.
SphericalCoefficients analytic_source_coefficients(const Vec3& source, double k, int max_order, cplx gain = 1.0);

/// Relative floor on |b_n| below which the inversion is regularised.
inline constexpr double kBaffleFloor = 1e-5;

/// Rigid-sphere array model: forward simulation and the quadrature-based
/// coefficient estimate. Holds precomputed harmonic bases for the sensor grid.
class MicrophoneArray {
 public:
  explicit MicrophoneArray(const MicrophoneSpec& spec);

  [[nodiscard]] const MicrophoneSpec& spec() const { return spec_; }
  [[nodiscard]] std::size_t sensor_count() const { return grid_->size(); }

  /// P(x_q) = sum_{n <= alpha.order} alpha_nm b_n(ka) Y_nm(x_q).
  [[nodiscard]] CVector simulate(const SphericalCoefficients& alpha, double k) const;
  /// alpha_nm ~ sum_q w_q P(x_q) Y*_nm(x_q) / b_n(ka), orders <= spec.order.
  [[nodiscard]] SphericalCoefficients estimate(const CVector& pressures, double k) const;

 private:
  [[nodiscard]] const CMatrix& basis_for(int order) const;

  MicrophoneSpec spec_;
  std::shared_ptr<const QuadratureGrid> grid_;
  HarmonicTransform transform_;
  CMatrix simulation_basis_;
};

CVector simulate_sensor_pressures(const SphericalCoefficients& alpha_true, const MicrophoneSpec& mic, double k);
SphericalCoefficients estimate_coefficients(const CVector& pressures, const MicrophoneSpec& mic, double k);

/// Recording of all scene sources (unit gain) at one frequency: analytic field
/// to simulation_order, sampled on the array, then estimated to order N.
SphericalCoefficients record_scene(const Scene& scene, const MicrophoneArray& array, double hz);

/// Per-frame, per-bin recording of time-domain source signals.
struct CoefficientFrames {
  int order = 0;
  double sample_rate = 0.0;
  int frame_size = 0;
  int hop_size = 0;
  /// frames[f][bin]
  std::vector<std::vector<SphericalCoefficients>> frames;
};

/// Capture through the block STFT. `signals` holds one mono signal per scene source.
CoefficientFrames capture_stft(const Scene& scene, const std::vector<std::vector<double>>& signals);

}  // namespace sft
