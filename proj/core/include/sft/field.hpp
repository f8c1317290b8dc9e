#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sft/capture.hpp"
#include "sft/expansion.hpp"
#include "sft/scene.hpp"
#include "sft/types.hpp"

namespace sft {

/// Pressure, particle velocity (rho*c = 1) and active intensity at a point.
struct FieldSample {
  Vec3 position = Vec3::Zero();
  cplx pressure{0.0, 0.0};
  CVec3 velocity = CVec3::Zero();
  Vec3 intensity = Vec3::Zero();
  /// Evaluation hit a singularity; values are NaN.
  bool masked = false;

  /// V = grad P / (i k), I = Re(P conj(V)) / 2.
  static FieldSample from_gradient(const Vec3& x, cplx pressure, const CVec3& gradient, double k);
  static FieldSample masked_at(const Vec3& x);
};

/// Something that can be sampled at a fixed wavenumber.
class FieldEvaluator {
 public:
  virtual ~FieldEvaluator() = default;
  [[nodiscard]] virtual FieldSample operator()(const Vec3& x) const = 0;
  [[nodiscard]] virtual double wavenumber() const = 0;
};

/// Superposition of free-field point sources s_j e^{ik|x-z_j|} / (4 pi |x-z_j|).
class TrueField final : public FieldEvaluator {
 public:
  TrueField(std::vector<Vec3> sources, std::vector<cplx> gains, double k);
  /// Unit-gain sources of a scene.
  static TrueField from_scene(const Scene& scene, double k);

  [[nodiscard]] FieldSample operator()(const Vec3& x) const override;
  [[nodiscard]] double wavenumber() const override { return k_; }

 private:
  std::vector<Vec3> sources_;
  std::vector<cplx> gains_;
  double k_;
};

/// Order-N interior expansion sum alpha_nm j_n(kr) Y_nm(x_hat) with analytic modal gradient.
class TruncatedField final : public FieldEvaluator {
 public:
  TruncatedField(SphericalCoefficients alpha, double k);

  [[nodiscard]] FieldSample operator()(const Vec3& x) const override;
  [[nodiscard]] double wavenumber() const override { return k_; }

 private:
  SphericalCoefficients alpha_;
  double k_;
};

/// Field radiated by a driven virtual distribution: planewave kernel
/// e^{-ik y.x}/(4 pi), mixedwave kernel |y| e^{-ik|y|} e^{ik|x-y|}/(4 pi |x-y|).
class DistributionField final : public FieldEvaluator {
 public:
  DistributionField(const DrivingFunction& psi, double k);

  [[nodiscard]] FieldSample operator()(const Vec3& x) const override;
  [[nodiscard]] double wavenumber() const override { return k_; }

 private:
  std::shared_ptr<const VirtualDistribution> distribution_;
  CVector gains_;
  double k_;
};

/// Closure-backed evaluator (tests, constant fields).
class FunctionField final : public FieldEvaluator {
 public:
  using Fn = std::function<FieldSample(const Vec3&)>;
  FunctionField(Fn fn, double k) : fn_(std::move(fn)), k_(k) {}
  [[nodiscard]] FieldSample operator()(const Vec3& x) const override { return fn_(x); }
  [[nodiscard]] double wavenumber() const override { return k_; }

 private:
  Fn fn_;
  double k_;
};

FieldSample eval_true_field(const Scene& scene, const Vec3& x, double k);
FieldSample eval_truncated_field(const SphericalCoefficients& alpha, const Vec3& x, double k);
FieldSample eval_distribution_field(const DrivingFunction& psi, const Vec3& x, double k);

/// psi_l(d) = psi_l(o) e^{-ik y_l.d}. Planewave distributions only.
DrivingFunction translate_pw(const DrivingFunction& psi, const Vec3& d, double k);

/// Dense planar sampling of an evaluator.
struct FieldGrid {
  FieldGridSpec spec;
  int columns = 0;  // along the first plane axis
  int rows = 0;     // along the second plane axis
  std::vector<FieldSample> samples;  // row-major: rows outer
  std::string method;
  double frequency_hz = 0.0;

  [[nodiscard]] std::size_t masked_count() const;
};

/// Node positions of a grid spec, row-major. Throws ArgumentError for zero area.
std::vector<Vec3> grid_points(const FieldGridSpec& spec, int* columns = nullptr, int* rows = nullptr);

/// Singular samples are masked, not fatal.
FieldGrid compute_field_grid(const FieldEvaluator& evaluator, const FieldGridSpec& spec, const std::string& method,
                             double frequency_hz);

/// Evaluates with SingularityError mapped to a masked sample.
FieldSample sample_or_mask(const FieldEvaluator& evaluator, const Vec3& x);

}  // namespace sft
