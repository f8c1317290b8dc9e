#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "sft/capture.hpp"
#include "sft/expansion.hpp"
#include "sft/harmonics.hpp"
#include "sft/scene.hpp"
#include "sft/types.hpp"

namespace sft {

enum class Ear { left, right };

/// Ear offsets in head coordinates. The head faces +x; the left ear is on +y.
struct EarGeometry {
  Vec3 left{0.0, kDefaultEarOffset, 0.0};
  Vec3 right{0.0, -kDefaultEarOffset, 0.0};

  static EarGeometry symmetric(double offset) { return {{0.0, offset, 0.0}, {0.0, -offset, 0.0}}; }
  [[nodiscard]] const Vec3& offset(Ear ear) const { return ear == Ear::left ? left : right; }
};

struct BinauralPair {
  cplx left{0.0, 0.0};
  cplx right{0.0, 0.0};

  [[nodiscard]] cplx operator[](Ear ear) const { return ear == Ear::left ? left : right; }
};

/// Per-bin ear spectra of one method at one listener position.
struct BinauralSpectrum {
  Method method = Method::reference;
  Vec3 listener = Vec3::Zero();
  std::vector<double> frequencies;
  std::vector<BinauralPair> bins;
};

/// Free-field point-source transfer e^{ik r}/(4 pi r) from `source` to the ear at listener + offset.
cplx ear_transfer_point(const Vec3& source, const Vec3& listener, const Vec3& ear_offset, double k);

/// Free-field planewave transfer e^{-ik y.x_ear} for a wave arriving from `dir`; |H| = 1.
cplx ear_transfer_planewave(const Direction& dir, const Vec3& ear_offset, double k);

/// Ground truth: sum of unit-gain scene sources at the translated ears.
BinauralPair auralize_reference(const Scene& scene, const Vec3& listener, double k, const EarGeometry& ears);

/// Spherical-harmonic coefficients H^{nm} of the planewave ear transfer, so
/// that sum H^{nm} alpha_nm is the ear signal of an order-N recording.
class AnchorHrtf {
 public:
  AnchorHrtf(const EarGeometry& ears, double k, int order);

  [[nodiscard]] const CVector& coefficients(Ear ear) const { return ear == Ear::left ? left_ : right_; }
  [[nodiscard]] BinauralPair apply(const SphericalCoefficients& alpha) const;

 private:
  CVector left_;
  CVector right_;
};

/// Head fixed at the microphone: sum_nm H^{nm} alpha_nm. Independent of any listener position.
BinauralPair auralize_anchor(const SphericalCoefficients& alpha, double k, const EarGeometry& ears);

/// sum_l w_l psi_l e^{-ik y_l.d} H(y_l) / (4 pi) with origin-anchored planewave HRTFs.
BinauralPair auralize_pw(const DrivingFunction& psi, const Vec3& d, double k, const EarGeometry& ears);

/// sum_l w_l psi_l |y_l| e^{-ik|y_l|} G(d + e; y_l). Requires |d| < near-shell radius.
BinauralPair auralize_mw(const DrivingFunction& psi, const Vec3& d, double k, const EarGeometry& ears);

}  // namespace sft
