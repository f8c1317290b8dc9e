#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Core>

namespace sft {

using cplx = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kFourPi = 4.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

/// Wavenumber for frequency `hz` at speed of sound `c`.
inline double wavenumber(double hz, double c) { return 2.0 * kPi * hz / c; }

/// i^n for integer n (n may be negative).
inline cplx ipow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0:
      return {1.0, 0.0};
    case 1:
      return {0.0, 1.0};
    case 2:
      return {-1.0, 0.0};
    default:
      return {0.0, -1.0};
  }
}

}  // namespace sft
