#pragma once

#include "sft/types.hpp"

namespace sft {

/// Direction on the unit sphere. `theta` is measured down from +z, `phi`
/// counter-clockwise from +x.
struct Direction {
  double theta = 0.0;
  double phi = 0.0;

  /// Wraps phi into [0, 2pi) and folds theta into [0, pi].
  [[nodiscard]] Direction normalized() const;
  [[nodiscard]] Vec3 unit_vector() const;

  /// Direction of a nonzero vector.
  static Direction from_vector(const Vec3& v);
};

/// (n, m) pair with flat index n^2 + n + m.
struct HarmonicIndex {
  int n = 0;
  int m = 0;

  [[nodiscard]] constexpr int flat() const { return n * n + n + m; }
  static HarmonicIndex from_flat(int index);
  /// (N+1)^2
  static constexpr int count(int max_order) { return (max_order + 1) * (max_order + 1); }
};

/// Orthonormal complex spherical harmonic with Condon-Shortley phase.
/// Throws ArgumentError for n < 0 or |m| > n.
cplx sph_harm(int n, int m, const Direction& dir);

/// All Y_nm(dir) for n <= max_order, indexed by HarmonicIndex::flat().
CVector sph_harm_all(int max_order, const Direction& dir);

}  // namespace sft
