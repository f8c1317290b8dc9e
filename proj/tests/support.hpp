#pragma once

#include <cmath>
#include <filesystem>
#include <random>

#include "sft/scene.hpp"
#include "sft/types.hpp"

namespace sft::test {

inline std::filesystem::path scene_dir() { return SFT_SCENE_DIR; }

/// Geometry of the reference experiment: source at (1,0,0) m, 4th-order 36-sensor
/// rigid array of radius 4.2 cm, 36 virtual directions, shells at 2 m and 20 m.
inline Scene reference_scene() { return load_scene(scene_dir() / "reference_scene.json"); }

inline double rel_error(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

template <typename V>
double rel_error(const V& a, const V& b) {
  return (a - b).norm() / b.norm();
}

/// Fixed-seed generator so failures are reproducible.
inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240917);
  return gen;
}

inline Vec3 random_point(double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec3 v;
  do {
    v = {u(rng()), u(rng()), u(rng())};
  } while (v.norm() > 1.0 || v.norm() < 1e-3);
  return radius * v;
}

inline CVector random_coefficients(int order) {
  std::normal_distribution<double> g;
  CVector c(HarmonicIndex::count(order));
  for (auto& v : c) v = {g(rng()), g(rng())};
  return c;
}

}  // namespace sft::test
