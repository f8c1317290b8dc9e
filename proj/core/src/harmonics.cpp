#include "sft/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sft/errors.hpp"

namespace sft {

Direction Direction::normalized() const {
  double t = std::fmod(theta, 2.0 * kPi);
  double p = phi;
  if (t < 0.0) t += 2.0 * kPi;
  if (t > kPi) {
    t = 2.0 * kPi - t;
    p += kPi;
  }
  p = std::fmod(p, 2.0 * kPi);
  if (p < 0.0) p += 2.0 * kPi;
  if (p >= 2.0 * kPi) p = 0.0;
  return {t, p};
}

Vec3 Direction::unit_vector() const {
  const double s = std::sin(theta);
  return {s * std::cos(phi), s * std::sin(phi), std::cos(theta)};
}

Direction Direction::from_vector(const Vec3& v) {
  const double r = v.norm();
  if (r == 0.0) throw ArgumentError("direction of a zero vector is undefined");
  const double c = std::clamp(v.z() / r, -1.0, 1.0);
  double p = std::atan2(v.y(), v.x());
  if (p < 0.0) p += 2.0 * kPi;
  if (p >= 2.0 * kPi) p = 0.0;
  return {std::acos(c), p};
}

HarmonicIndex HarmonicIndex::from_flat(int index) {
  if (index < 0) throw ArgumentError("negative harmonic index");
  int n = static_cast<int>(std::sqrt(static_cast<double>(index)));
  while (n * n > index) --n;
  while ((n + 1) * (n + 1) <= index) ++n;
  return {n, index - n * n - n};
}

namespace {

// Orthonormalised associated Legendre values p[n][m] = N_nm P_n^m(cos theta),
// m >= 0, Condon-Shortley phase included.
std::vector<double> legendre_table(int max_order, double theta) {
  const int size = max_order + 1;
  std::vector<double> p(static_cast<std::size_t>(size * size), 0.0);
  auto at = [&](int n, int m) -> double& { return p[static_cast<std::size_t>(n * size + m)]; };
  const double x = std::cos(theta);
  const double s = std::sin(theta);
  at(0, 0) = 1.0 / std::sqrt(kFourPi);
  for (int m = 1; m <= max_order; ++m) {
    at(m, m) = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * at(m - 1, m - 1);
  }
  for (int m = 0; m < max_order; ++m) {
    at(m + 1, m) = std::sqrt(2.0 * m + 3.0) * x * at(m, m);
  }
  for (int m = 0; m <= max_order; ++m) {
    for (int n = m + 2; n <= max_order; ++n) {
      const double nn = n, mm = m;
      const double a = std::sqrt((4.0 * nn * nn - 1.0) / (nn * nn - mm * mm));
      const double b = std::sqrt(((nn - 1.0) * (nn - 1.0) - mm * mm) / (4.0 * (nn - 1.0) * (nn - 1.0) - 1.0));
      at(n, m) = a * (x * at(n - 1, m) - b * at(n - 2, m));
    }
  }
  return p;
}

}  // namespace

cplx sph_harm(int n, int m, const Direction& dir) {
  if (n < 0 || std::abs(m) > n) {
    throw ArgumentError("sph_harm: invalid (n, m) = (" + std::to_string(n) + ", " + std::to_string(m) + ")");
  }
  const auto p = legendre_table(n, dir.theta);
  const int am = std::abs(m);
  const cplx positive = p[static_cast<std::size_t>(n * (n + 1) + am)] * std::polar(1.0, am * dir.phi);
  if (m >= 0) return positive;
  return (am % 2 == 0 ? 1.0 : -1.0) * std::conj(positive);
}

CVector sph_harm_all(int max_order, const Direction& dir) {
  if (max_order < 0) throw ArgumentError("sph_harm_all: max_order must be >= 0");
  const int size = max_order + 1;
  const auto p = legendre_table(max_order, dir.theta);
  CVector y(HarmonicIndex::count(max_order));
  std::vector<cplx> phase(static_cast<std::size_t>(size));
  for (int m = 0; m <= max_order; ++m) phase[m] = std::polar(1.0, m * dir.phi);
  for (int n = 0; n <= max_order; ++n) {
    for (int m = 0; m <= n; ++m) {
      const cplx v = p[static_cast<std::size_t>(n * size + m)] * phase[m];
      y[n * n + n + m] = v;
      if (m > 0) y[n * n + n - m] = (m % 2 == 0 ? 1.0 : -1.0) * std::conj(v);
    }
  }
  return y;
}

}  // namespace sft
