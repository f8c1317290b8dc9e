#include "sft/binaural.hpp"

#include <algorithm>
#include <cmath>

#include "sft/errors.hpp"
#include "sft/quadrature.hpp"

namespace sft {
namespace {

constexpr double kCoincident = 1e-12;

cplx green(const Vec3& x, const Vec3& z, double k) {
  const double r = (x - z).norm();
  if (r < kCoincident) throw SingularityError("ear point coincides with a source");
  return std::exp(kI * (k * r)) / (kFourPi * r);
}

// Product rule exact well beyond the band of the ear transfer.
std::shared_ptr<const QuadratureGrid> anchor_grid(int degree) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const QuadratureGrid>> cache;
  std::lock_guard lock(mutex);
  auto& g = cache[degree];
  if (!g) g = std::make_shared<const QuadratureGrid>(gauss_product_grid(degree));
  return g;
}

}  // namespace

cplx ear_transfer_point(const Vec3& source, const Vec3& listener, const Vec3& ear_offset, double k) {
  return green(listener + ear_offset, source, k);
}

cplx ear_transfer_planewave(const Direction& dir, const Vec3& ear_offset, double k) {
  return std::exp(-kI * (k * dir.unit_vector().dot(ear_offset)));
}

BinauralPair auralize_reference(const Scene& scene, const Vec3& listener, double k, const EarGeometry& ears) {
  BinauralPair out;
  for (const auto& s : scene.sources) {
    out.left += ear_transfer_point(s.position, listener, ears.left, k);
    out.right += ear_transfer_point(s.position, listener, ears.right, k);
  }
  return out;
}

AnchorHrtf::AnchorHrtf(const EarGeometry& ears, double k, int order) {
  const double reach = k * std::max(ears.left.norm(), ears.right.norm());
  // Integrand degree: ear transfer band (~k r + margin) plus the order N harmonic.
  const int degree = 2 * std::max(8, static_cast<int>(std::ceil(reach)) + order + 10);
  const auto grid = anchor_grid(degree);
  left_ = CVector::Zero(HarmonicIndex::count(order));
  right_ = CVector::Zero(HarmonicIndex::count(order));
  for (std::size_t q = 0; q < grid->size(); ++q) {
    const Direction& dir = grid->nodes()[q];
    const CVector y = sph_harm_all(order, dir);
    const double w = grid->weights()[q];
    left_ += (w * ear_transfer_planewave(dir, ears.left, k)) * y;
    right_ += (w * ear_transfer_planewave(dir, ears.right, k)) * y;
  }
  for (int n = 0; n <= order; ++n) {
    const cplx scale = ipow(n) / kFourPi;
    for (int m = -n; m <= n; ++m) {
      left_[n * n + n + m] *= scale;
      right_[n * n + n + m] *= scale;
    }
  }
}

BinauralPair AnchorHrtf::apply(const SphericalCoefficients& alpha) const {
  if (alpha.values.size() != left_.size()) throw ArgumentError("anchor HRTF order does not match coefficients");
  return {left_.cwiseProduct(alpha.values).sum(), right_.cwiseProduct(alpha.values).sum()};
}

BinauralPair auralize_anchor(const SphericalCoefficients& alpha, double k, const EarGeometry& ears) {
  return AnchorHrtf(ears, k, alpha.order).apply(alpha);
}

BinauralPair auralize_pw(const DrivingFunction& psi, const Vec3& d, double k, const EarGeometry& ears) {
  if (!psi.distribution || psi.distribution->model() != SourceModel::planewave) {
    throw ModelError("auralize_pw needs a planewave driving function");
  }
  const CVector g = psi.effective_gains();
  const auto& sources = psi.distribution->sources();
  BinauralPair out;
  for (std::size_t l = 0; l < sources.size(); ++l) {
    const auto& s = sources[l];
    const cplx shifted = g[static_cast<Eigen::Index>(l)] * std::exp(-kI * (k * s.unit.dot(d))) / kFourPi;
    out.left += shifted * ear_transfer_planewave(s.direction, ears.left, k);
    out.right += shifted * ear_transfer_planewave(s.direction, ears.right, k);
  }
  return out;
}

BinauralPair auralize_mw(const DrivingFunction& psi, const Vec3& d, double k, const EarGeometry& ears) {
  if (!psi.distribution || psi.distribution->model() != SourceModel::mixedwave) {
    throw ModelError("auralize_mw needs a mixedwave driving function");
  }
  const double near = psi.distribution->near_radius();
  if (!(d.norm() < near)) {
    throw RegionError("listener translation " + std::to_string(d.norm()) + " m is outside the near shell (" +
                      std::to_string(near) + " m)");
  }
  const CVector g = psi.effective_gains();
  const auto& sources = psi.distribution->sources();
  BinauralPair out;
  for (std::size_t l = 0; l < sources.size(); ++l) {
    const auto& s = sources[l];
    const Vec3 y = s.position();
    const cplx norm = g[static_cast<Eigen::Index>(l)] * s.radius * std::exp(-kI * (k * s.radius));
    out.left += norm * green(d + ears.left, y, k);
    out.right += norm * green(d + ears.right, y, k);
  }
  return out;
}

}  // namespace sft
