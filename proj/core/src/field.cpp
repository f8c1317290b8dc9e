#include "sft/field.hpp"

#include <cmath>
#include <limits>

#include "sft/errors.hpp"
#include "sft/parallel.hpp"
#include "sft/special.hpp"

namespace sft {
namespace {

constexpr double kCoincident = 1e-12;

// Value and gradient of e^{ikr}/(4 pi r), r = |x - z|.
std::pair<cplx, CVec3> green(const Vec3& x, const Vec3& z, double k) {
  const Vec3 diff = x - z;
  const double r = diff.norm();
  if (r < kCoincident) throw SingularityError("evaluation point coincides with a point source");
  const cplx g = std::exp(kI * (k * r)) / (kFourPi * r);
  const cplx radial = g * (kI * k - 1.0 / r);
  return {g, (radial / r) * diff.cast<cplx>()};
}

// Ladder coefficients for gradients of R_nm = j_n(kr) Y_nm.
double a_coef(int n, int m) {
  return std::sqrt(((n + 1.0) * (n + 1.0) - m * m) / ((2.0 * n + 1.0) * (2.0 * n + 3.0)));
}
double c1(int n, int m) { return std::sqrt((n - m + 1.0) * (n - m + 2.0) / ((2.0 * n + 1.0) * (2.0 * n + 3.0))); }
double c2(int n, int m) { return std::sqrt((n + m) * (n + m - 1.0) / ((2.0 * n - 1.0) * (2.0 * n + 1.0))); }
double d1(int n, int m) { return std::sqrt((n + m + 1.0) * (n + m + 2.0) / ((2.0 * n + 1.0) * (2.0 * n + 3.0))); }
double d2(int n, int m) { return std::sqrt((n - m) * (n - m - 1.0) / ((2.0 * n - 1.0) * (2.0 * n + 1.0))); }

}  // namespace

FieldSample FieldSample::from_gradient(const Vec3& x, cplx pressure, const CVec3& gradient, double k) {
  FieldSample s;
  s.position = x;
  s.pressure = pressure;
  s.velocity = gradient / (kI * k);
  for (int i = 0; i < 3; ++i) s.intensity[i] = 0.5 * std::real(pressure * std::conj(s.velocity[i]));
  return s;
}

FieldSample FieldSample::masked_at(const Vec3& x) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  FieldSample s;
  s.position = x;
  s.pressure = {nan, nan};
  s.velocity.setConstant(cplx(nan, nan));
  s.intensity.setConstant(nan);
  s.masked = true;
  return s;
}

TrueField::TrueField(std::vector<Vec3> sources, std::vector<cplx> gains, double k)
    : sources_(std::move(sources)), gains_(std::move(gains)), k_(k) {
  if (sources_.size() != gains_.size()) throw ArgumentError("TrueField: one gain per source required");
  if (!(k > 0.0)) throw ArgumentError("TrueField: wavenumber must be positive");
}

TrueField TrueField::from_scene(const Scene& scene, double k) {
  std::vector<Vec3> positions;
  for (const auto& s : scene.sources) positions.push_back(s.position);
  return {positions, std::vector<cplx>(positions.size(), 1.0), k};
}

FieldSample TrueField::operator()(const Vec3& x) const {
  cplx p{0.0, 0.0};
  CVec3 grad = CVec3::Zero();
  for (std::size_t j = 0; j < sources_.size(); ++j) {
    const auto [g, dg] = green(x, sources_[j], k_);
    p += gains_[j] * g;
    grad += gains_[j] * dg;
  }
  return FieldSample::from_gradient(x, p, grad, k_);
}

TruncatedField::TruncatedField(SphericalCoefficients alpha, double k) : alpha_(std::move(alpha)), k_(k) {
  if (!(k > 0.0)) throw ArgumentError("TruncatedField: wavenumber must be positive");
}

FieldSample TruncatedField::operator()(const Vec3& x) const {
  const int order = alpha_.order;
  const int top = order + 1;
  const double r = x.norm();
  const Direction dir = r > 0.0 ? Direction::from_vector(x) : Direction{};
  const auto j = sph_bessel_j_array(top, k_ * r);
  const CVector y = sph_harm_all(top, dir);
  auto rnm = [&](int n, int m) -> cplx {
    if (n < 0 || std::abs(m) > n) return 0.0;
    return j[n] * y[n * n + n + m];
  };

  cplx p{0.0, 0.0};
  cplx dz{0.0, 0.0};
  cplx dplus{0.0, 0.0};   // (d/dx + i d/dy)
  cplx dminus{0.0, 0.0};  // (d/dx - i d/dy)
  for (int n = 0; n <= order; ++n) {
    for (int m = -n; m <= n; ++m) {
      const cplx a = alpha_.values[n * n + n + m];
      if (a == 0.0) continue;
      p += a * rnm(n, m);
      cplx z = -a_coef(n, m) * rnm(n + 1, m);
      if (n >= 1 && std::abs(m) <= n - 1) z += a_coef(n - 1, m) * rnm(n - 1, m);
      dz += a * z;
      cplx plus = c2(n + 1, m + 1) * rnm(n + 1, m + 1);
      if (n >= 1 && std::abs(m + 1) <= n - 1) plus += c1(n - 1, m + 1) * rnm(n - 1, m + 1);
      dplus += a * plus;
      cplx minus = -d2(n + 1, m - 1) * rnm(n + 1, m - 1);
      if (n >= 1 && std::abs(m - 1) <= n - 1) minus -= d1(n - 1, m - 1) * rnm(n - 1, m - 1);
      dminus += a * minus;
    }
  }
  CVec3 grad;
  grad[0] = 0.5 * k_ * (dplus + dminus);
  grad[1] = k_ * (dplus - dminus) / (2.0 * kI);
  grad[2] = k_ * dz;
  return FieldSample::from_gradient(x, p, grad, k_);
}

DistributionField::DistributionField(const DrivingFunction& psi, double k)
    : distribution_(psi.distribution), gains_(psi.effective_gains()), k_(k) {
  if (!distribution_) throw ArgumentError("driving function has no distribution");
  if (gains_.size() != static_cast<Eigen::Index>(distribution_->size())) {
    throw ArgumentError("driving function length does not match its distribution");
  }
  if (!(k > 0.0)) throw ArgumentError("DistributionField: wavenumber must be positive");
}

FieldSample DistributionField::operator()(const Vec3& x) const {
  cplx p{0.0, 0.0};
  CVec3 grad = CVec3::Zero();
  const auto& sources = distribution_->sources();
  for (std::size_t l = 0; l < sources.size(); ++l) {
    const cplx gain = gains_[static_cast<Eigen::Index>(l)];
    const auto& s = sources[l];
    if (s.far_field()) {
      const cplx term = gain * std::exp(-kI * (k_ * s.unit.dot(x))) / kFourPi;
      p += term;
      grad += (-kI * k_) * term * s.unit.cast<cplx>();
    } else {
      const auto [g, dg] = green(x, s.position(), k_);
      const cplx norm = gain * s.radius * std::exp(-kI * (k_ * s.radius));
      p += norm * g;
      grad += norm * dg;
    }
  }
  return FieldSample::from_gradient(x, p, grad, k_);
}

FieldSample eval_true_field(const Scene& scene, const Vec3& x, double k) { return TrueField::from_scene(scene, k)(x); }

FieldSample eval_truncated_field(const SphericalCoefficients& alpha, const Vec3& x, double k) {
  return TruncatedField(alpha, k)(x);
}

FieldSample eval_distribution_field(const DrivingFunction& psi, const Vec3& x, double k) {
  return DistributionField(psi, k)(x);
}

DrivingFunction translate_pw(const DrivingFunction& psi, const Vec3& d, double k) {
  if (!psi.distribution || psi.distribution->model() != SourceModel::planewave) {
    throw ModelError("translate_pw applies to planewave driving functions only");
  }
  DrivingFunction out = psi;
  const auto& sources = psi.distribution->sources();
  for (std::size_t l = 0; l < sources.size(); ++l) {
    out.gains[static_cast<Eigen::Index>(l)] *= std::exp(-kI * (k * sources[l].unit.dot(d)));
  }
  return out;
}

std::size_t FieldGrid::masked_count() const {
  std::size_t n = 0;
  for (const auto& s : samples) n += s.masked ? 1 : 0;
  return n;
}

std::vector<Vec3> grid_points(const FieldGridSpec& spec, int* columns, int* rows) {
  if (!(spec.width > 0.0) || !(spec.height > 0.0)) throw ArgumentError("field grid has zero area");
  if (!(spec.resolution > 0.0)) throw ArgumentError("field grid resolution must be positive");
  int ua = 0;
  int va = 1;
  if (spec.plane == "xz") {
    va = 2;
  } else if (spec.plane == "yz") {
    ua = 1;
    va = 2;
  } else if (spec.plane != "xy") {
    throw ArgumentError("field grid plane must be xy, xz or yz");
  }
  const int nu = static_cast<int>(std::floor(spec.width / spec.resolution + 1e-9)) + 1;
  const int nv = static_cast<int>(std::floor(spec.height / spec.resolution + 1e-9)) + 1;
  std::vector<Vec3> points;
  points.reserve(static_cast<std::size_t>(nu) * static_cast<std::size_t>(nv));
  for (int iv = 0; iv < nv; ++iv) {
    for (int iu = 0; iu < nu; ++iu) {
      Vec3 p = spec.center;
      p[ua] += -0.5 * spec.width + iu * spec.resolution;
      p[va] += -0.5 * spec.height + iv * spec.resolution;
      points.push_back(p);
    }
  }
  if (columns != nullptr) *columns = nu;
  if (rows != nullptr) *rows = nv;
  return points;
}

FieldSample sample_or_mask(const FieldEvaluator& evaluator, const Vec3& x) {
  try {
    FieldSample s = evaluator(x);
    if (!std::isfinite(s.pressure.real()) || !std::isfinite(s.pressure.imag()) || !s.intensity.allFinite()) {
      return FieldSample::masked_at(x);
    }
    return s;
  } catch (const SingularityError&) {
    return FieldSample::masked_at(x);
  }
}

FieldGrid compute_field_grid(const FieldEvaluator& evaluator, const FieldGridSpec& spec, const std::string& method,
                             double frequency_hz) {
  FieldGrid grid;
  grid.spec = spec;
  grid.method = method;
  grid.frequency_hz = frequency_hz;
  const auto points = grid_points(spec, &grid.columns, &grid.rows);
  grid.samples.resize(points.size());
  parallel_for(points.size(), [&](std::size_t i) { grid.samples[i] = sample_or_mask(evaluator, points[i]); });
  return grid;
}

}  // namespace sft
