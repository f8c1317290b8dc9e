#include <gtest/gtest.h>

#include <cmath>

#include "sft/errors.hpp"
#include "sft/field.hpp"
#include "sft/metrics.hpp"
#include "sft/parallel.hpp"
#include "sft/pipeline.hpp"
#include "sft/special.hpp"
#include "support.hpp"

using namespace sft;

namespace {

// Central-difference velocity grad P / (i k), h = 1e-4 m.
CVec3 fd_velocity(const FieldEvaluator& f, const Vec3& x) {
  constexpr double h = 1e-4;
  CVec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = h;
    g[i] = (f(x + e).pressure - f(x - e).pressure) / (2.0 * h);
  }
  return g / (kI * f.wavenumber());
}

void expect_velocity_matches_fd(const FieldEvaluator& f, const Vec3& x) {
  const CVec3 fd = fd_velocity(f, x);
  const CVec3 v = f(x).velocity;
  EXPECT_LT((v - fd).norm() / fd.norm(), 1e-5) << "x = " << x.transpose();
}

}  // namespace

TEST(TrueField, VelocityMatchesFiniteDifference) {
  const TrueField f({{1.0, 0.0, 0.0}, {-0.3, 0.8, 0.2}}, {1.0, cplx(0.2, -0.7)}, wavenumber(700.0, 343.0));
  for (int i = 0; i < 10; ++i) expect_velocity_matches_fd(f, test::random_point(0.6));
}

TEST(TrueField, IntensityPointsAwayFromSource) {
  const Vec3 z(1.0, 0.0, 0.0);
  const TrueField f({z}, {1.0}, wavenumber(1000.0, 343.0));
  for (int i = 0; i < 10; ++i) {
    const Vec3 x = test::random_point(0.5);
    const auto s = f(x);
    EXPECT_GT(s.intensity.normalized().dot((x - z).normalized()), 0.999999);
  }
}

TEST(TrueField, SingularPointIsMaskedOnGrid) {
  const TrueField f({{0.0, 0.0, 0.0}}, {1.0}, 10.0);
  EXPECT_THROW(f(Vec3::Zero()), SingularityError);
  const auto s = sample_or_mask(f, Vec3::Zero());
  EXPECT_TRUE(s.masked);
  EXPECT_TRUE(std::isnan(s.pressure.real()));
}

TEST(TruncatedField, VelocityMatchesFiniteDifference) {
  const double k = wavenumber(1200.0, 343.0);
  const SphericalCoefficients alpha(6, test::random_coefficients(6));
  const TruncatedField f(alpha, k);
  for (int i = 0; i < 15; ++i) expect_velocity_matches_fd(f, test::random_point(0.4));
  expect_velocity_matches_fd(f, Vec3(0.0, 0.0, 0.3));
  expect_velocity_matches_fd(f, Vec3(0.0, 0.0, -0.2));
}

TEST(TruncatedField, GradientAtOriginFromFirstOrderOnly) {
  const double k = 5.0;
  const SphericalCoefficients alpha(3, test::random_coefficients(3));
  const TruncatedField f(alpha, k);
  const CVec3 fd = fd_velocity(f, Vec3::Zero());
  EXPECT_LT((f(Vec3::Zero()).velocity - fd).norm() / fd.norm(), 1e-5);
}

TEST(TruncatedField, ConvergesToPointSource) {
  const Vec3 z(1.0, 0.0, 0.0);
  const double k = wavenumber(1000.0, 343.0);
  const TruncatedField f(analytic_source_coefficients(z, k, 40), k);
  const TrueField truth({z}, {1.0}, k);
  for (int i = 0; i < 10; ++i) {
    const Vec3 x = test::random_point(0.3);
    EXPECT_LT(test::rel_error(f(x).pressure, truth(x).pressure), 1e-8);
    EXPECT_LT((f(x).velocity - truth(x).velocity).norm() / truth(x).velocity.norm(), 1e-8);
  }
}

TEST(TruncatedField, PlaneWaveMatchesDirectSeries) {
  const double k = 12.0;
  const Direction y{0.9, 2.0};
  const int order = 4;
  CVector c(HarmonicIndex::count(order));
  const CVector yy = sph_harm_all(order, y);
  for (int n = 0; n <= order; ++n) {
    for (int m = -n; m <= n; ++m) c[n * n + n + m] = ipow(-n) * std::conj(yy[n * n + n + m]);
  }
  const TruncatedField f(SphericalCoefficients(order, c), k);
  for (int i = 0; i < 10; ++i) {
    const Vec3 x = test::random_point(0.5);
    const auto j = sph_bessel_j_array(order, k * x.norm());
    const CVector yx = sph_harm_all(order, Direction::from_vector(x));
    cplx sum{0.0, 0.0};
    for (int n = 0; n <= order; ++n) {
      for (int m = -n; m <= n; ++m) sum += c[n * n + n + m] * j[n] * yx[n * n + n + m];
    }
    EXPECT_LT(std::abs(f(x).pressure - sum), 1e-10 * std::abs(sum) + 1e-15);
  }
}

TEST(DistributionField, VelocityMatchesFiniteDifference) {
  const Pipeline p(test::reference_scene());
  const double hz = 800.0;
  const double k = p.scene().wavenumber(hz);
  const auto alpha = p.record(hz);
  for (Method m : {Method::pw_cf, Method::mw_cf}) {
    const DistributionField f(p.expand(m, alpha, hz), k);
    for (int i = 0; i < 8; ++i) expect_velocity_matches_fd(f, test::random_point(1.0));
  }
}

TEST(DistributionField, MixedwaveClosedFormMatchesRecordingAtOrigin) {
  const Pipeline p(test::reference_scene());
  const double hz = 1000.0;
  const double k = p.scene().wavenumber(hz);
  const auto alpha = p.record(hz);
  const DistributionField mw(p.expand(Method::mw_cf, alpha, hz), k);
  const TruncatedField rec(alpha, k);
  EXPECT_LT(test::rel_error(mw(Vec3::Zero()).pressure, rec(Vec3::Zero()).pressure), 1e-6);
}

TEST(DistributionField, RecordingSweetSpot) {
  // Order-4 recording of the source at (1,0,0) m, 1 kHz: accurate inside the array, not beyond.
  const Pipeline p(test::reference_scene());
  const double hz = 1000.0;
  const double k = p.scene().wavenumber(hz);
  const auto alpha = p.record(hz);
  const TrueField truth = TrueField::from_scene(p.scene(), k);
  const TruncatedField rec(alpha, k);
  const double inside = sphere_average(Metric::pe, 0.04, truth, rec).value;
  const double outside = sphere_average(Metric::pe, 0.5, truth, rec).value;
  EXPECT_LT(inside, 5.0);
  EXPECT_GT(outside, inside);

  const DistributionField pw(p.expand(Method::pw_cf, alpha, hz), k);
  EXPECT_LT(sphere_average(Metric::pe, 0.042, truth, pw).value, 10.0);
  EXPECT_GT(sphere_average(Metric::pe, 0.5, truth, pw).value, 50.0);
}

TEST(TranslatePw, PhaseShiftEqualsFieldTranslation) {
  const Pipeline p(test::reference_scene());
  const double hz = 1500.0;
  const double k = p.scene().wavenumber(hz);
  const auto psi = p.expand(Method::pw_cf, p.record(hz), hz);
  const Vec3 d(0.1, -0.3, 0.05);
  const DistributionField moved(translate_pw(psi, d, k), k);
  const DistributionField original(psi, k);
  for (int i = 0; i < 10; ++i) {
    const Vec3 x = test::random_point(0.5);
    EXPECT_LT(test::rel_error(moved(x).pressure, original(x + d).pressure), 1e-12);
  }
}

TEST(TranslatePw, RejectsMixedwave) {
  const Pipeline p(test::reference_scene());
  const auto psi = p.expand(Method::mw_cf, p.record(500.0), 500.0);
  EXPECT_THROW(translate_pw(psi, Vec3(0.1, 0.0, 0.0), 1.0), ModelError);
}

TEST(FieldGrid, DefaultGridShapeAndMasking) {
  FieldGridSpec spec;
  int cols = 0;
  int rows = 0;
  const auto pts = grid_points(spec, &cols, &rows);
  EXPECT_EQ(cols, 101);
  EXPECT_EQ(rows, 101);
  EXPECT_EQ(pts.size(), 101u * 101u);
  EXPECT_NEAR(pts.front().x(), -1.0, 1e-12);
  EXPECT_NEAR(pts.back().y(), 1.0, 1e-12);

  // The source sits exactly on a node: that sample is masked, the rest are finite.
  const TrueField f({{0.5, 0.0, 0.0}}, {1.0}, 10.0);
  const auto g = compute_field_grid(f, spec, "reference", 1000.0);
  EXPECT_EQ(g.masked_count(), 1u);
  EXPECT_EQ(g.samples.size(), pts.size());
}

TEST(FieldGrid, ZeroAreaAndBadPlaneRejected) {
  FieldGridSpec spec;
  spec.width = 0.0;
  EXPECT_THROW(grid_points(spec), ArgumentError);
  spec.width = 1.0;
  spec.plane = "xw";
  EXPECT_THROW(grid_points(spec), ArgumentError);
}

TEST(FieldGrid, ParallelMatchesSerial) {
  const TrueField f({{1.05, 0.25, 0.0}}, {1.0}, 18.0);
  FieldGridSpec spec;
  spec.resolution = 0.1;
  const auto g = compute_field_grid(f, spec, "reference", 1000.0);
  const auto pts = grid_points(spec);
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_EQ(g.samples[i].pressure, f(pts[i]).pressure);
}

TEST(TranslatePw, ReciprocalTranslationRestoresGains) {
  const Pipeline p(test::reference_scene());
  const double hz = 2000.0;
  const double k = p.scene().wavenumber(hz);
  const auto psi = p.expand(Method::pw_cf, p.record(hz), hz);
  const Vec3 d(0.0, 0.5, 0.1);
  const auto back = translate_pw(translate_pw(psi, d, k), -d, k);
  EXPECT_LT(test::rel_error(back.gains, psi.gains), 1e-12);
}

TEST(DistributionField, Superposition) {
  const Pipeline p(test::reference_scene());
  const double hz = 900.0;
  const double k = p.scene().wavenumber(hz);
  const auto a = p.expand(Method::mw_cf, p.record(hz), hz);
  auto b = a;
  b.gains = test::random_coefficients(8).head(a.gains.size());  // 81 >= 72
  auto sum = a;
  sum.gains = a.gains + b.gains;
  const DistributionField fa(a, k);
  const DistributionField fb(b, k);
  const DistributionField fs(sum, k);
  for (int i = 0; i < 10; ++i) {
    const Vec3 x = test::random_point(1.0);
    const cplx expected = fa(x).pressure + fb(x).pressure;
    EXPECT_LT(std::abs(fs(x).pressure - expected), 1e-12 * std::abs(expected));
    EXPECT_LT((fs(x).velocity - fa(x).velocity - fb(x).velocity).norm(), 1e-12 * fs(x).velocity.norm());
  }
}

TEST(FieldGrid, ThreadCountDoesNotChangeResults) {
  const Pipeline p(test::reference_scene());
  const auto field = p.evaluator(p.prepare(Method::mw_cf, 1000.0));
  FieldGridSpec spec;
  spec.resolution = 0.1;
  set_thread_count(1);
  const auto serial = compute_field_grid(*field, spec, "mw-cf", 1000.0);
  set_thread_count(5);
  const auto threaded = compute_field_grid(*field, spec, "mw-cf", 1000.0);
  set_thread_count(0);
  ASSERT_EQ(serial.samples.size(), threaded.samples.size());
  for (std::size_t i = 0; i < serial.samples.size(); ++i) {
    EXPECT_EQ(serial.samples[i].pressure, threaded.samples[i].pressure);
    EXPECT_EQ(serial.samples[i].intensity, threaded.samples[i].intensity);
  }
}
