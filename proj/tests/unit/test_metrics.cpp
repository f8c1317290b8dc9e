#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Geometry>

#include "sft/errors.hpp"
#include "sft/field.hpp"
#include "sft/metrics.hpp"
#include "support.hpp"

using namespace sft;

namespace {

FunctionField constant_pressure(cplx p, double k = 1.0) {
  return FunctionField([p, k](const Vec3& x) { return FieldSample::from_gradient(x, p, CVec3::Zero(), k); }, k);
}

}  // namespace

TEST(PressureError, TrivialValues) {
  const cplx p(0.3, -1.2);
  EXPECT_DOUBLE_EQ(*pressure_error(p, p), 0.0);
  EXPECT_DOUBLE_EQ(*pressure_error(p, 0.0), 100.0);
  EXPECT_NEAR(*pressure_error(1.0, cplx(1.0, 0.1)), 1.0, 1e-12);
  EXPECT_FALSE(pressure_error(0.0, 1.0).has_value());
}

TEST(PressureError, ScaleSensitivity) {
  const cplx p(0.8, 0.6);
  for (double c : {-2.0, 0.0, 0.5, 1.0, 3.0}) EXPECT_NEAR(*pressure_error(p, c * p), std::norm(1.0 - c) * 100.0, 1e-10);
}

TEST(IntensityMagnitudeError, TrivialValues) {
  const Vec3 i(0.2, -0.4, 1.0);
  EXPECT_DOUBLE_EQ(*intensity_magnitude_error(i, i), 0.0);
  EXPECT_NEAR(*intensity_magnitude_error(i, 2.0 * i), 100.0, 1e-12);
  EXPECT_NEAR(*intensity_magnitude_error(i, -i), 400.0, 1e-12);
  EXPECT_FALSE(intensity_magnitude_error(Vec3::Zero(), i).has_value());
}

TEST(IntensityDirectionError, TrivialValuesAndSymmetry) {
  const Vec3 x = Vec3::UnitX();
  EXPECT_NEAR(*intensity_direction_error(x, 3.0 * x), 0.0, 1e-6);
  EXPECT_NEAR(*intensity_direction_error(x, Vec3::UnitY()), 50.0, 1e-12);
  EXPECT_NEAR(*intensity_direction_error(x, -x), 100.0, 1e-12);
  EXPECT_FALSE(intensity_direction_error(x, Vec3::Zero()).has_value());
  for (int n = 0; n < 20; ++n) {
    const Vec3 a = test::random_point(1.0);
    const Vec3 b = test::random_point(1.0);
    const double ab = *intensity_direction_error(a, b);
    EXPECT_EQ(ab, *intensity_direction_error(b, a));
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 100.0);
  }
}

TEST(IntensityDirectionError, NearlyParallelIsFinite) {
  const Vec3 a(1.0, 1e-9, 0.0);
  const double e = *intensity_direction_error(a, a * (1.0 + 1e-15));
  EXPECT_TRUE(std::isfinite(e));
  EXPECT_LT(e, 1e-5);
}

TEST(UnitVectorDifference, TrivialValues) {
  const Vec3 x = Vec3::UnitX();
  EXPECT_LT(unit_vector_difference(x, 5.0 * x)->norm(), 1e-15);
  EXPECT_LT((*unit_vector_difference(x, -x) - Vec3(2.0, 0.0, 0.0)).norm(), 1e-15);
  EXPECT_LT((*unit_vector_difference(x, Vec3::UnitY()) - Vec3(1.0, -1.0, 0.0)).norm(), 1e-15);
}

TEST(SampleMetric, MaskedSamplesAreSkipped) {
  const auto good = FieldSample::from_gradient(Vec3::Zero(), 1.0, CVec3(0.5, 0.0, 0.0), 1.0);
  const auto bad = FieldSample::masked_at(Vec3::Zero());
  for (Metric m : {Metric::pe, Metric::ime, Metric::ide}) {
    EXPECT_FALSE(sample_metric(m, bad, good).has_value());
    EXPECT_FALSE(sample_metric(m, good, bad).has_value());
    EXPECT_NEAR(*sample_metric(m, good, good), 0.0, 1e-6);
  }
}

TEST(MetricTags, RoundTrip) {
  for (Metric m : {Metric::pe, Metric::ime, Metric::ide}) EXPECT_EQ(parse_metric(to_string(m)), m);
  EXPECT_THROW(parse_metric("snr"), ArgumentError);
}

TEST(Metrics, InvariantUnderGlobalRotation) {
  const double k = 12.0;
  const Eigen::Matrix3d r = Eigen::AngleAxisd(0.7, Vec3(1.0, -2.0, 0.5).normalized()).toRotationMatrix();
  const Vec3 z1(1.0, 0.2, 0.0);
  const Vec3 z2(0.9, 0.35, -0.1);
  const TrueField a({z1}, {1.0}, k);
  const TrueField b({z2}, {cplx(0.8, 0.1)}, k);
  const TrueField ar({r * z1}, {1.0}, k);
  const TrueField br({r * z2}, {cplx(0.8, 0.1)}, k);
  for (int i = 0; i < 10; ++i) {
    const Vec3 x = test::random_point(0.5);
    for (Metric m : {Metric::pe, Metric::ime, Metric::ide}) {
      EXPECT_NEAR(*sample_metric(m, a(x), b(x)), *sample_metric(m, ar(r * x), br(r * x)), 1e-8) << to_string(m);
    }
  }
}

TEST(SphereAverage, IdenticalFieldsGiveZero) {
  const TrueField f({{1.0, 0.0, 0.0}}, {1.0}, 18.0);
  for (double r : {0.01, 0.1, 0.5}) {
    for (Metric m : {Metric::pe, Metric::ime, Metric::ide}) {
      const auto avg = sphere_average(m, r, f, f);
      EXPECT_NEAR(avg.value, 0.0, 1e-6);
      EXPECT_TRUE(avg.valid);
      EXPECT_EQ(avg.total, 100u);
    }
  }
}

TEST(SphereAverage, ConstantMetricAveragesToItself) {
  const auto truth = constant_pressure(1.0);
  const auto test_field = constant_pressure(cplx(1.0, 0.1));
  for (int points : {36, 64, 100}) {
    EXPECT_NEAR(sphere_average(Metric::pe, 0.3, truth, test_field, points).value, 1.0, 1e-12) << points;
  }
}

TEST(SphereAverage, MaskedPointsAreCountedAndExcluded) {
  // Mask the single node nearest +z; the rest carry PE 1.
  const auto grid = fliege_grid(100);
  Vec3 top = grid->nodes()[0].unit_vector();
  for (const auto& n : grid->nodes()) {
    if (n.unit_vector().z() > top.z()) top = n.unit_vector();
  }
  const FunctionField truth(
      [top](const Vec3& x) {
        if ((x.normalized() - top).norm() < 1e-9) return FieldSample::masked_at(x);
        return FieldSample::from_gradient(x, 1.0, CVec3::Zero(), 1.0);
      },
      1.0);
  const auto test_field = constant_pressure(cplx(1.0, 0.1));
  const auto avg = sphere_average(Metric::pe, 0.2, truth, test_field);
  EXPECT_EQ(avg.masked, 1u);
  EXPECT_NEAR(avg.value, 1.0, 1e-12);
  EXPECT_FALSE(avg.valid);  // 1 of 100 is not below 1%
}

TEST(SphereAverage, AllMaskedThrows) {
  const FunctionField masked([](const Vec3& x) { return FieldSample::masked_at(x); }, 1.0);
  EXPECT_THROW(sphere_average(Metric::pe, 0.1, masked, masked), NumericalError);
}

TEST(ErrorField, PerPointAgreesWithSampleMetric) {
  const double k = 9.0;
  const TrueField truth({{1.0, 0.0, 0.0}}, {1.0}, k);
  const TrueField other({{1.0, 0.1, 0.0}}, {1.0}, k);
  FieldGridSpec spec;
  spec.resolution = 0.25;
  const auto a = compute_field_grid(truth, spec, "reference", 500.0);
  const auto b = compute_field_grid(other, spec, "other", 500.0);
  const auto e = compute_error_field(a, b);
  ASSERT_EQ(e.size(), a.samples.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (a.samples[i].masked || b.samples[i].masked) {
      EXPECT_FALSE(e.pe[i].has_value());
      continue;
    }
    EXPECT_EQ(*e.pe[i], *sample_metric(Metric::pe, a.samples[i], b.samples[i]));
    EXPECT_EQ(*e.ide[i], *sample_metric(Metric::ide, a.samples[i], b.samples[i]));
  }
}
