#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "sft/errors.hpp"
#include "sft/quadrature.hpp"
#include "sft/special.hpp"
#include "support.hpp"

using namespace sft;

TEST(FliegeGrid, ShippedGridsAreValidQuadratures) {
  for (int count : shipped_grid_counts()) {
    const auto grid = fliege_grid(count);
    ASSERT_EQ(grid->size(), static_cast<std::size_t>(count));
    double sum = 0.0;
    for (double w : grid->weights()) {
      EXPECT_GT(w, 0.0);
      sum += w;
    }
    EXPECT_NEAR(sum, kFourPi, 1e-9);
    // Q = (N+1)^2 nodes are orthonormal at least through order N-1.
    EXPECT_GE(grid->max_exact_degree(), static_cast<int>(std::lround(std::sqrt(count))) - 2) << count;
    EXPECT_LT(gram_error(*grid, grid->max_exact_degree()), 1e-10) << count;
    EXPECT_EQ(grid->max_fit_order(), static_cast<int>(std::lround(std::sqrt(count))) - 1);
  }
}

TEST(FliegeGrid, ThirtySixNodesIntegrateDegreeEight) {
  // Products of order-4 harmonics (degree 8) integrate exactly.
  const auto grid = fliege_grid(36);
  EXPECT_LT(gram_error(*grid, 4), 1e-10);
  EXPECT_GE(grid->max_exact_degree(), 4);
}

TEST(FliegeGrid, UnshippedCountThrows) {
  EXPECT_THROW(fliege_grid(37), UnsupportedGridError);
  EXPECT_THROW(fliege_grid(0), UnsupportedGridError);
}

TEST(FliegeGrid, DataDirectoryOverride) {
  const auto tmp = std::filesystem::temp_directory_path() / "sft_grid_override";
  std::filesystem::create_directories(tmp);
  const auto original = fliege_grid(16);
  QuadratureGrid(original->name(), original->nodes(), original->weights()).save_csv(tmp / "fliege_16.csv");
  setenv("SFT_DATA_DIR", tmp.c_str(), 1);
  EXPECT_EQ(data_directory(), tmp);
  const auto copy = fliege_grid(16);
  unsetenv("SFT_DATA_DIR");
  ASSERT_EQ(copy->size(), original->size());
  for (std::size_t i = 0; i < copy->size(); ++i) EXPECT_DOUBLE_EQ(copy->weights()[i], original->weights()[i]);
  setenv("SFT_DATA_DIR", (tmp / "missing").c_str(), 1);
  EXPECT_THROW(fliege_grid(25), UnsupportedGridError);
  unsetenv("SFT_DATA_DIR");
  std::filesystem::remove_all(tmp);
}

TEST(QuadratureGrid, RejectsBadWeights) {
  std::vector<Direction> nodes{{0.0, 0.0}, {kPi, 0.0}};
  EXPECT_THROW(QuadratureGrid("bad", nodes, {1.0, 1.0}), ValidationError);
  EXPECT_THROW(QuadratureGrid("neg", nodes, {kFourPi + 1.0, -1.0}), ValidationError);
  EXPECT_THROW(QuadratureGrid("len", nodes, {kFourPi}), ValidationError);
  EXPECT_NO_THROW(QuadratureGrid("ok", nodes, {2.0 * kPi, 2.0 * kPi}));
}

TEST(QuadratureGrid, GaussProductIsExact) {
  const auto grid = gauss_product_grid(20);
  EXPECT_EQ(grid.max_exact_degree(), 10);
  EXPECT_LT(gram_error(grid, 10), 1e-12);
}

TEST(ProjectToHarmonics, SingleHarmonicAndConstant) {
  const auto grid = fliege_grid(36);
  CVector values(static_cast<Eigen::Index>(grid->size()));
  for (std::size_t q = 0; q < grid->size(); ++q) values[static_cast<Eigen::Index>(q)] = sph_harm(2, 1, grid->nodes()[q]);
  const CVector c = project_to_harmonics(values, *grid, 4);
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double expected = i == HarmonicIndex{2, 1}.flat() ? 1.0 : 0.0;
    EXPECT_NEAR(std::abs(c[i] - expected), 0.0, 1e-10) << i;
  }
  const CVector ones = CVector::Ones(static_cast<Eigen::Index>(grid->size()));
  const CVector d = project_to_harmonics(ones, *grid, 4);
  EXPECT_NEAR(std::abs(d[0] - std::sqrt(kFourPi)), 0.0, 1e-10);
  EXPECT_LT(d.tail(d.size() - 1).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ProjectToHarmonics, RoundTrip) {
  for (int count : {25, 36, 49, 64, 100}) {
    const auto grid = fliege_grid(count);
    const int order = std::min(3, grid->max_fit_order());
    const HarmonicTransform t(grid, order);
    const CVector c = test::random_coefficients(order);
    EXPECT_LT(test::rel_error(t.analyze(t.synthesize(c)), c), 1e-10) << count;
  }
}

TEST(ProjectToHarmonics, TwentyFiveNodesResolveOrderFour) {
  const auto grid = fliege_grid(25);
  const HarmonicTransform t(grid, 4);
  const CVector c = test::random_coefficients(4);
  EXPECT_LT(test::rel_error(t.analyze(t.synthesize(c)), c), 1e-10);
}

TEST(ProjectToHarmonics, AliasingErrorAboveFitOrder) {
  const auto grid = fliege_grid(36);
  EXPECT_THROW(HarmonicTransform(grid, 6), AliasingError);
  const CVector v = CVector::Ones(36);
  EXPECT_THROW(project_to_harmonics(v, *grid, 6), AliasingError);
}

TEST(ExpansionIdentities, PlaneWave) {
  // e^{-ik y.x}/(4 pi) = sum (-i)^n Y*_nm(y) j_n(k|x|) Y_nm(x_hat), truncated at ceil(k|x|)+15.
  const Direction y{1.1, 0.4};
  for (int trial = 0; trial < 40; ++trial) {
    const Vec3 x = test::random_point(1.0);
    for (double kr : {0.5, 2.0, 5.0}) {
      const double k = kr / x.norm();
      const int order = static_cast<int>(std::ceil(kr)) + 15;
      const CVector yy = sph_harm_all(order, y);
      const CVector yx = sph_harm_all(order, Direction::from_vector(x));
      const auto j = sph_bessel_j_array(order, kr);
      cplx sum{0.0, 0.0};
      for (int n = 0; n <= order; ++n) {
        for (int m = -n; m <= n; ++m) sum += ipow(-n) * std::conj(yy[n * n + n + m]) * j[n] * yx[n * n + n + m];
      }
      const cplx exact = std::exp(-kI * (k * y.unit_vector().dot(x))) / kFourPi;
      EXPECT_LT(test::rel_error(sum, exact), 1e-6);
    }
  }
}

TEST(ExpansionIdentities, PointSource) {
  // sum i k h_n(k|y|) Y*(y) j_n(k|x|) Y(x) is the free-field Green function.
  const Vec3 source(0.3, -1.2, 0.5);
  for (int trial = 0; trial < 40; ++trial) {
    const Vec3 x = test::random_point(0.5 * source.norm());
    for (double kr : {0.5, 2.0, 5.0}) {
      const double k = kr / x.norm();
      const int order = static_cast<int>(std::ceil(kr)) + 15;
      // Convergence needs (r/|y|)^N small; add terms until it is.
      const int n_max = order + static_cast<int>(std::ceil(40.0 / std::log(source.norm() / x.norm())));
      const CVector ys = sph_harm_all(n_max, Direction::from_vector(source));
      const CVector yx = sph_harm_all(n_max, Direction::from_vector(x));
      const auto j = sph_bessel_j_array(n_max, kr);
      const auto h = sph_hankel1_array(n_max, k * source.norm());
      cplx sum{0.0, 0.0};
      for (int n = 0; n <= n_max; ++n) {
        for (int m = -n; m <= n; ++m) sum += kI * k * h[n] * std::conj(ys[n * n + n + m]) * j[n] * yx[n * n + n + m];
      }
      const double d = (source - x).norm();
      const cplx exact = std::exp(kI * (k * d)) / (kFourPi * d);
      EXPECT_LT(test::rel_error(sum, exact), 1e-6) << "kr=" << kr << " |x|=" << x.norm();
    }
  }
}
