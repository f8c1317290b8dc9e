#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sft/harmonics.hpp"
#include "sft/types.hpp"

namespace sft {

/// Sampling points on the unit sphere with positive quadrature weights.
///
/// `max_exact_degree` is the largest order D such that the discrete Gram
/// matrix sum_q w_q Y_nm(q) Y*_n'm'(q) equals the identity to 1e-10 for all
/// n, n' <= D. It is measured from the data unless the caller knows it
/// analytically (product rules).
class QuadratureGrid {
 public:
  QuadratureGrid(std::string name, std::vector<Direction> nodes, std::vector<double> weights,
                 std::optional<int> known_exact_degree = std::nullopt);

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] const std::vector<Direction>& nodes() const { return nodes_; }
  [[nodiscard]] const std::vector<double>& weights() const { return weights_; }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] int max_exact_degree() const { return max_exact_degree_; }
  /// Highest order for which a least-squares fit is determined: (N+1)^2 <= size().
  [[nodiscard]] int max_fit_order() const;
  /// Largest angle (radians) from any node to its nearest neighbour.
  [[nodiscard]] double max_spacing() const;

  /// Reads `theta,phi,weight` CSV.
  static QuadratureGrid load_csv(const std::filesystem::path& path);
  void save_csv(const std::filesystem::path& path) const;

 private:
  std::string name_;
  std::vector<Direction> nodes_;
  std::vector<double> weights_;
  int max_exact_degree_ = -1;
};

/// max |G - I| over all harmonics up to `degree`.
double gram_error(const QuadratureGrid& grid, int degree);

/// Node counts shipped with the library.
const std::vector<int>& shipped_grid_counts();

/// Directory holding bundled data; `SFT_DATA_DIR` overrides the built-in location.
std::filesystem::path data_directory();

/// Bundled Fliege-type grid with `point_count` nodes (cached, shared).
/// Throws UnsupportedGridError for counts without a data file.
std::shared_ptr<const QuadratureGrid> fliege_grid(int point_count);

/// Gauss-Legendre (in cos theta) x uniform (in phi) product rule, exact for
/// polynomials of total degree `degree` on the sphere.
QuadratureGrid gauss_product_grid(int degree);

/// Forward/inverse discrete spherical harmonic transform on a fixed grid.
///
/// For orders within `max_exact_degree` analysis is the quadrature sum
/// c_nm = sum_q w_q v_q Y*_nm(q). Above that and up to `max_fit_order` it is
/// the weighted least-squares fit, which coincides with the quadrature sum on
/// exact grids and still recovers order-limited data exactly.
class HarmonicTransform {
 public:
  HarmonicTransform(std::shared_ptr<const QuadratureGrid> grid, int max_order);

  [[nodiscard]] int max_order() const { return max_order_; }
  [[nodiscard]] const QuadratureGrid& grid() const { return *grid_; }
  /// Q x (N+1)^2 matrix of Y_nm(node_q).
  [[nodiscard]] const CMatrix& basis() const { return basis_; }
  [[nodiscard]] bool uses_quadrature() const { return quadrature_; }

  [[nodiscard]] CVector analyze(const CVector& values) const;
  [[nodiscard]] CVector synthesize(const CVector& coefficients) const;

 private:
  std::shared_ptr<const QuadratureGrid> grid_;
  int max_order_;
  bool quadrature_;
  CMatrix basis_;
  CMatrix analysis_;
};

/// One-shot analysis; throws AliasingError when `max_order` exceeds the grid's fit order.
CVector project_to_harmonics(const CVector& values, const QuadratureGrid& grid, int max_order);

}  // namespace sft
