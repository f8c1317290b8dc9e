#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sft/capture.hpp"
#include "sft/quadrature.hpp"
#include "sft/scene.hpp"
#include "sft/types.hpp"

namespace sft {

struct VirtualSource {
  Direction direction;
  Vec3 unit = Vec3::UnitX();
  /// Infinite for planewave sources.
  double radius = std::numeric_limits<double>::infinity();
  double weight = 0.0;

  [[nodiscard]] bool far_field() const { return !std::isfinite(radius); }
  [[nodiscard]] Vec3 position() const { return radius * unit; }
};

/// Discrete set of secondary sources. Mixedwave distributions hold the near
/// shell first (indices [0, L)), then the far shell ([L, 2L)).
class VirtualDistribution {
 public:
  static VirtualDistribution planewave(std::shared_ptr<const QuadratureGrid> grid);
  static VirtualDistribution mixedwave(std::shared_ptr<const QuadratureGrid> grid, double near_radius,
                                       double far_radius);
  static VirtualDistribution from_spec(const DistributionSpec& spec);
  /// Arbitrary source table (e.g. read back from a file).
  VirtualDistribution(SourceModel model, std::vector<VirtualSource> sources);

  [[nodiscard]] SourceModel model() const { return model_; }
  [[nodiscard]] const std::vector<VirtualSource>& sources() const { return sources_; }
  [[nodiscard]] std::size_t size() const { return sources_.size(); }
  /// Directions per shell (L).
  [[nodiscard]] std::size_t shell_size() const;
  /// Smallest source radius (infinite for planewave).
  [[nodiscard]] double near_radius() const;
  [[nodiscard]] const QuadratureGrid* grid() const { return grid_.get(); }

 private:
  SourceModel model_;
  std::vector<VirtualSource> sources_;
  std::shared_ptr<const QuadratureGrid> grid_;
};

enum class Method { reference, anchor, pw_cf, pw_irls, mw_cf, mw_irls };

std::string to_string(Method method);
/// Accepts the tags "reference", "anchor", "pw-cf", "pw-irls", "mw-cf", "mw-irls".
Method parse_method(const std::string& tag);
const std::vector<Method>& all_methods();
[[nodiscard]] bool is_expansion(Method method);
[[nodiscard]] bool is_irls(Method method);
[[nodiscard]] SourceModel model_of(Method method);

struct IrlsOptions {
  double p = 1.0;
  int max_iterations = 100;
  /// Relative iterate change that triggers the next epsilon stage.
  double stage_tolerance = 1e-3;
  double epsilon_scale = 0.1;
  double epsilon_floor = 1e-12;
  double delta_scale = 1e-10;
  double residual_tolerance = 1e-6;
};

struct IrlsReport {
  bool converged = false;
  int iterations = 0;
  /// ||A psi - alpha|| / ||alpha||
  double residual = 0.0;
  /// epsilon used at each iteration
  std::vector<double> epsilon_trace;
  /// l1 norm of psi at the end of each epsilon stage
  std::vector<double> stage_l1;
};

/// Complex gains psi per virtual source for one frequency.
struct DrivingFunction {
  Method method = Method::pw_cf;
  std::shared_ptr<const VirtualDistribution> distribution;
  CVector gains;
  /// Quadrature weights enter synthesis for closed-form results only.
  bool weighted = true;
  /// Closed form evaluated on a grid not exact to degree 2N.
  bool aliasing_warning = false;
  std::optional<IrlsReport> report;

  /// w_l psi_l (closed form) or psi_l (IRLS): the per-source amplitude in every sum.
  [[nodiscard]] CVector effective_gains() const;
};

/// Mode response of one source: (-i)^n Y*_nm for planewave, mixedwave_mode * Y*_nm otherwise.
CVector source_modes(const VirtualSource& source, double k, int order);

/// (N+1)^2 x size() matrix whose column l holds source l's modes.
CMatrix build_matrix(const VirtualDistribution& dist, double k, int order);

/// psi_l = sum i^n alpha_nm Y_nm(y_l).
DrivingFunction pw_closed_form(const SphericalCoefficients& alpha, std::shared_ptr<const VirtualDistribution> dist);

enum class Shell { near, far };

/// psi_l = sum alpha_nm / mixedwave_mode(n, k, R) Y_nm(y_l) on one shell; the other shell's gains are zero.
DrivingFunction mw_closed_form_shell(const SphericalCoefficients& alpha,
                                     std::shared_ptr<const VirtualDistribution> dist, Shell shell, double k);

/// Both shells, each expanded from alpha / 2 so the two-shell sum reproduces alpha.
DrivingFunction mw_closed_form(const SphericalCoefficients& alpha, std::shared_ptr<const VirtualDistribution> dist,
                               double k);

struct IrlsResult {
  CVector psi;
  IrlsReport report;
};

/// Damped IRLS for min ||psi||_p subject to A psi = alpha.
IrlsResult irls_solve(const CMatrix& a, const CVector& alpha, const IrlsOptions& options = {});

DrivingFunction irls_expand(const SphericalCoefficients& alpha, std::shared_ptr<const VirtualDistribution> dist,
                            double k, const IrlsOptions& options = {});

/// A (w o psi): the coefficients the distribution produces about the origin.
SphericalCoefficients synthesize_coefficients(const DrivingFunction& psi, double k, int order);

}  // namespace sft
