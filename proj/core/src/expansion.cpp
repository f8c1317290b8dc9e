#include "sft/expansion.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

#include "sft/errors.hpp"
#include "sft/special.hpp"

namespace sft {
namespace {

std::vector<VirtualSource> shell_sources(const QuadratureGrid& grid, double radius) {
  std::vector<VirtualSource> out;
  out.reserve(grid.size());
  for (std::size_t q = 0; q < grid.size(); ++q) {
    out.push_back({grid.nodes()[q], grid.nodes()[q].unit_vector(), radius, grid.weights()[q]});
  }
  return out;
}

// Closed forms need sum_l w_l Y Y* exact up to degree 2N, i.e. an orthonormal basis to order N.
bool aliasing(const VirtualDistribution& dist, int order) {
  return dist.grid() == nullptr || dist.grid()->max_exact_degree() < order;
}

}  // namespace

VirtualDistribution::VirtualDistribution(SourceModel model, std::vector<VirtualSource> sources)
    : model_(model), sources_(std::move(sources)) {
  if (sources_.empty()) throw ArgumentError("virtual distribution has no sources");
  for (const auto& s : sources_) {
    if (model_ == SourceModel::planewave && !s.far_field()) {
      throw ArgumentError("planewave sources carry no radius");
    }
    if (model_ == SourceModel::mixedwave && !(s.radius > 0.0 && std::isfinite(s.radius))) {
      throw ArgumentError("mixedwave sources need a finite positive radius");
    }
  }
}

VirtualDistribution VirtualDistribution::planewave(std::shared_ptr<const QuadratureGrid> grid) {
  VirtualDistribution d(SourceModel::planewave, shell_sources(*grid, std::numeric_limits<double>::infinity()));
  d.grid_ = std::move(grid);
  return d;
}

VirtualDistribution VirtualDistribution::mixedwave(std::shared_ptr<const QuadratureGrid> grid, double near_radius,
                                                   double far_radius) {
  if (!(near_radius > 0.0) || !(far_radius > near_radius)) {
    throw ArgumentError("mixedwave shells need 0 < near radius < far radius");
  }
  auto sources = shell_sources(*grid, near_radius);
  auto far = shell_sources(*grid, far_radius);
  sources.insert(sources.end(), far.begin(), far.end());
  VirtualDistribution d(SourceModel::mixedwave, std::move(sources));
  d.grid_ = std::move(grid);
  return d;
}

VirtualDistribution VirtualDistribution::from_spec(const DistributionSpec& spec) {
  if (spec.model == SourceModel::planewave) return planewave(spec.direction_grid.grid);
  return mixedwave(spec.direction_grid.grid, spec.radii.at(0), spec.radii.at(1));
}

std::size_t VirtualDistribution::shell_size() const {
  return model_ == SourceModel::mixedwave && grid_ ? grid_->size() : sources_.size();
}

double VirtualDistribution::near_radius() const {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& s : sources_) r = std::min(r, s.radius);
  return r;
}

std::string to_string(Method method) {
  switch (method) {
    case Method::reference:
      return "reference";
    case Method::anchor:
      return "anchor";
    case Method::pw_cf:
      return "pw-cf";
    case Method::pw_irls:
      return "pw-irls";
    case Method::mw_cf:
      return "mw-cf";
    case Method::mw_irls:
      return "mw-irls";
  }
  return "unknown";
}

Method parse_method(const std::string& tag) {
  for (Method m : all_methods()) {
    if (to_string(m) == tag) return m;
  }
  throw ArgumentError("unknown method '" + tag + "' (expected reference, anchor, pw-cf, pw-irls, mw-cf or mw-irls)");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{Method::reference, Method::anchor, Method::pw_cf,
                                           Method::pw_irls,   Method::mw_cf,  Method::mw_irls};
  return methods;
}

bool is_expansion(Method method) { return method != Method::reference && method != Method::anchor; }

bool is_irls(Method method) { return method == Method::pw_irls || method == Method::mw_irls; }

SourceModel model_of(Method method) {
  if (method == Method::pw_cf || method == Method::pw_irls) return SourceModel::planewave;
  if (method == Method::mw_cf || method == Method::mw_irls) return SourceModel::mixedwave;
  throw ModelError(to_string(method) + " does not use a virtual source distribution");
}

CVector DrivingFunction::effective_gains() const {
  if (!weighted) return gains;
  CVector out = gains;
  const auto& sources = distribution->sources();
  for (Eigen::Index l = 0; l < out.size(); ++l) out[l] *= sources[static_cast<std::size_t>(l)].weight;
  return out;
}

CVector source_modes(const VirtualSource& source, double k, int order) {
  const CVector y = sph_harm_all(order, source.direction);
  CVector modes(y.size());
  for (int n = 0; n <= order; ++n) {
    const cplx radial = source.far_field() ? ipow(-n) : mixedwave_mode(n, k, source.radius);
    for (int m = -n; m <= n; ++m) {
      const int i = n * n + n + m;
      modes[i] = radial * std::conj(y[i]);
    }
  }
  return modes;
}

CMatrix build_matrix(const VirtualDistribution& dist, double k, int order) {
  CMatrix a(HarmonicIndex::count(order), static_cast<Eigen::Index>(dist.size()));
  for (std::size_t l = 0; l < dist.size(); ++l) {
    a.col(static_cast<Eigen::Index>(l)) = source_modes(dist.sources()[l], k, order);
  }
  return a;
}

DrivingFunction pw_closed_form(const SphericalCoefficients& alpha, std::shared_ptr<const VirtualDistribution> dist) {
  if (dist->model() != SourceModel::planewave) throw ModelError("pw_closed_form needs a planewave distribution");
  CVector scaled = alpha.values;
  for (int n = 0; n <= alpha.order; ++n) {
    for (int m = -n; m <= n; ++m) scaled[n * n + n + m] *= ipow(n);
  }
  CVector gains(static_cast<Eigen::Index>(dist->size()));
  for (std::size_t l = 0; l < dist->size(); ++l) {
    gains[static_cast<Eigen::Index>(l)] = sph_harm_all(alpha.order, dist->sources()[l].direction).cwiseProduct(scaled).sum();
  }
  DrivingFunction out;
  out.method = Method::pw_cf;
  out.aliasing_warning = aliasing(*dist, alpha.order);
  out.distribution = std::move(dist);
  out.gains = std::move(gains);
  return out;
}

DrivingFunction mw_closed_form_shell(const SphericalCoefficients& alpha,
                                     std::shared_ptr<const VirtualDistribution> dist, Shell shell, double k) {
  if (dist->model() != SourceModel::mixedwave) throw ModelError("mw_closed_form needs a mixedwave distribution");
  const std::size_t shell_size = dist->shell_size();
  if (dist->size() != 2 * shell_size) throw ArgumentError("mixedwave distribution must hold two equal shells");
  const std::size_t begin = shell == Shell::near ? 0 : shell_size;
  const double radius = dist->sources()[begin].radius;
  if (!(k * radius > 0.0)) throw SingularityError("k*R must be positive for the mixedwave closed form");

  CVector scaled = alpha.values;
  for (int n = 0; n <= alpha.order; ++n) {
    const cplx mode = mixedwave_mode(n, k, radius);
    for (int m = -n; m <= n; ++m) scaled[n * n + n + m] /= mode;
  }
  CVector gains = CVector::Zero(static_cast<Eigen::Index>(dist->size()));
  for (std::size_t l = begin; l < begin + shell_size; ++l) {
    gains[static_cast<Eigen::Index>(l)] = sph_harm_all(alpha.order, dist->sources()[l].direction).cwiseProduct(scaled).sum();
  }
  DrivingFunction out;
  out.method = Method::mw_cf;
  out.aliasing_warning = aliasing(*dist, alpha.order);
  out.distribution = std::move(dist);
  out.gains = std::move(gains);
  return out;
}

DrivingFunction mw_closed_form(const SphericalCoefficients& alpha, std::shared_ptr<const VirtualDistribution> dist,
                               double k) {
  SphericalCoefficients half = alpha;
  half.values *= 0.5;
  DrivingFunction near = mw_closed_form_shell(half, dist, Shell::near, k);
  const DrivingFunction far = mw_closed_form_shell(half, std::move(dist), Shell::far, k);
  near.gains += far.gains;
  return near;
}

IrlsResult irls_solve(const CMatrix& a, const CVector& alpha, const IrlsOptions& options) {
  if (a.rows() != alpha.size()) throw ArgumentError("irls_solve: A rows != alpha length");
  if (!(options.p > 0.0) || !(options.p <= 2.0)) throw ArgumentError("irls_solve: p must be in (0, 2]");
  if (options.max_iterations <= 0) throw ArgumentError("irls_solve: max_iterations must be positive");
  if (!alpha.allFinite()) throw ArgumentError("irls_solve: alpha is not finite");

  IrlsResult result;
  const double alpha_norm = alpha.norm();
  if (alpha_norm == 0.0) {
    result.psi = CVector::Zero(a.cols());
    result.report.converged = true;
    result.report.iterations = 1;
    result.report.epsilon_trace.push_back(0.0);
    result.report.stage_l1.push_back(0.0);
    return result;
  }

  const CMatrix ah = a.adjoint();
  const auto rows = static_cast<double>(a.rows());
  // psi = Q A^H (A Q A^H + delta I)^-1 alpha. A few refinement sweeps with the
  // same factorisation remove the bias the delta damping leaves in A psi.
  auto weighted_solve = [&](const Eigen::VectorXd& q) {
    CMatrix m = a * q.asDiagonal() * ah;
    const double delta = options.delta_scale * m.trace().real() / rows;
    m.diagonal().array() += delta;
    const Eigen::LDLT<CMatrix> ldlt(m);
    CVector psi = q.asDiagonal() * (ah * ldlt.solve(alpha));
    for (int sweep = 0; sweep < 4; ++sweep) {
      const CVector r = alpha - a * psi;
      if (r.norm() <= 1e-15 * alpha_norm) break;
      psi += q.asDiagonal() * (ah * ldlt.solve(r));
    }
    return psi;
  };

  CVector psi = weighted_solve(Eigen::VectorXd::Ones(a.cols()));
  const double eps0 = 0.1 * psi.cwiseAbs2().maxCoeff();
  const double eps_floor = options.epsilon_floor * eps0;
  double eps = eps0;
  const double exponent = (2.0 - options.p) / 2.0;
  auto& report = result.report;

  for (int it = 1; it <= options.max_iterations; ++it) {
    const Eigen::VectorXd q = (psi.cwiseAbs2().array() + eps).pow(exponent).matrix();
    CVector next = weighted_solve(q);
    const double base = psi.norm();
    const double change = base > 0.0 ? (next - psi).norm() / base : 0.0;
    psi = std::move(next);
    report.iterations = it;
    report.epsilon_trace.push_back(eps);
    if (change < options.stage_tolerance) {
      report.stage_l1.push_back(psi.cwiseAbs().sum());
      if (eps <= eps_floor) {
        report.converged = true;
        break;
      }
      eps = std::max(eps * options.epsilon_scale, eps_floor);
    }
  }
  report.residual = (a * psi - alpha).norm() / alpha_norm;
  report.converged = report.converged && report.residual < options.residual_tolerance;
  result.psi = std::move(psi);
  return result;
}

DrivingFunction irls_expand(const SphericalCoefficients& alpha, std::shared_ptr<const VirtualDistribution> dist,
                            double k, const IrlsOptions& options) {
  const CMatrix a = build_matrix(*dist, k, alpha.order);
  if (a.cols() <= a.rows()) {
    throw ArgumentError("IRLS expects an under-determined system: " + std::to_string(a.cols()) + " sources for " +
                        std::to_string(a.rows()) + " coefficients");
  }
  auto solved = irls_solve(a, alpha.values, options);
  DrivingFunction out;
  out.method = dist->model() == SourceModel::planewave ? Method::pw_irls : Method::mw_irls;
  out.distribution = std::move(dist);
  out.gains = std::move(solved.psi);
  out.weighted = false;
  out.report = std::move(solved.report);
  return out;
}

SphericalCoefficients synthesize_coefficients(const DrivingFunction& psi, double k, int order) {
  return {order, build_matrix(*psi.distribution, k, order) * psi.effective_gains()};
}

}  // namespace sft
