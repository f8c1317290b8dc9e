#include "sft/pipeline.hpp"

#include <cmath>

#include "sft/errors.hpp"
#include "sft/parallel.hpp"

namespace sft {

BinauralPair PreparedMethod::auralize(const Scene& scene, const Vec3& d, const EarGeometry& ears) const {
  switch (method) {
    case Method::reference:
      return auralize_reference(scene, d, k, ears);
    case Method::anchor:
      return *anchor;
    case Method::pw_cf:
    case Method::pw_irls:
      return auralize_pw(*driving, d, k, ears);
    case Method::mw_cf:
    case Method::mw_irls:
      return auralize_mw(*driving, d, k, ears);
  }
  throw ArgumentError("unknown method");
}

Pipeline::Pipeline(Scene scene) : scene_(std::move(scene)), array_(scene_.microphone) {
  if (scene_.planewave) {
    planewave_ = std::make_shared<const VirtualDistribution>(VirtualDistribution::from_spec(*scene_.planewave));
  }
  if (scene_.mixedwave) {
    mixedwave_ = std::make_shared<const VirtualDistribution>(VirtualDistribution::from_spec(*scene_.mixedwave));
  }
}

IrlsOptions Pipeline::irls_options() const {
  IrlsOptions o;
  o.p = scene_.irls.p;
  o.max_iterations = scene_.irls.max_iterations;
  return o;
}

std::shared_ptr<const VirtualDistribution> Pipeline::distribution(SourceModel model) const {
  const auto& d = model == SourceModel::planewave ? planewave_ : mixedwave_;
  if (!d) {
    throw ModelError(std::string("scene defines no ") + (model == SourceModel::planewave ? "planewave" : "mixedwave") +
                     " distribution");
  }
  return d;
}

SphericalCoefficients Pipeline::record(double hz) const { return record_scene(scene_, array_, hz); }

DrivingFunction Pipeline::expand(Method method, const SphericalCoefficients& alpha, double hz) const {
  const double k = scene_.wavenumber(hz);
  switch (method) {
    case Method::pw_cf:
      return pw_closed_form(alpha, distribution(SourceModel::planewave));
    case Method::mw_cf:
      return mw_closed_form(alpha, distribution(SourceModel::mixedwave), k);
    case Method::pw_irls:
      return irls_expand(alpha, distribution(SourceModel::planewave), k, irls_options());
    case Method::mw_irls:
      return irls_expand(alpha, distribution(SourceModel::mixedwave), k, irls_options());
    default:
      throw ModelError(to_string(method) + " is not an expansion method");
  }
}

PreparedMethod Pipeline::prepare(Method method, double hz) const {
  PreparedMethod p;
  p.method = method;
  p.frequency_hz = hz;
  p.k = scene_.wavenumber(hz);
  if (method == Method::reference) return p;
  p.recorded = record(hz);
  if (method == Method::anchor) {
    p.anchor = AnchorHrtf(ears(), p.k, p.recorded.order).apply(p.recorded);
  } else {
    p.driving = expand(method, p.recorded, hz);
  }
  return p;
}

std::unique_ptr<FieldEvaluator> Pipeline::evaluator(const PreparedMethod& prepared) const {
  switch (prepared.method) {
    case Method::reference:
      return std::make_unique<TrueField>(TrueField::from_scene(scene_, prepared.k));
    case Method::anchor:
      return std::make_unique<TruncatedField>(prepared.recorded, prepared.k);
    default:
      return std::make_unique<DistributionField>(*prepared.driving, prepared.k);
  }
}

BinauralSpectrum compute_brir(Method method, const Pipeline& pipeline, const Vec3& d,
                              const std::vector<double>& frequencies) {
  BinauralSpectrum out;
  out.method = method;
  out.listener = d;
  out.frequencies = frequencies;
  out.bins.resize(frequencies.size());
  const auto ears = pipeline.ears();
  parallel_for(frequencies.size(), [&](std::size_t i) {
    if (!(frequencies[i] > 0.0)) return;  // no field at DC
    out.bins[i] = pipeline.prepare(method, frequencies[i]).auralize(pipeline.scene(), d, ears);
  });
  return out;
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  if (n < 2 || !(lo > 0.0) || !(hi > lo)) throw ArgumentError("log_spaced: need n >= 2 and 0 < lo < hi");
  std::vector<double> out(static_cast<std::size_t>(n));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < n; ++i) out[i] = std::exp(a + (b - a) * i / (n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace sft
