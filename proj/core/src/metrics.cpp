#include "sft/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "sft/errors.hpp"
#include "sft/quadrature.hpp"

namespace sft {

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::pe:
      return "pe";
    case Metric::ime:
      return "ime";
    case Metric::ide:
      return "ide";
  }
  return "unknown";
}

Metric parse_metric(const std::string& tag) {
  if (tag == "pe") return Metric::pe;
  if (tag == "ime") return Metric::ime;
  if (tag == "ide") return Metric::ide;
  throw ArgumentError("unknown metric '" + tag + "' (expected pe, ime or ide)");
}

std::optional<double> pressure_error(cplx p_true, cplx p_test) {
  const double ref = std::norm(p_true);
  if (!(ref > 0.0)) return std::nullopt;
  return std::norm(p_true - p_test) / ref * 100.0;
}

std::optional<double> intensity_magnitude_error(const Vec3& i_true, const Vec3& i_test) {
  const double ref = i_true.squaredNorm();
  if (!(ref > 0.0)) return std::nullopt;
  return (i_true - i_test).squaredNorm() / ref * 100.0;
}

std::optional<double> intensity_direction_error(const Vec3& i_true, const Vec3& i_test) {
  const double a = i_true.norm();
  const double b = i_test.norm();
  if (!(a > 0.0) || !(b > 0.0)) return std::nullopt;
  const double c = std::clamp(i_true.dot(i_test) / (a * b), -1.0, 1.0);
  return std::acos(c) / kPi * 100.0;
}

std::optional<Vec3> unit_vector_difference(const Vec3& i_true, const Vec3& i_test) {
  const double a = i_true.norm();
  const double b = i_test.norm();
  if (!(a > 0.0) || !(b > 0.0)) return std::nullopt;
  return Vec3(i_true / a - i_test / b);
}

std::optional<double> sample_metric(Metric metric, const FieldSample& truth, const FieldSample& test) {
  if (truth.masked || test.masked) return std::nullopt;
  switch (metric) {
    case Metric::pe:
      return pressure_error(truth.pressure, test.pressure);
    case Metric::ime:
      return intensity_magnitude_error(truth.intensity, test.intensity);
    case Metric::ide:
      return intensity_direction_error(truth.intensity, test.intensity);
  }
  return std::nullopt;
}

ErrorField compute_error_field(const FieldGrid& truth, const FieldGrid& test) {
  if (truth.samples.size() != test.samples.size()) throw ArgumentError("error field: grids differ in size");
  ErrorField out;
  const std::size_t n = truth.samples.size();
  out.pe.resize(n);
  out.ime.resize(n);
  out.ide.resize(n);
  out.unit_difference.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = truth.samples[i];
    const auto& b = test.samples[i];
    out.pe[i] = sample_metric(Metric::pe, a, b);
    out.ime[i] = sample_metric(Metric::ime, a, b);
    out.ide[i] = sample_metric(Metric::ide, a, b);
    if (!a.masked && !b.masked) out.unit_difference[i] = unit_vector_difference(a.intensity, b.intensity);
  }
  return out;
}

SphereAverage sphere_average(Metric metric, double radius, const FieldEvaluator& truth, const FieldEvaluator& test,
                             int points, const Vec3& center) {
  if (!(radius > 0.0)) throw ArgumentError("sphere_average: radius must be positive");
  const auto grid = fliege_grid(points);
  SphereAverage out;
  out.total = grid->size();
  double sum = 0.0;
  double weight = 0.0;
  for (std::size_t q = 0; q < grid->size(); ++q) {
    const Vec3 x = center + radius * grid->nodes()[q].unit_vector();
    const auto value = sample_metric(metric, sample_or_mask(truth, x), sample_or_mask(test, x));
    if (!value) {
      ++out.masked;
      continue;
    }
    sum += grid->weights()[q] * *value;
    weight += grid->weights()[q];
  }
  if (out.masked == out.total) throw NumericalError("sphere_average: every sample is masked");
  out.value = sum / weight;
  out.valid = static_cast<double>(out.masked) < kMaxMaskedFraction * static_cast<double>(out.total);
  return out;
}

}  // namespace sft
