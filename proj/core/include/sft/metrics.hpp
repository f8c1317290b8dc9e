#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sft/field.hpp"
#include "sft/types.hpp"

namespace sft {

enum class Metric { pe, ime, ide };

std::string to_string(Metric metric);
/// "pe", "ime" or "ide".
Metric parse_metric(const std::string& tag);

/// |P - P~|^2 / |P|^2 * 100. Returns nullopt (masked) when P = 0.
std::optional<double> pressure_error(cplx p_true, cplx p_test);
/// ||I - I~||^2 / ||I||^2 * 100; nullopt when I = 0.
std::optional<double> intensity_magnitude_error(const Vec3& i_true, const Vec3& i_test);
/// arccos of the normalised dot product, as a percentage of pi; nullopt when either vector is 0.
std::optional<double> intensity_direction_error(const Vec3& i_true, const Vec3& i_test);
/// I/||I|| - I~/||I~||; nullopt when either vector is 0.
std::optional<Vec3> unit_vector_difference(const Vec3& i_true, const Vec3& i_test);

/// Metric between two samples; masked samples yield nullopt.
std::optional<double> sample_metric(Metric metric, const FieldSample& truth, const FieldSample& test);

/// Per-point errors over a field grid.
struct ErrorField {
  std::vector<std::optional<double>> pe;
  std::vector<std::optional<double>> ime;
  std::vector<std::optional<double>> ide;
  std::vector<std::optional<Vec3>> unit_difference;

  [[nodiscard]] std::size_t size() const { return pe.size(); }
};

ErrorField compute_error_field(const FieldGrid& truth, const FieldGrid& test);

/// Masked samples may make up at most this fraction of a valid average.
inline constexpr double kMaxMaskedFraction = 0.01;

struct SphereAverage {
  double value = 0.0;
  std::size_t masked = 0;
  std::size_t total = 0;
  /// masked < 1% of total
  bool valid = false;
};

/// Quadrature-weighted mean of a metric over the sphere |x| = radius, sampled
/// on the shipped grid with `points` nodes. Throws NumericalError when every
/// point is masked.
SphereAverage sphere_average(Metric metric, double radius, const FieldEvaluator& truth, const FieldEvaluator& test,
                             int points = 100, const Vec3& center = Vec3::Zero());

}  // namespace sft
