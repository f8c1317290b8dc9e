#include "sft/capture.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sft/errors.hpp"
#include "sft/special.hpp"
#include "sft/stft.hpp"

namespace sft {
namespace {

CMatrix sensor_basis(const QuadratureGrid& grid, int order) {
  CMatrix y(static_cast<Eigen::Index>(grid.size()), HarmonicIndex::count(order));
  for (std::size_t q = 0; q < grid.size(); ++q) {
    y.row(static_cast<Eigen::Index>(q)) = sph_harm_all(order, grid.nodes()[q]).transpose();
  }
  return y;
}

std::shared_ptr<const QuadratureGrid> require_grid(const MicrophoneSpec& spec) {
  if (!spec.sensor_grid.grid) throw ArgumentError("microphone has no sensor grid");
  return spec.sensor_grid.grid;
}

}  // namespace

SphericalCoefficients::SphericalCoefficients(int max_order, CVector coefficients)
    : order(max_order), values(std::move(coefficients)) {
  if (max_order < 0) throw ArgumentError("coefficient order must be >= 0");
  if (values.size() != HarmonicIndex::count(max_order)) {
    throw ArgumentError("expected " + std::to_string(HarmonicIndex::count(max_order)) + " coefficients, got " +
                        std::to_string(values.size()));
  }
}

SphericalCoefficients SphericalCoefficients::zeros(int max_order) {
  return {max_order, CVector::Zero(HarmonicIndex::count(max_order))};
}

SphericalCoefficients SphericalCoefficients::truncated(int max_order) const {
  SphericalCoefficients out = zeros(max_order);
  const Eigen::Index n = std::min(out.values.size(), values.size());
  out.values.head(n) = values.head(n);
  out.ill_conditioned = ill_conditioned;
  return out;
}

SphericalCoefficients analytic_source_coefficients(const Vec3& source, double k, int max_order, cplx gain) {
  const double r = source.norm();
  if (r == 0.0) throw SingularityError("point source at the expansion origin");
  if (!(k > 0.0)) throw ArgumentError("wavenumber must be positive");
  const auto h = sph_hankel1_array(max_order, k * r);
  const CVector y = sph_harm_all(max_order, Direction::from_vector(source));
  CVector alpha(y.size());
  for (int n = 0; n <= max_order; ++n) {
    const cplx radial = kI * k * h[n] * gain;
    for (int m = -n; m <= n; ++m) {
      const int i = n * n + n + m;
      alpha[i] = radial * std::conj(y[i]);
    }
  }
  return {max_order, std::move(alpha)};
}

MicrophoneArray::MicrophoneArray(const MicrophoneSpec& spec)
    : spec_(spec),
      grid_(require_grid(spec)),
      transform_(grid_, spec.order),
      simulation_basis_(sensor_basis(*grid_, std::max(spec.simulation_order, spec.order))) {
  if (!(spec.radius > 0.0)) throw ArgumentError("microphone radius must be positive");
}

const CMatrix& MicrophoneArray::basis_for(int order) const {
  if (order > std::max(spec_.simulation_order, spec_.order)) {
    throw ArgumentError("field order " + std::to_string(order) + " exceeds the array's simulation order");
  }
  return simulation_basis_;
}

CVector MicrophoneArray::simulate(const SphericalCoefficients& alpha, double k) const {
  const double ka = k * spec_.radius;
  if (!(ka > 0.0)) throw SingularityError("k*a must be positive to simulate a rigid-sphere array");
  const CMatrix& basis = basis_for(alpha.order);
  CVector scaled(alpha.values.size());
  for (int n = 0; n <= alpha.order; ++n) {
    const cplx b = rigid_baffle_b(n, ka);
    for (int m = -n; m <= n; ++m) scaled[n * n + n + m] = alpha.values[n * n + n + m] * b;
  }
  return basis.leftCols(scaled.size()) * scaled;
}

SphericalCoefficients MicrophoneArray::estimate(const CVector& pressures, double k) const {
  const double ka = k * spec_.radius;
  if (!(ka > 0.0)) throw SingularityError("k*a must be positive to invert the rigid-sphere response");
  const int order = spec_.order;
  std::vector<cplx> b(static_cast<std::size_t>(order + 1));
  double largest = 0.0;
  for (int n = 0; n <= order; ++n) {
    b[n] = rigid_baffle_b(n, ka);
    largest = std::max(largest, std::abs(b[n]));
  }
  const double floor = kBaffleFloor * largest;
  SphericalCoefficients out(order, transform_.analyze(pressures));
  for (int n = 0; n <= order; ++n) {
    cplx divisor = b[n];
    if (std::abs(b[n]) < floor) {
      divisor = b[n] + floor * b[n] / std::abs(b[n]);
      out.ill_conditioned = true;
    }
    for (int m = -n; m <= n; ++m) out.values[n * n + n + m] /= divisor;
  }
  return out;
}

CVector simulate_sensor_pressures(const SphericalCoefficients& alpha_true, const MicrophoneSpec& mic, double k) {
  MicrophoneSpec spec = mic;
  spec.simulation_order = std::max(spec.simulation_order, alpha_true.order);
  return MicrophoneArray(spec).simulate(alpha_true, k);
}

SphericalCoefficients estimate_coefficients(const CVector& pressures, const MicrophoneSpec& mic, double k) {
  return MicrophoneArray(mic).estimate(pressures, k);
}

SphericalCoefficients record_scene(const Scene& scene, const MicrophoneArray& array, double hz) {
  const double k = scene.wavenumber(hz);
  const int sim = array.spec().simulation_order;
  SphericalCoefficients field = SphericalCoefficients::zeros(sim);
  for (const auto& src : scene.sources) field.values += analytic_source_coefficients(src.position, k, sim).values;
  return array.estimate(array.simulate(field, k), k);
}

CoefficientFrames capture_stft(const Scene& scene, const std::vector<std::vector<double>>& signals) {
  if (signals.size() != scene.sources.size()) {
    throw ArgumentError("capture_stft: expected one signal per source (" + std::to_string(scene.sources.size()) +
                        "), got " + std::to_string(signals.size()));
  }
  const Stft stft(scene.frame_size, scene.hop_size);
  const MicrophoneArray array(scene.microphone);
  const int bins = stft.bin_count();
  const int order = scene.microphone.order;
  const int sim = scene.microphone.simulation_order;

  // Unit-gain recording transfer per source and bin (DC carries no field).
  std::vector<std::vector<SphericalCoefficients>> transfer(scene.sources.size());
  for (std::size_t s = 0; s < scene.sources.size(); ++s) {
    transfer[s].push_back(SphericalCoefficients::zeros(order));
    for (int bin = 1; bin < bins; ++bin) {
      const double k = scene.wavenumber(stft.bin_frequency(bin, scene.sample_rate));
      const auto field = analytic_source_coefficients(scene.sources[s].position, k, sim);
      transfer[s].push_back(array.estimate(array.simulate(field, k), k));
    }
  }

  CoefficientFrames out;
  out.order = order;
  out.sample_rate = scene.sample_rate;
  out.frame_size = scene.frame_size;
  out.hop_size = scene.hop_size;
  for (std::size_t s = 0; s < signals.size(); ++s) {
    const auto spectra = stft.analyze(signals[s]);
    if (s == 0) {
      out.frames.assign(spectra.size(), std::vector<SphericalCoefficients>(static_cast<std::size_t>(bins),
                                                                           SphericalCoefficients::zeros(order)));
    } else if (spectra.size() != out.frames.size()) {
      throw ArgumentError("capture_stft: source signals differ in length");
    }
    for (std::size_t f = 0; f < spectra.size(); ++f) {
      for (int bin = 0; bin < bins; ++bin) {
        auto& dst = out.frames[f][bin];
        dst.values += transfer[s][bin].values * spectra[f][bin];
        dst.ill_conditioned = dst.ill_conditioned || transfer[s][bin].ill_conditioned;
      }
    }
  }
  return out;
}

}  // namespace sft
