#include "sft/stft.hpp"

#include <cmath>
#include <cstring>
#include <mutex>
#include <string>

#include <fftw3.h>

#include "sft/errors.hpp"

namespace sft {
namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct RealFft::Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (forward != nullptr) fftw_destroy_plan(forward);
    if (inverse != nullptr) fftw_destroy_plan(inverse);
  }
};

RealFft::RealFft(int n) : n_(n), plans_(std::make_unique<Plans>()) {
  if (n < 2 || n % 2 != 0) throw ArgumentError("RealFft: size must be even and >= 2");
  std::vector<double> real(static_cast<std::size_t>(n));
  std::vector<fftw_complex> spec(static_cast<std::size_t>(bin_count()));
  std::lock_guard lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->forward = fftw_plan_dft_r2c_1d(n, real.data(), spec.data(), flags);
  plans_->inverse = fftw_plan_dft_c2r_1d(n, spec.data(), real.data(), flags | FFTW_DESTROY_INPUT);
  if (plans_->forward == nullptr || plans_->inverse == nullptr) throw Error("FFTW planning failed");
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

Spectrum RealFft::forward(std::span<const double> samples) const {
  if (samples.size() != static_cast<std::size_t>(n_)) throw ArgumentError("RealFft::forward: wrong input length");
  std::vector<double> in(samples.begin(), samples.end());
  Spectrum out(static_cast<std::size_t>(bin_count()));
  // std::complex<double> is layout-compatible with fftw_complex.
  fftw_execute_dft_r2c(plans_->forward, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> RealFft::inverse(const Spectrum& bins) const {
  if (bins.size() != static_cast<std::size_t>(bin_count())) throw ArgumentError("RealFft::inverse: wrong bin count");
  Spectrum in = bins;
  std::vector<double> out(static_cast<std::size_t>(n_));
  fftw_execute_dft_c2r(plans_->inverse, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  const double scale = 1.0 / n_;
  for (double& v : out) v *= scale;
  return out;
}

std::vector<double> hann_window(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / n);
  return w;
}

Stft::Stft(int frame_size, int hop_size) : fft_(frame_size), hop_(hop_size), window_(hann_window(frame_size)) {
  if (hop_size <= 0 || hop_size > frame_size) throw ArgumentError("Stft: hop must be in (0, frame_size]");
}

std::size_t Stft::frame_count(std::size_t samples) const {
  const auto n = static_cast<std::size_t>(frame_size());
  if (samples < n) {
    throw ArgumentError("signal has " + std::to_string(samples) + " samples, shorter than one frame (" +
                        std::to_string(n) + ")");
  }
  return (samples - n) / static_cast<std::size_t>(hop_) + 1;
}

std::vector<Spectrum> Stft::analyze(std::span<const double> signal) const {
  const std::size_t count = frame_count(signal.size());
  const auto n = static_cast<std::size_t>(frame_size());
  std::vector<Spectrum> frames;
  frames.reserve(count);
  std::vector<double> buffer(n);
  for (std::size_t f = 0; f < count; ++f) {
    const std::size_t start = f * static_cast<std::size_t>(hop_);
    for (std::size_t i = 0; i < n; ++i) buffer[i] = signal[start + i] * window_[i];
    frames.push_back(fft_.forward(buffer));
  }
  return frames;
}

std::vector<double> Stft::synthesize(const std::vector<Spectrum>& frames) const {
  if (frames.empty()) return {};
  const auto n = static_cast<std::size_t>(frame_size());
  std::vector<double> out((frames.size() - 1) * static_cast<std::size_t>(hop_) + n, 0.0);
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto block = fft_.inverse(frames[f]);
    const std::size_t start = f * static_cast<std::size_t>(hop_);
    for (std::size_t i = 0; i < n; ++i) out[start + i] += block[i];
  }
  return out;
}

}  // namespace sft
