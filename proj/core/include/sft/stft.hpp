#pragma once

#include <memory>
#include <span>
#include <vector>

#include "sft/types.hpp"

namespace sft {

using Spectrum = std::vector<cplx>;

/// Real FFT of fixed length n (FFTW). Thread-safe after construction.
class RealFft {
 public:
  explicit RealFft(int n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;

  [[nodiscard]] int size() const { return n_; }
  [[nodiscard]] int bin_count() const { return n_ / 2 + 1; }
  /// Forward transform of n samples to n/2+1 bins (unnormalised).
  [[nodiscard]] Spectrum forward(std::span<const double> samples) const;
  /// Inverse of `forward`, including the 1/n factor.
  [[nodiscard]] std::vector<double> inverse(const Spectrum& bins) const;

 private:
  struct Plans;
  int n_;
  std::unique_ptr<Plans> plans_;
};

/// Periodic Hann window, which overlap-adds to exactly 1 at 50% hop.
std::vector<double> hann_window(int n);

/// Block short-time Fourier transform: Hann analysis window, plain overlap-add synthesis.
class Stft {
 public:
  Stft(int frame_size, int hop_size);

  [[nodiscard]] int frame_size() const { return fft_.size(); }
  [[nodiscard]] int hop_size() const { return hop_; }
  [[nodiscard]] int bin_count() const { return fft_.bin_count(); }
  [[nodiscard]] const std::vector<double>& window() const { return window_; }

  /// floor((samples - frame) / hop) + 1; throws ArgumentError when samples < frame.
  [[nodiscard]] std::size_t frame_count(std::size_t samples) const;
  [[nodiscard]] std::vector<Spectrum> analyze(std::span<const double> signal) const;
  /// Overlap-add of the inverse frames; output length (frames-1)*hop + frame.
  [[nodiscard]] std::vector<double> synthesize(const std::vector<Spectrum>& frames) const;

  /// Centre frequency of `bin` in Hz.
  [[nodiscard]] double bin_frequency(int bin, double sample_rate) const {
    return bin * sample_rate / frame_size();
  }

 private:
  RealFft fft_;
  int hop_;
  std::vector<double> window_;
};

}  // namespace sft
