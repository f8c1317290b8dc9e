#include "sft/render.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sft/errors.hpp"
#include "sft/parallel.hpp"

namespace sft {
namespace {

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}
std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

void put32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                              static_cast<char>(v >> 24)};
  out.write(b.data(), 4);
}
void put16(std::ostream& out, std::uint16_t v) {
  const std::array<char, 2> b{static_cast<char>(v), static_cast<char>(v >> 8)};
  out.write(b.data(), 2);
}

constexpr std::uint16_t kPcm = 1;
constexpr std::uint16_t kFloat = 3;
constexpr std::uint16_t kExtensible = 0xFFFE;

}  // namespace

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open audio file " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const std::string name = path.string();
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw ParseError(name + ": not a RIFF/WAVE file");
  }
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::uint32_t size = le32(chunk + 4);
    if (pos + 8 + size > bytes.size()) throw ParseError(name + ": truncated chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw ParseError(name + ": short fmt chunk");
      format = le16(chunk + 8);
      channels = le16(chunk + 10);
      rate = le32(chunk + 12);
      bits = le16(chunk + 22);
      if (format == kExtensible && size >= 40) format = le16(chunk + 8 + 24);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = size;
    }
    pos += 8 + size + (size & 1u);
  }
  if (channels == 0 || rate == 0) throw ParseError(name + ": missing fmt chunk");
  if (data == nullptr) throw ParseError(name + ": missing data chunk");
  const bool pcm16 = format == kPcm && bits == 16;
  const bool f32 = format == kFloat && bits == 32;
  if (!pcm16 && !f32) throw ParseError(name + ": only 16-bit PCM and 32-bit float WAV are supported");

  const std::size_t width = bits / 8;
  const std::size_t frames = data_size / (width * channels);
  AudioBuffer audio;
  audio.sample_rate = rate;
  audio.channels.assign(channels, std::vector<double>(frames));
  for (std::size_t i = 0; i < frames; ++i) {
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* p = data + (i * channels + c) * width;
      if (pcm16) {
        audio.channels[c][i] = static_cast<std::int16_t>(le16(p)) / 32768.0;
      } else {
        audio.channels[c][i] = std::bit_cast<float>(le32(p));
      }
    }
  }
  return audio;
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& audio) {
  if (audio.channels.empty()) throw ArgumentError("write_wav: no channels");
  if (!(audio.sample_rate > 0.0)) throw ArgumentError("write_wav: sample rate must be positive");
  const std::size_t frames = audio.frames();
  for (const auto& c : audio.channels) {
    if (c.size() != frames) throw ArgumentError("write_wav: channels differ in length");
  }
  const auto channels = static_cast<std::uint16_t>(audio.channels.size());
  const auto rate = static_cast<std::uint32_t>(std::lround(audio.sample_rate));
  const auto data_size = static_cast<std::uint32_t>(frames * channels * 4);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write("RIFF", 4);
  put32(out, 36 + data_size);
  out.write("WAVEfmt ", 8);
  put32(out, 16);
  put16(out, kFloat);
  put16(out, channels);
  put32(out, rate);
  put32(out, rate * channels * 4);
  put16(out, static_cast<std::uint16_t>(channels * 4));
  put16(out, 32);
  out.write("data", 4);
  put32(out, data_size);
  for (std::size_t i = 0; i < frames; ++i) {
    for (const auto& c : audio.channels) put32(out, std::bit_cast<std::uint32_t>(static_cast<float>(c[i])));
  }
}

Trajectory::Trajectory(std::vector<TrajectoryPoint> points) : points_(std::move(points)) {
  if (points_.empty()) throw ValidationError("trajectory: at least one point is required");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].t) || !points_[i].position.allFinite()) {
      throw ValidationError("trajectory[" + std::to_string(i) + "]: non-finite value");
    }
    if (i > 0 && !(points_[i].t > points_[i - 1].t)) {
      throw ValidationError("trajectory[" + std::to_string(i) + "].t_sec: times must increase strictly");
    }
  }
}

Trajectory Trajectory::stationary(const Vec3& position) { return Trajectory({{0.0, position}}); }

Trajectory Trajectory::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trajectory file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }), line.end());
  if (line != "t_sec,x,y,z") throw ParseError(path.string() + ": header must be 't_sec,x,y,z'");
  std::vector<TrajectoryPoint> points;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::array<double, 4> v{};
    std::string cell;
    for (int i = 0; i < 4; ++i) {
      if (!std::getline(fields, cell, ',')) throw ParseError(path.string() + ":" + std::to_string(row) + ": expected 4 columns");
      try {
        v[i] = std::stod(cell);
      } catch (const std::exception&) {
        throw ParseError(path.string() + ":" + std::to_string(row) + ": non-numeric value");
      }
    }
    points.push_back({v[0], {v[1], v[2], v[3]}});
  }
  return Trajectory(std::move(points));
}

void Trajectory::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(12);
  out << "t_sec,x,y,z\n";
  for (const auto& p : points_) {
    out << p.t << ',' << p.position.x() << ',' << p.position.y() << ',' << p.position.z() << '\n';
  }
}

Vec3 Trajectory::position_at(double t) const {
  if (points_.empty()) throw ArgumentError("empty trajectory");
  if (t <= points_.front().t) return points_.front().position;
  if (t >= points_.back().t) return points_.back().position;
  const auto it = std::upper_bound(points_.begin(), points_.end(), t,
                                   [](double value, const TrajectoryPoint& p) { return value < p.t; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  const double u = (t - a.t) / (b.t - a.t);
  return (1.0 - u) * a.position + u * b.position;
}

Trajectory linear_trajectory(const Vec3& from, const Vec3& to, double duration, int steps) {
  if (steps < 1 || !(duration > 0.0)) throw ArgumentError("linear_trajectory: need steps >= 1 and duration > 0");
  std::vector<TrajectoryPoint> points;
  for (int i = 0; i <= steps; ++i) {
    const double u = static_cast<double>(i) / steps;
    points.push_back({u * duration, (1.0 - u) * from + u * to});
  }
  return Trajectory(std::move(points));
}

BinTransfers::BinTransfers(const Pipeline& pipeline, Method method, const Stft& stft)
    : pipeline_(&pipeline), method_(method), bins_(static_cast<std::size_t>(stft.bin_count())) {
  const double fs = pipeline.scene().sample_rate;
  parallel_for(bins_.size(), [&](std::size_t bin) {
    const double hz = stft.bin_frequency(static_cast<int>(bin), fs);
    if (bin == 0 && method != Method::reference) return;
    bins_[bin] = pipeline.prepare(method, hz);
  });
}

std::vector<BinauralPair> BinTransfers::at(const Vec3& d) const {
  const auto ears = pipeline_->ears();
  std::vector<BinauralPair> out(bins_.size());
  for (std::size_t b = 0; b < bins_.size(); ++b) {
    if (bins_[b]) out[b] = bins_[b]->auralize(pipeline_->scene(), d, ears);
  }
  return out;
}

AudioBuffer render_trajectory(const Pipeline& pipeline, Method method, const Trajectory& trajectory,
                              const std::vector<double>& source) {
  const Scene& scene = pipeline.scene();
  const Stft stft(scene.frame_size, scene.hop_size);
  const auto spectra = stft.analyze(source);
  if (is_expansion(method) && model_of(method) == SourceModel::mixedwave) {
    const double limit = pipeline.distribution(SourceModel::mixedwave)->near_radius();
    for (std::size_t f = 0; f < spectra.size(); ++f) {
      const double t = (static_cast<double>(f) * stft.hop_size() + 0.5 * stft.frame_size()) / scene.sample_rate;
      if (!(trajectory.position_at(t).norm() < limit)) {
        throw RegionError("trajectory leaves the near shell at frame " + std::to_string(f));
      }
    }
  }
  const BinTransfers transfers(pipeline, method, stft);
  std::vector<Spectrum> left(spectra.size());
  std::vector<Spectrum> right(spectra.size());
  parallel_for(spectra.size(), [&](std::size_t f) {
    const double t = (static_cast<double>(f) * stft.hop_size() + 0.5 * stft.frame_size()) / scene.sample_rate;
    const auto h = transfers.at(trajectory.position_at(t));
    left[f].resize(h.size());
    right[f].resize(h.size());
    for (std::size_t b = 0; b < h.size(); ++b) {
      left[f][b] = spectra[f][b] * h[b].left;
      right[f][b] = spectra[f][b] * h[b].right;
    }
  });
  AudioBuffer out;
  out.sample_rate = scene.sample_rate;
  out.channels.push_back(stft.synthesize(left));
  out.channels.push_back(stft.synthesize(right));
  return out;
}

}  // namespace sft
