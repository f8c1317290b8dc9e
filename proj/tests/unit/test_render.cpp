#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "sft/errors.hpp"
#include "sft/render.hpp"
#include "sft/stft.hpp"
#include "support.hpp"

using namespace sft;

namespace {

constexpr double kFs = 16000.0;

const Pipeline& pipeline() {
  static const Pipeline p(test::reference_scene());
  return p;
}

struct Tone {
  double hz;
  double amplitude;
  double phase;
};

std::vector<double> tones(const std::vector<Tone>& parts, std::size_t n) {
  std::vector<double> x(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& t : parts) x[i] += t.amplitude * std::cos(2.0 * kPi * t.hz * i / kFs + t.phase);
  }
  return x;
}

std::vector<double> noise(std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  for (auto& v : x) v = g(test::rng());
  return x;
}

// 20 log10(rms(a - b) / rms(b)) over [from, to).
double error_db(const std::vector<double>& a, const std::vector<double>& b, std::size_t from, std::size_t to) {
  double err = 0.0;
  double ref = 0.0;
  for (std::size_t i = from; i < to; ++i) {
    err += (a[i] - b[i]) * (a[i] - b[i]);
    ref += b[i] * b[i];
  }
  return 10.0 * std::log10(err / ref);
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Stft, AnalyzeSynthesizeIsIdentityInTheInterior) {
  const Stft stft(4096, 2048);
  EXPECT_EQ(stft.bin_count(), 2049);
  const auto x = noise(4096 + 2048 * 9);
  const auto y = stft.synthesize(stft.analyze(x));
  ASSERT_EQ(y.size(), x.size());
  double worst = 0.0;
  for (std::size_t i = 2048; i < x.size() - 2048; ++i) worst = std::max(worst, std::abs(y[i] - x[i]));
  EXPECT_LT(worst, 1e-6);
}

TEST(Stft, DcOnlyInBinZero) {
  const Stft stft(4096, 2048);
  const auto frames = stft.analyze(std::vector<double>(8192, 0.5));
  for (const auto& f : frames) {
    EXPECT_GT(std::abs(f[0]), 1.0);
    // The Hann window spreads DC into bin 1 only.
    for (std::size_t b = 2; b < f.size(); ++b) EXPECT_LT(std::abs(f[b]), 1e-9) << b;
  }
}

TEST(Stft, OneKilohertzPeaksAtBin256) {
  const Stft stft(4096, 2048);
  const auto frames = stft.analyze(tones({{1000.0, 1.0, 0.3}}, 16000));
  EXPECT_EQ(frames.size(), static_cast<std::size_t>((16000 - 4096) / 2048 + 1));
  for (const auto& f : frames) {
    std::size_t peak = 0;
    for (std::size_t b = 0; b < f.size(); ++b) {
      if (std::abs(f[b]) > std::abs(f[peak])) peak = b;
    }
    EXPECT_EQ(peak, 256u);
  }
  EXPECT_DOUBLE_EQ(stft.bin_frequency(256, kFs), 1000.0);
}

TEST(Stft, ShortSignalRejected) {
  const Stft stft(4096, 2048);
  EXPECT_THROW((void)stft.analyze(std::vector<double>(4095, 0.0)), ArgumentError);
  EXPECT_THROW(Stft(4096, 0), ArgumentError);
}

TEST(Stft, PeriodicHannOverlapAddsToOne) {
  const auto w = hann_window(4096);
  for (int i = 0; i < 2048; ++i) EXPECT_NEAR(w[i] + w[i + 2048], 1.0, 1e-15);
  EXPECT_EQ(w[0], 0.0);
  EXPECT_EQ(w[2048], 1.0);
}

TEST(Render, StaticReferenceMatchesDirectFiltering) {
  // Steady-state response of the free-field ear transfer to off-bin tones.
  const std::vector<Tone> parts{{313.7, 1.0, 0.2}, {1234.5, 0.6, -1.1}, {2900.2, 0.3, 2.0}};
  const std::size_t n = 4096 + 2048 * 12;
  const auto out = render_trajectory(pipeline(), Method::reference, Trajectory::stationary(Vec3::Zero()),
                                     tones(parts, n));
  ASSERT_EQ(out.channels.size(), 2u);
  ASSERT_EQ(out.frames(), n);
  const Scene& s = pipeline().scene();
  const auto ears = pipeline().ears();
  for (Ear ear : {Ear::left, Ear::right}) {
    std::vector<Tone> filtered;
    for (const auto& t : parts) {
      const cplx h = ear_transfer_point(s.sources[0].position, Vec3::Zero(), ears.offset(ear), s.wavenumber(t.hz));
      filtered.push_back({t.hz, t.amplitude * std::abs(h), t.phase + std::arg(h)});
    }
    const auto expected = tones(filtered, n);
    const auto& got = out.channels[ear == Ear::left ? 0 : 1];
    EXPECT_LT(error_db(got, expected, 4096, n - 4096), -60.0);
  }
}

TEST(Render, SilenceInSilenceOut) {
  const auto out = render_trajectory(pipeline(), Method::pw_cf,
                                     linear_trajectory(Vec3::Zero(), {0.0, 0.5, 0.0}, 1.0, 10),
                                     std::vector<double>(16000, 0.0));
  for (const auto& c : out.channels) {
    for (double v : c) ASSERT_EQ(v, 0.0);
  }
}

TEST(Render, ChainIsLinearInTheSource) {
  const auto path = linear_trajectory(Vec3::Zero(), {0.0, 0.5, 0.0}, 1.5, 20);
  const std::size_t n = 4096 + 2048 * 8;
  const auto a = noise(n);
  const auto b = tones({{440.0, 0.5, 0.0}, {2000.0, 0.2, 1.0}}, n);
  std::vector<double> sum(n);
  for (std::size_t i = 0; i < n; ++i) sum[i] = a[i] + b[i];
  const auto ya = render_trajectory(pipeline(), Method::pw_cf, path, a);
  const auto yb = render_trajectory(pipeline(), Method::pw_cf, path, b);
  const auto ys = render_trajectory(pipeline(), Method::pw_cf, path, sum);
  for (int c = 0; c < 2; ++c) {
    std::vector<double> parts(n);
    for (std::size_t i = 0; i < n; ++i) parts[i] = ya.channels[c][i] + yb.channels[c][i];
    EXPECT_LT(error_db(parts, ys.channels[c], 0, n), -80.0);
  }
}

TEST(Render, BinTransfersMatchDirectBrir) {
  const Stft stft(4096, 2048);
  const Vec3 d(0.0, 0.5, 0.0);
  for (Method m : {Method::reference, Method::anchor, Method::pw_cf}) {
    const BinTransfers transfers(pipeline(), m, stft);
    const auto h = transfers.at(d);
    ASSERT_EQ(h.size(), 2049u);
    if (m != Method::reference) EXPECT_EQ(h[0].left, cplx(0.0, 0.0));
    std::vector<double> freqs;
    const std::vector<int> bins{1, 100, 256, 1024, 2048};
    for (int b : bins) freqs.push_back(stft.bin_frequency(b, kFs));
    const auto brir = compute_brir(m, pipeline(), d, freqs);
    for (std::size_t i = 0; i < bins.size(); ++i) {
      EXPECT_LT(std::abs(h[bins[i]].left - brir.bins[i].left), 1e-10 * std::abs(brir.bins[i].left)) << to_string(m);
      EXPECT_LT(std::abs(h[bins[i]].right - brir.bins[i].right), 1e-10 * std::abs(brir.bins[i].right));
    }
  }
}

TEST(Render, MixedwaveTrajectoryEscapeNamesFrame) {
  // Frame centres at 0.128 s + f * 0.128 s; |d| reaches the 2 m shell at t = 0.5 s, i.e. frame 3.
  const auto path = linear_trajectory(Vec3::Zero(), {0.0, 4.0, 0.0}, 1.0, 4);
  try {
    (void)render_trajectory(pipeline(), Method::mw_cf, path, std::vector<double>(16000, 0.0));
    FAIL() << "expected RegionError";
  } catch (const RegionError& e) {
    EXPECT_NE(std::string(e.what()).find("frame 3"), std::string::npos) << e.what();
  }
}

TEST(Trajectory, InterpolatesAndClamps) {
  const Trajectory t({{0.0, {0.0, 0.0, 0.0}}, {1.0, {0.0, 1.0, 0.0}}, {3.0, {2.0, 1.0, 0.0}}});
  EXPECT_EQ(t.position_at(-1.0), Vec3(0.0, 0.0, 0.0));
  EXPECT_LT((t.position_at(0.25) - Vec3(0.0, 0.25, 0.0)).norm(), 1e-15);
  EXPECT_LT((t.position_at(2.0) - Vec3(1.0, 1.0, 0.0)).norm(), 1e-15);
  EXPECT_EQ(t.position_at(10.0), Vec3(2.0, 1.0, 0.0));
  EXPECT_EQ(Trajectory::stationary({1.0, 2.0, 3.0}).position_at(5.0), Vec3(1.0, 2.0, 3.0));
}

TEST(Trajectory, RejectsBadPoints) {
  EXPECT_THROW(Trajectory(std::vector<TrajectoryPoint>{}), ValidationError);
  EXPECT_THROW(Trajectory({{0.0, Vec3::Zero()}, {0.0, Vec3::Zero()}}), ValidationError);
  EXPECT_THROW(Trajectory({{0.0, Vec3(NAN, 0.0, 0.0)}}), ValidationError);
  EXPECT_THROW(linear_trajectory(Vec3::Zero(), Vec3::UnitX(), 0.0, 3), ArgumentError);
}

TEST(Trajectory, CsvRoundTrip) {
  const auto dir = temp_dir("sft_test_trajectory");
  const auto t = linear_trajectory(Vec3::Zero(), {0.0, 0.5, 0.0}, 5.0, 10);
  t.save_csv(dir / "path.csv");
  const auto back = Trajectory::load_csv(dir / "path.csv");
  ASSERT_EQ(back.points().size(), 11u);
  for (std::size_t i = 0; i < back.points().size(); ++i) {
    EXPECT_EQ(back.points()[i].t, t.points()[i].t);
    EXPECT_EQ(back.points()[i].position, t.points()[i].position);
  }
  {
    std::ofstream bad(dir / "bad.csv");
    bad << "time,x,y,z\n0,0,0,0\n";
  }
  EXPECT_THROW(Trajectory::load_csv(dir / "bad.csv"), ParseError);
  std::filesystem::remove_all(dir);
}

TEST(Wav, Float32RoundTripIsExactForFloatValues) {
  const auto dir = temp_dir("sft_test_wav");
  AudioBuffer a;
  a.sample_rate = kFs;
  a.channels = {{0.0, 0.5, -0.25, 1.0}, {0.125, -1.0, 0.75, 0.0}};
  write_wav(dir / "a.wav", a);
  const auto b = read_wav(dir / "a.wav");
  EXPECT_EQ(b.sample_rate, kFs);
  EXPECT_EQ(b.channels, a.channels);
  EXPECT_EQ(std::filesystem::file_size(dir / "a.wav"), 44u + 4u * 2u * 4u);
  std::filesystem::remove_all(dir);
}

TEST(Wav, ReadsPcm16) {
  const auto dir = temp_dir("sft_test_wav16");
  const std::vector<std::int16_t> samples{0, 16384, -32768, 32767};
  {
    std::ofstream out(dir / "p.wav", std::ios::binary);
    auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
    auto u16 = [&](std::uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };
    out.write("RIFF", 4);
    u32(36 + 8);
    out.write("WAVEfmt ", 8);
    u32(16);
    u16(1);
    u16(1);
    u32(8000);
    u32(16000);
    u16(2);
    u16(16);
    out.write("data", 4);
    u32(8);
    out.write(reinterpret_cast<const char*>(samples.data()), 8);
  }
  const auto a = read_wav(dir / "p.wav");
  EXPECT_EQ(a.sample_rate, 8000.0);
  ASSERT_EQ(a.channels.size(), 1u);
  EXPECT_EQ(a.channels[0], (std::vector<double>{0.0, 0.5, -1.0, 32767.0 / 32768.0}));
  std::filesystem::remove_all(dir);
}

TEST(Wav, RejectsGarbage) {
  const auto dir = temp_dir("sft_test_wav_bad");
  {
    std::ofstream out(dir / "x.wav", std::ios::binary);
    out << "not a wave file at all";
  }
  EXPECT_THROW(read_wav(dir / "x.wav"), ParseError);
  EXPECT_THROW(read_wav(dir / "missing.wav"), ParseError);
  std::filesystem::remove_all(dir);
}
