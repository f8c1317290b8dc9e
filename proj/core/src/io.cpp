#include "sft/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "sft/errors.hpp"

namespace sft {
namespace {

constexpr std::uint32_t kFormatVersion = 1;

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw Error("cannot write " + path.string());
  }
  void bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
  void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    const std::array<char, 4> b{static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                                static_cast<char>(v >> 24)};
    bytes(b.data(), 4);
  }
  void u64(std::uint64_t v) {
    u32(static_cast<std::uint32_t>(v));
    u32(static_cast<std::uint32_t>(v >> 32));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void c64(cplx v) {
    f32(static_cast<float>(v.real()));
    f32(static_cast<float>(v.imag()));
  }
  void close() {
    out_.close();
    if (!out_) throw Error("write failed: " + path_.string());
  }

 private:
  std::ofstream out_;
  std::filesystem::path path_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : name_(path.string()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + name_);
    data_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw ParseError(name_ + ": unexpected end of file");
  }
  std::string tag() {
    need(4);
    std::string t(data_.data() + pos_, 4);
    pos_ += 4;
    return t;
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[pos_++]);
  }
  std::uint32_t u32() {
    need(4);
    const auto* p = reinterpret_cast<const unsigned char*>(data_.data() + pos_);
    pos_ += 4;
    return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
           static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
  }
  std::uint64_t u64() {
    const std::uint64_t lo = u32();
    const std::uint64_t hi = u32();
    return lo | hi << 32;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  cplx c64() {
    const float re = f32();
    const float im = f32();
    return {re, im};
  }
  void expect_end() const {
    if (pos_ != data_.size()) throw ParseError(name_ + ": trailing bytes");
  }
  [[nodiscard]] const std::string& name() const { return name_; }

 private:
  std::string name_;
  std::vector<char> data_;
  std::size_t pos_ = 0;
};

std::ofstream open_text(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? format_number(*v) : "nan"; }

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return {buf.data(), res.ptr};
}

void write_coefficients(const std::filesystem::path& path, const CoefficientFile& file) {
  const std::size_t bins = file.frequencies.size();
  for (const auto& frame : file.frames) {
    if (frame.size() != bins) throw ArgumentError("coefficient frame has the wrong bin count");
  }
  Writer w(path);
  w.bytes("SFC1", 4);
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(file.order));
  w.u32(static_cast<std::uint32_t>(bins));
  w.u32(static_cast<std::uint32_t>(file.frames.size()));
  w.f64(file.sample_rate);
  w.u32(static_cast<std::uint32_t>(file.frame_size));
  w.u32(static_cast<std::uint32_t>(file.hop_size));
  for (double f : file.frequencies) w.f64(f);
  for (const auto& frame : file.frames) {
    for (const auto& c : frame) w.u8(c.ill_conditioned ? 1 : 0);
  }
  const Eigen::Index count = HarmonicIndex::count(file.order);
  for (const auto& frame : file.frames) {
    for (const auto& c : frame) {
      if (c.values.size() != count) throw ArgumentError("coefficient vector has the wrong length");
      for (Eigen::Index i = 0; i < count; ++i) w.c64(c.values[i]);
    }
  }
  w.close();
}

CoefficientFile read_coefficients(const std::filesystem::path& path) {
  Reader r(path);
  if (r.tag() != "SFC1") throw ParseError(r.name() + ": not an SFC1 coefficient file");
  if (r.u32() != kFormatVersion) throw ParseError(r.name() + ": unsupported SFC1 version");
  CoefficientFile file;
  file.order = static_cast<int>(r.u32());
  const std::uint32_t bins = r.u32();
  const std::uint32_t frames = r.u32();
  file.sample_rate = r.f64();
  file.frame_size = static_cast<int>(r.u32());
  file.hop_size = static_cast<int>(r.u32());
  if (file.order > 1000) throw ParseError(r.name() + ": implausible order");
  const Eigen::Index count = HarmonicIndex::count(file.order);
  r.need(static_cast<std::size_t>(bins) * 8 + static_cast<std::size_t>(bins) * frames * (1 + 8 * count));
  for (std::uint32_t b = 0; b < bins; ++b) file.frequencies.push_back(r.f64());
  file.frames.assign(frames, std::vector<SphericalCoefficients>(bins, SphericalCoefficients::zeros(file.order)));
  for (auto& frame : file.frames) {
    for (auto& c : frame) c.ill_conditioned = r.u8() != 0;
  }
  for (auto& frame : file.frames) {
    for (auto& c : frame) {
      for (Eigen::Index i = 0; i < count; ++i) c.values[i] = r.c64();
    }
  }
  r.expect_end();
  return file;
}

void write_coefficients_csv(const std::filesystem::path& path, const CoefficientFile& file) {
  auto out = open_text(path);
  out << "frame,freq_hz,n,m,re,im\n";
  for (std::size_t f = 0; f < file.frames.size(); ++f) {
    for (std::size_t b = 0; b < file.frequencies.size(); ++b) {
      const auto& c = file.frames[f][b];
      for (int n = 0; n <= c.order; ++n) {
        for (int m = -n; m <= n; ++m) {
          const cplx v = c(n, m);
          out << f << ',' << format_number(file.frequencies[b]) << ',' << n << ',' << m << ','
              << format_number(v.real()) << ',' << format_number(v.imag()) << '\n';
        }
      }
    }
  }
}

DrivingFunction DrivingFile::at(std::size_t bin) const {
  DrivingFunction d;
  d.method = method;
  d.distribution = distribution;
  d.gains = gains.at(bin);
  d.weighted = weighted;
  return d;
}

void write_driving(const std::filesystem::path& path, const DrivingFile& file) {
  if (!file.distribution) throw ArgumentError("driving file has no distribution");
  if (file.gains.size() != file.frequencies.size()) throw ArgumentError("driving file: one gain vector per bin");
  const auto& sources = file.distribution->sources();
  Writer w(path);
  w.bytes("SFD1", 4);
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(file.method));
  w.u32(file.distribution->model() == SourceModel::planewave ? 0u : 1u);
  w.u8(file.weighted ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(sources.size()));
  for (const auto& s : sources) {
    w.f64(s.direction.theta);
    w.f64(s.direction.phi);
    w.f64(s.far_field() ? 0.0 : s.radius);
    w.f64(s.weight);
  }
  w.u32(static_cast<std::uint32_t>(file.frequencies.size()));
  for (double f : file.frequencies) w.f64(f);
  for (const auto& g : file.gains) {
    if (g.size() != static_cast<Eigen::Index>(sources.size())) throw ArgumentError("gain vector has the wrong length");
    for (Eigen::Index l = 0; l < g.size(); ++l) w.c64(g[l]);
  }
  w.close();
}

DrivingFile read_driving(const std::filesystem::path& path) {
  Reader r(path);
  if (r.tag() != "SFD1") throw ParseError(r.name() + ": not an SFD1 driving-function file");
  if (r.u32() != kFormatVersion) throw ParseError(r.name() + ": unsupported SFD1 version");
  DrivingFile file;
  const std::uint32_t method = r.u32();
  if (method > static_cast<std::uint32_t>(Method::mw_irls)) throw ParseError(r.name() + ": unknown method tag");
  file.method = static_cast<Method>(method);
  const std::uint32_t model = r.u32();
  if (model > 1) throw ParseError(r.name() + ": unknown model tag");
  file.weighted = r.u8() != 0;
  const std::uint32_t count = r.u32();
  r.need(static_cast<std::size_t>(count) * 32);
  std::vector<VirtualSource> sources;
  for (std::uint32_t l = 0; l < count; ++l) {
    VirtualSource s;
    s.direction.theta = r.f64();
    s.direction.phi = r.f64();
    const double radius = r.f64();
    s.radius = model == 0 ? std::numeric_limits<double>::infinity() : radius;
    s.weight = r.f64();
    s.unit = s.direction.unit_vector();
    sources.push_back(s);
  }
  try {
    file.distribution = std::make_shared<const VirtualDistribution>(
        model == 0 ? SourceModel::planewave : SourceModel::mixedwave, std::move(sources));
  } catch (const ArgumentError& e) {
    throw ParseError(r.name() + ": " + e.what());
  }
  const std::uint32_t bins = r.u32();
  r.need(static_cast<std::size_t>(bins) * (8 + 8 * static_cast<std::size_t>(count)));
  for (std::uint32_t b = 0; b < bins; ++b) file.frequencies.push_back(r.f64());
  for (std::uint32_t b = 0; b < bins; ++b) {
    CVector g(count);
    for (std::uint32_t l = 0; l < count; ++l) g[l] = r.c64();
    file.gains.push_back(std::move(g));
  }
  r.expect_end();
  return file;
}

void write_driving_csv(const std::filesystem::path& path, const DrivingFile& file) {
  auto out = open_text(path);
  out << "freq_hz,source,theta,phi,radius,re,im\n";
  const auto& sources = file.distribution->sources();
  for (std::size_t b = 0; b < file.frequencies.size(); ++b) {
    for (std::size_t l = 0; l < sources.size(); ++l) {
      const auto& s = sources[l];
      const cplx g = file.gains[b][static_cast<Eigen::Index>(l)];
      out << format_number(file.frequencies[b]) << ',' << l << ',' << format_number(s.direction.theta) << ','
          << format_number(s.direction.phi) << ',' << format_number(s.radius) << ',' << format_number(g.real())
          << ',' << format_number(g.imag()) << '\n';
    }
  }
}

void write_irls_diagnostics(const std::filesystem::path& path, const std::vector<IrlsDiagnostic>& rows) {
  auto out = open_text(path);
  out << "freq_hz,iterations,residual,converged,final_epsilon,stages\n";
  for (const auto& row : rows) {
    const auto& r = row.report;
    out << format_number(row.frequency_hz) << ',' << r.iterations << ',' << format_number(r.residual) << ','
        << (r.converged ? 1 : 0) << ',' << format_number(r.epsilon_trace.empty() ? 0.0 : r.epsilon_trace.back())
        << ',' << r.stage_l1.size() << '\n';
  }
}

void write_field_csv(const std::filesystem::path& path, const FieldGrid& grid) {
  auto out = open_text(path);
  out << "x,y,z,Re(P),Im(P),Ix,Iy,Iz,mask\n";
  for (const auto& s : grid.samples) {
    out << format_number(s.position.x()) << ',' << format_number(s.position.y()) << ','
        << format_number(s.position.z()) << ',' << format_number(s.pressure.real()) << ','
        << format_number(s.pressure.imag()) << ',' << format_number(s.intensity.x()) << ','
        << format_number(s.intensity.y()) << ',' << format_number(s.intensity.z()) << ',' << (s.masked ? 1 : 0)
        << '\n';
  }
}

void write_field_metadata(const std::filesystem::path& path, const FieldGrid& grid, const std::string& scene_hash) {
  const auto& g = grid.spec;
  nlohmann::ordered_json meta;
  meta["method"] = grid.method;
  meta["frequency_hz"] = grid.frequency_hz;
  meta["scene_hash"] = scene_hash;
  meta["plane"] = g.plane;
  meta["center"] = {g.center.x(), g.center.y(), g.center.z()};
  meta["extent"] = {g.width, g.height};
  meta["resolution"] = g.resolution;
  meta["columns"] = grid.columns;
  meta["rows"] = grid.rows;
  meta["masked_count"] = grid.masked_count();
  meta["velocity_normalization"] = "grad(P)/(i k), rho*c = 1";
  auto out = open_text(path);
  out << meta.dump(2) << '\n';
}

void write_error_csv(const std::filesystem::path& path, const FieldGrid& grid, const ErrorField& errors) {
  if (errors.size() != grid.samples.size()) throw ArgumentError("error field does not match grid");
  auto out = open_text(path);
  out << "x,y,z,pe,ime,ide,ux,uy,uz,mask\n";
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const auto& p = grid.samples[i].position;
    const auto& u = errors.unit_difference[i];
    const bool masked = !errors.pe[i] && !errors.ide[i];
    out << format_number(p.x()) << ',' << format_number(p.y()) << ',' << format_number(p.z()) << ','
        << fmt_opt(errors.pe[i]) << ',' << fmt_opt(errors.ime[i]) << ',' << fmt_opt(errors.ide[i]) << ','
        << (u ? format_number(u->x()) : "nan") << ',' << (u ? format_number(u->y()) : "nan") << ','
        << (u ? format_number(u->z()) : "nan") << ',' << (masked ? 1 : 0) << '\n';
  }
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  auto out = open_text(path);
  out << "freq_hz,radius_m,method,metric,value,masked_count\n";
  for (const auto& r : rows) {
    out << format_number(r.frequency_hz) << ',' << format_number(r.radius_m) << ',' << to_string(r.method) << ','
        << to_string(r.metric) << ',' << format_number(r.value) << ',' << r.masked_count << '\n';
  }
}

void write_brir_csv(const std::filesystem::path& path, const BinauralSpectrum& spectrum) {
  auto out = open_text(path);
  out << "freq_hz,left_db,right_db,left_phase,right_phase\n";
  auto db = [](cplx v) { return 20.0 * std::log10(std::abs(v)); };
  for (std::size_t i = 0; i < spectrum.bins.size(); ++i) {
    const auto& b = spectrum.bins[i];
    out << format_number(spectrum.frequencies[i]) << ',' << format_number(db(b.left)) << ','
        << format_number(db(b.right)) << ',' << format_number(std::arg(b.left)) << ','
        << format_number(std::arg(b.right)) << '\n';
  }
}

}  // namespace sft
