#include "commands.hpp"

#include <atomic>
#include <cmath>
#include <iostream>

#include "manifest.hpp"
#include "sft/errors.hpp"
#include "sft/io.hpp"
#include "sft/metrics.hpp"
#include "sft/parallel.hpp"
#include "sft/pipeline.hpp"
#include "sft/render.hpp"
#include "sft/stft.hpp"

namespace sft::cli {
namespace {

namespace fs = std::filesystem;

/// Manifest plus the IRLS convergence tally of one command.
class Run {
 public:
  Run(const std::string& command, const CommonOptions& common)
      : manifest_(command, common.arguments), allow_unconverged_(common.allow_unconverged) {
    manifest_.set_scene(common.scene);
    manifest_.parameters()["allow_unconverged"] = common.allow_unconverged;
    manifest_.parameters()["threads"] = thread_count();
  }

  RunManifest& manifest() { return manifest_; }
  const fs::path& output(const fs::path& p) { return manifest_.output(p); }

  void check(const std::optional<IrlsReport>& report) {
    if (report && !report->converged) ++unconverged_;
  }

  /// Writes the manifest and returns the exit status.
  int finish(const fs::path& manifest_path) {
    const int bad = unconverged_.load();
    if (bad > 0) {
      manifest_.note(std::to_string(bad) + " IRLS solve(s) stopped at the iteration limit");
      std::cerr << "warning: " << bad << " IRLS solve(s) did not converge"
                << (allow_unconverged_ ? "" : "; rerun with --allow-unconverged to accept") << '\n';
    }
    manifest_.write(manifest_path);
    std::cout << "manifest: " << manifest_path.string() << '\n';
    return bad > 0 && !allow_unconverged_ ? 1 : 0;
  }

 private:
  RunManifest manifest_;
  bool allow_unconverged_;
  std::atomic<int> unconverged_{0};
};

fs::path sidecar(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::vector<double> bin_frequencies(const Scene& scene) {
  const Stft stft(scene.frame_size, scene.hop_size);
  std::vector<double> f(static_cast<std::size_t>(stft.bin_count()));
  for (int b = 0; b < stft.bin_count(); ++b) f[static_cast<std::size_t>(b)] = stft.bin_frequency(b, scene.sample_rate);
  return f;
}

std::vector<Method> parse_methods(const std::vector<std::string>& tags) {
  std::vector<Method> out;
  for (const auto& t : tags) {
    if (!t.empty()) out.push_back(parse_method(t));
  }
  if (out.empty()) throw ArgumentError("--methods: no methods given");
  return out;
}

std::vector<Metric> parse_metrics(const std::vector<std::string>& tags) {
  std::vector<Metric> out;
  for (const auto& t : tags) {
    if (!t.empty()) out.push_back(parse_metric(t));
  }
  if (out.empty()) throw ArgumentError("--metrics: no metrics given");
  return out;
}

Vec3 parse_position(const std::vector<double>& v, const Vec3& fallback, const char* flag) {
  if (v.empty()) return fallback;
  if (v.size() != 3) throw ArgumentError(std::string(flag) + ": expected x,y,z");
  return {v[0], v[1], v[2]};
}

Vec3 default_listener(const Scene& scene) {
  return scene.analysis.listener_positions.empty() ? Vec3::Zero() : scene.analysis.listener_positions.front();
}

void require_inside_near_shell(const Pipeline& p, Method m, const Vec3& d) {
  if (!is_expansion(m) || model_of(m) != SourceModel::mixedwave) return;
  const double r = p.distribution(SourceModel::mixedwave)->near_radius();
  if (!(d.norm() < r)) {
    throw RegionError("position: |d| = " + format_number(d.norm()) + " m is not inside the near shell (" +
                      format_number(r) + " m) required by " + to_string(m));
  }
}

std::size_t find_bin(const std::vector<double>& freqs, double hz, const fs::path& file) {
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    if (std::abs(freqs[i] - hz) <= 1e-9 * std::max(1.0, hz)) return i;
  }
  throw ArgumentError("--frequency: " + format_number(hz) + " Hz is not a bin of " + file.string());
}

std::string freq_tag(double hz) { return format_number(hz) + "hz"; }

// ---- stages -----------------------------------------------------------------

/// Transfer-function capture of the unit-gain scene on the STFT bin grid (one frame).
CoefficientFile capture_transfer(const Pipeline& p) {
  const Scene& s = p.scene();
  CoefficientFile file;
  file.order = s.microphone.order;
  file.sample_rate = s.sample_rate;
  file.frame_size = s.frame_size;
  file.hop_size = s.hop_size;
  file.frequencies = bin_frequencies(s);
  std::vector<SphericalCoefficients> bins(file.frequencies.size(), SphericalCoefficients::zeros(file.order));
  parallel_for(bins.size(), [&](std::size_t b) {
    if (file.frequencies[b] > 0.0) bins[b] = p.record(file.frequencies[b]);
  });
  file.frames.push_back(std::move(bins));
  return file;
}

std::vector<double> read_mono(const fs::path& path, double sample_rate) {
  const AudioBuffer a = read_wav(path);
  if (a.channels.size() != 1) {
    throw ArgumentError(path.string() + ": expected a mono file, got " + std::to_string(a.channels.size()) +
                        " channels");
  }
  if (a.sample_rate != sample_rate) {
    throw ValidationError(path.string() + ": sample rate " + format_number(a.sample_rate) +
                          " Hz differs from the scene's " + format_number(sample_rate) + " Hz");
  }
  return a.channels.front();
}

CoefficientFile capture_signal(const Scene& s, const fs::path& signal) {
  const auto x = read_mono(signal, s.sample_rate);
  const auto frames = capture_stft(s, std::vector<std::vector<double>>(s.sources.size(), x));
  CoefficientFile file;
  file.order = frames.order;
  file.sample_rate = frames.sample_rate;
  file.frame_size = frames.frame_size;
  file.hop_size = frames.hop_size;
  file.frequencies = bin_frequencies(s);
  file.frames = frames.frames;
  return file;
}

DrivingFile expand_bins(const Pipeline& p, Method m, const CoefficientFile& coeffs, int frame,
                        std::vector<IrlsDiagnostic>& diagnostics, Run& run) {
  if (!is_expansion(m)) throw ArgumentError("--method: " + to_string(m) + " is not an expansion method");
  if (frame < 0 || static_cast<std::size_t>(frame) >= coeffs.frames.size()) {
    throw ArgumentError("--frame: " + std::to_string(frame) + " is out of range (file has " +
                        std::to_string(coeffs.frames.size()) + " frames)");
  }
  DrivingFile out;
  out.method = m;
  out.distribution = p.distribution(model_of(m));
  out.weighted = !is_irls(m);
  out.frequencies = coeffs.frequencies;
  out.gains.assign(coeffs.frequencies.size(), CVector::Zero(static_cast<Eigen::Index>(out.distribution->size())));
  std::vector<std::optional<IrlsReport>> reports(coeffs.frequencies.size());
  const auto& bins = coeffs.frames[static_cast<std::size_t>(frame)];
  parallel_for(bins.size(), [&](std::size_t b) {
    const double hz = coeffs.frequencies[b];
    if (!(hz > 0.0)) return;  // no field at DC
    auto psi = p.expand(m, bins[b], hz);
    out.gains[b] = std::move(psi.gains);
    reports[b] = std::move(psi.report);
  });
  for (std::size_t b = 0; b < reports.size(); ++b) {
    run.check(reports[b]);
    if (reports[b]) diagnostics.push_back({coeffs.frequencies[b], *reports[b]});
  }
  return out;
}

FieldGridSpec grid_spec(const Scene& s, const FieldmapOptions& opt) {
  FieldGridSpec g = s.analysis.field_grid;
  if (!opt.plane.empty()) g.plane = opt.plane;
  if (!opt.center.empty()) g.center = parse_position(opt.center, g.center, "--center");
  if (!opt.extent.empty()) {
    if (opt.extent.size() != 2) throw ArgumentError("--extent: expected width,height");
    g.width = opt.extent[0];
    g.height = opt.extent[1];
  }
  if (opt.resolution != 0.0) g.resolution = opt.resolution;
  return g;
}

/// Writes `<tag>_<f>hz_field.{csv,json}` and, against `truth`, `<tag>_<f>hz_error.csv`.
void write_field_set(Run& run, const fs::path& dir, const std::string& tag, const FieldGrid& grid,
                     const FieldGrid* truth) {
  fs::create_directories(dir);
  const std::string stem = tag + "_" + freq_tag(grid.frequency_hz);
  write_field_csv(run.output(dir / (stem + "_field.csv")), grid);
  write_field_metadata(run.output(dir / (stem + "_field.json")), grid, run.manifest().scene_hash());
  if (truth != nullptr) write_error_csv(run.output(dir / (stem + "_error.csv")), grid, compute_error_field(*truth, grid));
}

std::vector<SweepRow> sweep_rows(const Pipeline& p, const std::vector<Method>& methods,
                                 const std::vector<Metric>& metrics, const std::vector<double>& radii,
                                 const std::vector<double>& freqs, int points, Run& run) {
  if (radii.empty()) throw ArgumentError("--radii: no radii given");
  if (freqs.empty()) throw ArgumentError("--frequencies: no frequencies given");
  std::vector<std::vector<SweepRow>> per_freq(freqs.size());
  parallel_for(freqs.size(), [&](std::size_t i) {
    const double hz = freqs[i];
    const auto truth = p.evaluator(p.prepare(Method::reference, hz));
    for (Method m : methods) {
      const auto prepared = p.prepare(m, hz);
      if (prepared.driving) run.check(prepared.driving->report);
      const auto test = p.evaluator(prepared);
      for (double r : radii) {
        for (Metric metric : metrics) {
          const auto avg = sphere_average(metric, r, *truth, *test, points);
          per_freq[i].push_back({hz, r, m, metric, avg.value, avg.masked});
        }
      }
    }
  });
  std::vector<SweepRow> rows;
  for (auto& v : per_freq) rows.insert(rows.end(), v.begin(), v.end());
  return rows;
}

BinauralSpectrum brir_spectrum(const Pipeline& p, Method m, const Vec3& d, const std::vector<double>& freqs,
                               Run& run) {
  require_inside_near_shell(p, m, d);
  BinauralSpectrum out;
  out.method = m;
  out.listener = d;
  out.frequencies = freqs;
  out.bins.resize(freqs.size());
  std::vector<std::optional<IrlsReport>> reports(freqs.size());
  const auto ears = p.ears();
  parallel_for(freqs.size(), [&](std::size_t i) {
    if (!(freqs[i] > 0.0)) return;
    const auto prepared = p.prepare(m, freqs[i]);
    if (prepared.driving) reports[i] = prepared.driving->report;
    out.bins[i] = prepared.auralize(p.scene(), d, ears);
  });
  for (const auto& r : reports) run.check(r);
  return out;
}

/// Exponential sine sweep, the excitation used for the reproduction renders.
std::vector<double> log_sweep(double fs, double seconds, double f0, double f1) {
  const auto n = static_cast<std::size_t>(std::llround(fs * seconds));
  const double rate = std::log(f1 / f0);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    x[i] = 0.5 * std::sin(2.0 * kPi * f0 * seconds / rate * (std::exp(t * rate / seconds) - 1.0));
  }
  return x;
}

}  // namespace

// ---- commands ---------------------------------------------------------------

int run_capture(const CommonOptions& common, const CaptureOptions& opt) {
  const Pipeline p(load_scene(common.scene));
  Run run("capture", common);
  run.manifest().parameters()["signal"] = opt.signal.generic_string();
  const auto file = opt.signal.empty() ? capture_transfer(p) : capture_signal(p.scene(), opt.signal);
  ensure_parent(opt.out);
  write_coefficients(run.output(opt.out), file);
  if (!opt.csv.empty()) {
    ensure_parent(opt.csv);
    write_coefficients_csv(run.output(opt.csv), file);
  }
  std::size_t flagged = 0;
  for (const auto& frame : file.frames) {
    for (const auto& c : frame) flagged += c.ill_conditioned ? 1 : 0;
  }
  if (flagged > 0) run.manifest().note(std::to_string(flagged) + " bin(s) used the regularised baffle inverse");
  std::cout << "captured " << file.frames.size() << " frame(s) x " << file.frequencies.size() << " bins, order "
            << file.order << " -> " << opt.out.string() << '\n';
  return run.finish(sidecar(opt.out));
}

int run_expand(const CommonOptions& common, const ExpandOptions& opt) {
  const Pipeline p(load_scene(common.scene));
  const Method m = parse_method(opt.method);
  Run run("expand", common);
  run.manifest().parameters()["method"] = to_string(m);
  run.manifest().parameters()["frame"] = opt.frame;
  run.manifest().parameters()["coefficients_sha256"] = sha256_file(opt.coeffs);
  const auto coeffs = read_coefficients(opt.coeffs);
  std::vector<IrlsDiagnostic> diagnostics;
  const auto driving = expand_bins(p, m, coeffs, opt.frame, diagnostics, run);
  ensure_parent(opt.out);
  write_driving(run.output(opt.out), driving);
  if (!opt.csv.empty()) {
    ensure_parent(opt.csv);
    write_driving_csv(run.output(opt.csv), driving);
  }
  if (!opt.diagnostics.empty()) {
    if (!is_irls(m)) throw ArgumentError("--diagnostics: only IRLS methods produce diagnostics");
    ensure_parent(opt.diagnostics);
    write_irls_diagnostics(run.output(opt.diagnostics), diagnostics);
  }
  std::cout << to_string(m) << ": " << driving.frequencies.size() << " bins x " << driving.distribution->size()
            << " sources -> " << opt.out.string() << '\n';
  return run.finish(sidecar(opt.out));
}

int run_fieldmap(const CommonOptions& common, const FieldmapOptions& opt) {
  const int sources = (opt.truth ? 1 : 0) + (opt.method.empty() ? 0 : 1) + (opt.driving.empty() ? 0 : 1) +
                      (opt.coeffs.empty() ? 0 : 1);
  if (sources != 1) throw ArgumentError("fieldmap: give exactly one of --truth, --method, --driving, --coeffs");
  if (!(opt.frequency > 0.0)) throw ArgumentError("--frequency: must be positive");
  const Pipeline p(load_scene(common.scene));
  Run run("fieldmap", common);
  const FieldGridSpec spec = grid_spec(p.scene(), opt);
  const double hz = opt.frequency;
  const double k = p.scene().wavenumber(hz);
  auto& params = run.manifest().parameters();
  params["frequency_hz"] = hz;
  params["grid"] = {{"plane", spec.plane},
                    {"center", {spec.center.x(), spec.center.y(), spec.center.z()}},
                    {"extent", {spec.width, spec.height}},
                    {"resolution", spec.resolution}};

  const auto truth_eval = p.evaluator(p.prepare(Method::reference, hz));
  const auto truth = compute_field_grid(*truth_eval, spec, "reference", hz);
  if (opt.truth) {
    write_field_set(run, opt.out_dir, "truth", truth, nullptr);
  } else if (!opt.method.empty()) {
    const Method m = parse_method(opt.method);
    const auto prepared = p.prepare(m, hz);
    if (prepared.driving) run.check(prepared.driving->report);
    const auto grid = compute_field_grid(*p.evaluator(prepared), spec, to_string(m), hz);
    write_field_set(run, opt.out_dir, to_string(m), grid, &truth);
  } else if (!opt.driving.empty()) {
    const auto file = read_driving(opt.driving);
    params["driving_sha256"] = sha256_file(opt.driving);
    const DistributionField field(file.at(find_bin(file.frequencies, hz, opt.driving)), k);
    const auto grid = compute_field_grid(field, spec, to_string(file.method), hz);
    write_field_set(run, opt.out_dir, to_string(file.method), grid, &truth);
  } else {
    const auto file = read_coefficients(opt.coeffs);
    params["coefficients_sha256"] = sha256_file(opt.coeffs);
    const TruncatedField field(file.frames.at(0).at(find_bin(file.frequencies, hz, opt.coeffs)), k);
    const auto grid = compute_field_grid(field, spec, "recording", hz);
    write_field_set(run, opt.out_dir, "recording", grid, &truth);
  }
  return run.finish(opt.out_dir / ("fieldmap_" + freq_tag(hz) + ".manifest.json"));
}

int run_sweep(const CommonOptions& common, const SweepOptions& opt) {
  const Pipeline p(load_scene(common.scene));
  const auto& a = p.scene().analysis;
  const auto methods = parse_methods(opt.methods);
  const auto metrics = parse_metrics(opt.metrics);
  std::vector<double> radii = opt.radii;
  std::vector<double> freqs = opt.frequencies;
  if (opt.band) {
    if (radii.empty()) radii = {a.band_radius};
    if (freqs.empty()) freqs = log_spaced(a.band_min_hz, a.band_max_hz, a.band_count);
  } else {
    if (radii.empty()) radii = a.sphere_radii;
    if (freqs.empty()) freqs = a.frequencies;
  }
  const int points = opt.points > 0 ? opt.points : a.sphere_points;
  Run run("sweep", common);
  auto& params = run.manifest().parameters();
  params["radii"] = radii;
  params["frequencies"] = freqs;
  params["points"] = points;
  const auto rows = sweep_rows(p, methods, metrics, radii, freqs, points, run);
  ensure_parent(opt.out);
  write_sweep_csv(run.output(opt.out), rows);
  std::cout << rows.size() << " rows -> " << opt.out.string() << '\n';
  return run.finish(sidecar(opt.out));
}

int run_brir(const CommonOptions& common, const BrirOptions& opt) {
  const Pipeline p(load_scene(common.scene));
  const auto methods = parse_methods(opt.methods);
  const Vec3 d = parse_position(opt.position, default_listener(p.scene()), "--position");
  std::vector<double> freqs = opt.frequencies;
  if (freqs.empty()) {
    freqs = bin_frequencies(p.scene());
    freqs.erase(freqs.begin());  // DC
  }
  for (Method m : methods) require_inside_near_shell(p, m, d);
  Run run("brir", common);
  run.manifest().parameters()["position"] = {d.x(), d.y(), d.z()};
  fs::create_directories(opt.out_dir);
  for (Method m : methods) {
    const auto spectrum = brir_spectrum(p, m, d, freqs, run);
    write_brir_csv(run.output(opt.out_dir / ("brir_" + to_string(m) + ".csv")), spectrum);
  }
  std::cout << methods.size() << " BRIR spectra x " << freqs.size() << " bins -> " << opt.out_dir.string() << '\n';
  return run.finish(opt.out_dir / "brir.manifest.json");
}

int run_render(const CommonOptions& common, const RenderOptions& opt) {
  if (!opt.trajectory.empty() && !opt.position.empty()) {
    throw ArgumentError("render: give --trajectory or --position, not both");
  }
  const Pipeline p(load_scene(common.scene));
  const Method m = parse_method(opt.method);
  const auto source = read_mono(opt.audio, p.scene().sample_rate);
  const Trajectory path = opt.trajectory.empty()
                              ? Trajectory::stationary(parse_position(opt.position, Vec3::Zero(), "--position"))
                              : Trajectory::load_csv(opt.trajectory);
  Run run("render", common);
  run.manifest().parameters()["method"] = to_string(m);
  run.manifest().parameters()["audio_sha256"] = sha256_file(opt.audio);
  if (!opt.trajectory.empty()) run.manifest().parameters()["trajectory_sha256"] = sha256_file(opt.trajectory);
  const auto out = render_trajectory(p, m, path, source);
  ensure_parent(opt.out);
  write_wav(run.output(opt.out), out);
  std::cout << to_string(m) << ": " << out.frames() << " stereo samples -> " << opt.out.string() << '\n';
  return run.finish(sidecar(opt.out));
}

int run_repro(const CommonOptions& common, const ReproOptions& opt) {
  const Pipeline p(load_scene(common.scene));
  const Scene& s = p.scene();
  const auto& a = s.analysis;
  Run run("repro", common);
  const fs::path root = opt.out_dir;
  fs::create_directories(root);
  const std::vector<Method> expansions{Method::pw_cf, Method::pw_irls, Method::mw_cf, Method::mw_irls};

  std::cout << "[1/6] capture\n";
  const auto coeffs = capture_transfer(p);
  write_coefficients(run.output(root / "coefficients.sfc"), coeffs);
  write_coefficients_csv(run.output(root / "coefficients.csv"), coeffs);

  std::cout << "[2/6] expand\n";
  for (Method m : expansions) {
    std::vector<IrlsDiagnostic> diagnostics;
    const auto driving = expand_bins(p, m, coeffs, 0, diagnostics, run);
    write_driving(run.output(root / ("driving_" + to_string(m) + ".sfd")), driving);
    if (is_irls(m)) write_irls_diagnostics(run.output(root / ("irls_" + to_string(m) + ".csv")), diagnostics);
  }

  std::cout << "[3/6] field maps\n";
  for (double hz : a.frequencies) {
    const auto truth = compute_field_grid(*p.evaluator(p.prepare(Method::reference, hz)), a.field_grid, "reference", hz);
    write_field_set(run, root / "fields", "truth", truth, nullptr);
    for (Method m : expansions) {
      const auto prepared = p.prepare(m, hz);
      run.check(prepared.driving->report);
      write_field_set(run, root / "fields", to_string(m),
                      compute_field_grid(*p.evaluator(prepared), a.field_grid, to_string(m), hz), &truth);
    }
  }

  std::cout << "[4/6] sphere sweeps\n";
  std::vector<Method> swept{Method::anchor};
  swept.insert(swept.end(), expansions.begin(), expansions.end());
  const std::vector<Metric> metrics{Metric::pe, Metric::ime, Metric::ide};
  write_sweep_csv(run.output(root / "sweep_radius.csv"),
                  sweep_rows(p, swept, metrics, a.sphere_radii, a.frequencies, a.sphere_points, run));
  write_sweep_csv(run.output(root / "sweep_band.csv"),
                  sweep_rows(p, swept, metrics, {a.band_radius}, log_spaced(a.band_min_hz, a.band_max_hz, a.band_count),
                             a.sphere_points, run));

  std::cout << "[5/6] BRIR spectra\n";
  const Vec3 listener = default_listener(s);
  auto freqs = bin_frequencies(s);
  freqs.erase(freqs.begin());
  fs::create_directories(root / "brir");
  for (Method m : all_methods()) {
    write_brir_csv(run.output(root / "brir" / ("brir_" + to_string(m) + ".csv")),
                   brir_spectrum(p, m, listener, freqs, run));
  }

  if (opt.skip_render) {
    std::cout << "[6/6] render skipped\n";
  } else {
    std::cout << "[6/6] render\n";
    constexpr double kSeconds = 5.0;
    const auto source = log_sweep(s.sample_rate, kSeconds, 50.0, 0.45 * s.sample_rate);
    const auto path = linear_trajectory(Vec3::Zero(), listener, kSeconds, 50);
    fs::create_directories(root / "audio");
    write_wav(run.output(root / "audio" / "source.wav"), {s.sample_rate, {source}});
    path.save_csv(run.output(root / "audio" / "trajectory.csv"));
    for (Method m : all_methods()) {
      write_wav(run.output(root / "audio" / (to_string(m) + ".wav")), render_trajectory(p, m, path, source));
    }
  }
  return run.finish(root / "manifest.json");
}

}  // namespace sft::cli
