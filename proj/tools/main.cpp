#include <CLI11.hpp>

#include <iostream>

#include "commands.hpp"
#include "sft/errors.hpp"
#include "sft/parallel.hpp"

#ifndef SFT_VERSION
#define SFT_VERSION "unknown"
#endif

namespace {

using namespace sft::cli;

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;

void add_scene(CLI::App& cmd, CommonOptions& common) {
  cmd.add_option("--scene", common.scene, "Scene JSON file")->required()->check(CLI::ExistingFile);
  cmd.add_flag("--allow-unconverged", common.allow_unconverged,
               "Exit 0 even when an IRLS solve hits the iteration limit");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sound field translation: capture, expansion, analysis and binaural rendering", "sft"};
  app.set_version_flag("--version", SFT_VERSION);
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (0 = hardware concurrency)")->check(CLI::NonNegativeNumber);

  CommonOptions common;
  for (int i = 0; i < argc; ++i) common.arguments.emplace_back(argv[i]);

  CaptureOptions capture;
  auto* c = app.add_subcommand("capture", "Record the scene with the spherical array (SFC1 coefficients)");
  add_scene(*c, common);
  c->add_option("--out", capture.out, "Output coefficient file")->required();
  c->add_option("--signal", capture.signal, "Mono WAV driving the sources (default: unit transfer per bin)")
      ->check(CLI::ExistingFile);
  c->add_option("--csv", capture.csv, "Also write the coefficients as CSV");

  ExpandOptions expand;
  auto* e = app.add_subcommand("expand", "Expand coefficients into virtual-source driving functions (SFD1)");
  add_scene(*e, common);
  e->add_option("--coeffs", expand.coeffs, "SFC1 coefficient file")->required()->check(CLI::ExistingFile);
  e->add_option("--method", expand.method, "pw-cf | pw-irls | mw-cf | mw-irls")->required();
  e->add_option("--out", expand.out, "Output driving file")->required();
  e->add_option("--frame", expand.frame, "STFT frame to expand");
  e->add_option("--diagnostics", expand.diagnostics, "IRLS per-bin diagnostics CSV");
  e->add_option("--csv", expand.csv, "Also write the gains as CSV");

  FieldmapOptions fieldmap;
  auto* f = app.add_subcommand("fieldmap", "Sample pressure and intensity on a planar grid");
  add_scene(*f, common);
  f->add_flag("--truth", fieldmap.truth, "Map the true field");
  f->add_option("--method", fieldmap.method, "Map a method's reproduced field");
  f->add_option("--driving", fieldmap.driving, "Map the field of an SFD1 file")->check(CLI::ExistingFile);
  f->add_option("--coeffs", fieldmap.coeffs, "Map the truncated field of an SFC1 file")->check(CLI::ExistingFile);
  f->add_option("--frequency", fieldmap.frequency, "Frequency in Hz")->required();
  f->add_option("--out-dir", fieldmap.out_dir, "Output directory")->required();
  f->add_option("--plane", fieldmap.plane, "xy | xz | yz");
  f->add_option("--center", fieldmap.center, "Grid centre x,y,z")->delimiter(',');
  f->add_option("--extent", fieldmap.extent, "Grid width,height in m")->delimiter(',');
  f->add_option("--resolution", fieldmap.resolution, "Grid spacing in m");

  SweepOptions sweep;
  auto* s = app.add_subcommand("sweep", "Sphere-averaged error metrics over radii and frequencies");
  add_scene(*s, common);
  sweep.methods = {"pw-cf", "pw-irls", "mw-cf", "mw-irls"};
  sweep.metrics = {"pe", "ime", "ide"};
  s->add_option("--methods", sweep.methods, "Comma-separated method tags")->delimiter(',')->capture_default_str();
  s->add_option("--metrics", sweep.metrics, "Comma-separated metric tags")->delimiter(',')->capture_default_str();
  s->add_option("--radii", sweep.radii, "Sphere radii in m")->delimiter(',');
  s->add_option("--frequencies", sweep.frequencies, "Frequencies in Hz")->delimiter(',');
  s->add_flag("--band", sweep.band, "Use the scene's log-spaced band at the band radius");
  s->add_option("--points", sweep.points, "Sphere sample count");
  s->add_option("--out", sweep.out, "Output CSV")->required();

  BrirOptions brir;
  auto* b = app.add_subcommand("brir", "Per-bin binaural transfer spectra at a listener position");
  add_scene(*b, common);
  brir.methods = {"reference", "anchor", "pw-cf", "pw-irls", "mw-cf", "mw-irls"};
  b->add_option("--methods", brir.methods, "Comma-separated method tags")->delimiter(',')->capture_default_str();
  b->add_option("--position", brir.position, "Listener position x,y,z")->delimiter(',');
  b->add_option("--frequencies", brir.frequencies, "Frequencies in Hz (default: STFT bins)")->delimiter(',');
  b->add_option("--out-dir", brir.out_dir, "Output directory")->required();

  RenderOptions render;
  auto* r = app.add_subcommand("render", "Binaural rendering of a mono signal along a listener trajectory");
  add_scene(*r, common);
  r->add_option("--method", render.method, "Method tag")->required();
  r->add_option("--audio", render.audio, "Mono WAV at the scene sample rate")->required();
  r->add_option("--trajectory", render.trajectory, "CSV t_sec,x,y,z")->check(CLI::ExistingFile);
  r->add_option("--position", render.position, "Stationary listener x,y,z")->delimiter(',');
  r->add_option("--out", render.out, "Output stereo WAV")->required();

  ReproOptions repro;
  auto* p = app.add_subcommand("repro", "Run the full analysis set of a scene into one directory");
  add_scene(*p, common);
  p->add_option("--out", repro.out_dir, "Output directory")->required();
  p->add_flag("--skip-render", repro.skip_render, "Skip the audio renders");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    sft::set_thread_count(threads);
    if (c->parsed()) return run_capture(common, capture);
    if (e->parsed()) return run_expand(common, expand);
    if (f->parsed()) return run_fieldmap(common, fieldmap);
    if (s->parsed()) return run_sweep(common, sweep);
    if (b->parsed()) return run_brir(common, brir);
    if (r->parsed()) return run_render(common, render);
    return run_repro(common, repro);
  } catch (const sft::ArgumentError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kUsageError;
  } catch (const sft::ValidationError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kUsageError;
  } catch (const sft::ParseError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kUsageError;
  } catch (const sft::ModelError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kUsageError;
  } catch (const sft::RegionError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kUsageError;
  } catch (const sft::UnsupportedGridError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kUsageError;
  } catch (const sft::AliasingError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kUsageError;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kRuntimeError;
  }
}
