#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sft::cli {

/// Shared by every subcommand.
struct CommonOptions {
  std::filesystem::path scene;
  bool allow_unconverged = false;
  /// argv, recorded in manifests.
  std::vector<std::string> arguments;
};

struct CaptureOptions {
  std::filesystem::path out;
  std::filesystem::path signal;
  std::filesystem::path csv;
};

struct ExpandOptions {
  std::filesystem::path coeffs;
  std::string method;
  std::filesystem::path out;
  int frame = 0;
  std::filesystem::path diagnostics;
  std::filesystem::path csv;
};

struct FieldmapOptions {
  bool truth = false;
  std::string method;
  std::filesystem::path driving;
  std::filesystem::path coeffs;
  double frequency = 0.0;
  std::filesystem::path out_dir;
  std::string plane;
  std::vector<double> center;
  std::vector<double> extent;
  double resolution = 0.0;
};

struct SweepOptions {
  std::vector<std::string> methods;
  std::vector<std::string> metrics;
  std::vector<double> radii;
  std::vector<double> frequencies;
  bool band = false;
  int points = 0;
  std::filesystem::path out;
};

struct BrirOptions {
  std::vector<std::string> methods;
  std::vector<double> position;
  std::vector<double> frequencies;
  std::filesystem::path out_dir;
};

struct RenderOptions {
  std::string method;
  std::filesystem::path audio;
  std::filesystem::path trajectory;
  std::vector<double> position;
  std::filesystem::path out;
};

struct ReproOptions {
  std::filesystem::path out_dir;
  bool skip_render = false;
};

/// Each returns the process exit status: 0 success, 1 unconverged IRLS
/// without --allow-unconverged. Errors propagate as sft exceptions.
int run_capture(const CommonOptions& common, const CaptureOptions& opt);
int run_expand(const CommonOptions& common, const ExpandOptions& opt);
int run_fieldmap(const CommonOptions& common, const FieldmapOptions& opt);
int run_sweep(const CommonOptions& common, const SweepOptions& opt);
int run_brir(const CommonOptions& common, const BrirOptions& opt);
int run_render(const CommonOptions& common, const RenderOptions& opt);
int run_repro(const CommonOptions& common, const ReproOptions& opt);

}  // namespace sft::cli
