#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sft/binaural.hpp"
#include "sft/capture.hpp"
#include "sft/expansion.hpp"
#include "sft/field.hpp"
#include "sft/metrics.hpp"

namespace sft {

/// Contents of an `SFC1` coefficient file. Data are stored as complex64.
struct CoefficientFile {
  int order = 0;
  double sample_rate = 0.0;
  int frame_size = 0;
  int hop_size = 0;
  std::vector<double> frequencies;
  /// frames[f][bin]
  std::vector<std::vector<SphericalCoefficients>> frames;
};

void write_coefficients(const std::filesystem::path& path, const CoefficientFile& file);
CoefficientFile read_coefficients(const std::filesystem::path& path);
/// `frame,freq_hz,n,m,re,im`
void write_coefficients_csv(const std::filesystem::path& path, const CoefficientFile& file);

/// Contents of an `SFD1` driving-function file.
struct DrivingFile {
  Method method = Method::pw_cf;
  std::shared_ptr<const VirtualDistribution> distribution;
  bool weighted = true;
  std::vector<double> frequencies;
  /// gains[bin], one entry per source
  std::vector<CVector> gains;

  [[nodiscard]] DrivingFunction at(std::size_t bin) const;
};

void write_driving(const std::filesystem::path& path, const DrivingFile& file);
DrivingFile read_driving(const std::filesystem::path& path);
/// `freq_hz,source,theta,phi,radius,re,im`
void write_driving_csv(const std::filesystem::path& path, const DrivingFile& file);

struct IrlsDiagnostic {
  double frequency_hz = 0.0;
  IrlsReport report;
};
/// `freq_hz,iterations,residual,converged,final_epsilon,stages`
void write_irls_diagnostics(const std::filesystem::path& path, const std::vector<IrlsDiagnostic>& rows);

/// `x,y,z,Re(P),Im(P),Ix,Iy,Iz,mask`
void write_field_csv(const std::filesystem::path& path, const FieldGrid& grid);
/// Sidecar metadata for a field grid.
void write_field_metadata(const std::filesystem::path& path, const FieldGrid& grid, const std::string& scene_hash);
/// `x,y,z,pe,ime,ide,ux,uy,uz,mask`
void write_error_csv(const std::filesystem::path& path, const FieldGrid& grid, const ErrorField& errors);

struct SweepRow {
  double frequency_hz = 0.0;
  double radius_m = 0.0;
  Method method = Method::reference;
  Metric metric = Metric::pe;
  double value = 0.0;
  std::size_t masked_count = 0;
};
/// `freq_hz,radius_m,method,metric,value,masked_count`
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

/// `freq_hz,left_db,right_db,left_phase,right_phase`
void write_brir_csv(const std::filesystem::path& path, const BinauralSpectrum& spectrum);

/// Shortest round-trip decimal representation used by every CSV writer.
std::string format_number(double value);

}  // namespace sft
