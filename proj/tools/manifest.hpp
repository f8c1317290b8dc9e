#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sft::cli {

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Provenance record written next to a command's outputs. Carries the only
/// timestamps of a run, so data files stay byte-identical across runs.
class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::string> arguments);

  void set_scene(const std::filesystem::path& scene_file);
  [[nodiscard]] const std::string& scene_hash() const { return scene_hash_; }
  nlohmann::json& parameters() { return parameters_; }

  /// Registers an output file; returns the path unchanged for chaining.
  const std::filesystem::path& output(const std::filesystem::path& path);
  void note(const std::string& message) { notes_.push_back(message); }

  /// Hashes every registered output and writes the manifest.
  void write(const std::filesystem::path& path) const;

 private:
  std::string command_;
  std::vector<std::string> arguments_;
  std::filesystem::path scene_file_;
  std::string scene_hash_;
  nlohmann::json parameters_ = nlohmann::json::object();
  std::vector<std::filesystem::path> outputs_;
  std::vector<std::string> notes_;
  std::chrono::system_clock::time_point started_;
};

}  // namespace sft::cli
