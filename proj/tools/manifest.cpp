#include "manifest.hpp"

#include <array>
#include <ctime>
#include <fstream>
#include <memory>

#include <openssl/evp.h>

#include "sft/errors.hpp"

#ifndef SFT_VERSION
#define SFT_VERSION "unknown"
#endif

namespace sft::cli {
namespace {

std::string iso_utc(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("SHA-256 initialisation failed");
  std::array<char, 1 << 16> chunk{};
  while (in) {
    in.read(chunk.data(), chunk.size());
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), chunk.data(), static_cast<std::size_t>(in.gcount()));
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

RunManifest::RunManifest(std::string command, std::vector<std::string> arguments)
    : command_(std::move(command)), arguments_(std::move(arguments)), started_(std::chrono::system_clock::now()) {}

void RunManifest::set_scene(const std::filesystem::path& scene_file) {
  scene_file_ = scene_file;
  scene_hash_ = sha256_file(scene_file);
}

const std::filesystem::path& RunManifest::output(const std::filesystem::path& path) {
  outputs_.push_back(path);
  return outputs_.back();
}

void RunManifest::write(const std::filesystem::path& path) const {
  const auto base = std::filesystem::absolute(path).parent_path();
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& p : outputs_) {
    const auto abs = std::filesystem::absolute(p);
    outputs.push_back({{"path", abs.lexically_relative(base).generic_string()},
                       {"bytes", std::filesystem::file_size(abs)},
                       {"sha256", sha256_file(abs)}});
  }
  nlohmann::json j;
  j["tool"] = "sft";
  j["version"] = SFT_VERSION;
  j["command"] = command_;
  j["arguments"] = arguments_;
  if (!scene_file_.empty()) {
    j["scene"] = {{"path", scene_file_.generic_string()}, {"sha256", scene_hash_}};
  }
  j["parameters"] = parameters_;
  j["outputs"] = outputs;
  if (!notes_.empty()) j["notes"] = notes_;
  j["started_utc"] = iso_utc(started_);
  j["finished_utc"] = iso_utc(std::chrono::system_clock::now());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace sft::cli
