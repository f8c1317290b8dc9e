#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "sft/errors.hpp"
#include "sft/scene.hpp"
#include "support.hpp"

using namespace sft;
using nlohmann::json;

namespace {

json reference_json() { return json::parse(serialize_scene(test::reference_scene())); }

// Parses `j` and returns the validation message, or "" if it parsed.
std::string validation_message(const json& j) {
  try {
    parse_scene(j.dump());
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

}  // namespace

TEST(Scene, ReferenceSceneLoads) {
  const Scene s = test::reference_scene();
  EXPECT_EQ(s.sources.size(), 1u);
  EXPECT_EQ(s.sources[0].position, Vec3(1.0, 0.0, 0.0));
  EXPECT_EQ(s.microphone.order, 4);
  EXPECT_DOUBLE_EQ(s.microphone.radius, 0.042);
  EXPECT_EQ(s.microphone.sensor_grid.grid->size(), 36u);
  ASSERT_TRUE(s.planewave && s.mixedwave);
  EXPECT_EQ(s.mixedwave->radii, (std::vector<double>{2.0, 20.0}));
  EXPECT_EQ(s.frame_size, 4096);
  EXPECT_EQ(s.hop_size, 2048);
  EXPECT_DOUBLE_EQ(s.sample_rate, 16000.0);
  EXPECT_DOUBLE_EQ(s.microphone.band_max_hz, 8000.0);
}

TEST(Scene, DefaultsApply) {
  json j = reference_json();
  j.erase("speed_of_sound");
  j.erase("stft");
  j.erase("listener");
  j.erase("irls");
  const Scene s = parse_scene(j.dump());
  EXPECT_DOUBLE_EQ(s.speed_of_sound, 343.0);
  EXPECT_EQ(s.frame_size, 4096);
  EXPECT_DOUBLE_EQ(s.ear_offset, 0.09);
  EXPECT_EQ(s.irls.max_iterations, 100);
}

TEST(Scene, SerializeRoundTrip) {
  const Scene s = test::reference_scene();
  const Scene back = parse_scene(serialize_scene(s));
  EXPECT_EQ(back, s);
  EXPECT_EQ(serialize_scene(back), serialize_scene(s));
}

TEST(Scene, SaveAndLoad) {
  const auto dir = std::filesystem::temp_directory_path() / "sft_test_scene";
  std::filesystem::create_directories(dir);
  const Scene s = test::reference_scene();
  save_scene(s, dir / "scene.json");
  EXPECT_EQ(load_scene(dir / "scene.json"), s);
  std::filesystem::remove_all(dir);
}

TEST(Scene, SourceInsideArrayRejected) {
  json j = reference_json();
  j["sources"][0]["position"] = {0.02, 0.0, 0.0};
  const auto msg = validation_message(j);
  EXPECT_TRUE(starts_with(msg, "sources[0].position")) << msg;
  EXPECT_NE(msg.find("microphone radius"), std::string::npos) << msg;
}

TEST(Scene, SourceBeyondFarShellRejected) {
  json j = reference_json();
  j["sources"][0]["position"] = {30.0, 0.0, 0.0};
  EXPECT_TRUE(starts_with(validation_message(j), "sources[0].position"));
}

TEST(Scene, ListenerMustStayInsideNearShell) {
  json j = reference_json();
  j["analysis"]["listener_positions"] = {{0.0, 2.5, 0.0}};
  EXPECT_TRUE(starts_with(validation_message(j), "distributions.mixedwave.radii"));
}

TEST(Scene, HeadRotationRejected) {
  json j = reference_json();
  j["listener"]["rotation"] = {0.0, 0.0, 90.0};
  EXPECT_TRUE(starts_with(validation_message(j), "listener.rotation"));
}

TEST(Scene, ErrorsNameTheField) {
  struct Case {
    std::string field;
    void (*mutate)(json&);
  };
  const std::vector<Case> cases = {
      {"microphone.order", [](json& j) { j["microphone"]["order"] = -1; }},
      {"microphone.order", [](json& j) { j["microphone"]["order"] = 2.5; }},
      {"microphone.radius", [](json& j) { j["microphone"]["radius"] = 0.0; }},
      {"microphone.radius", [](json& j) { j["microphone"].erase("radius"); }},
      {"microphone.sensor_grid", [](json& j) { j["microphone"]["sensor_grid"] = "fliege_37"; }},
      {"microphone.sensor_grid", [](json& j) { j["microphone"]["sensor_grid"] = "lebedev_26"; }},
      {"microphone.sensor_grid", [](json& j) { j["microphone"]["order"] = 6; }},
      {"speed_of_sound", [](json& j) { j["speed_of_sound"] = -1.0; }},
      {"stft.frame_size", [](json& j) { j["stft"]["frame_size"] = 4095; }},
      {"stft.hop_size", [](json& j) { j["stft"]["hop_size"] = 5000; }},
      {"sources", [](json& j) { j["sources"] = json::array(); }},
      {"sources[0].position", [](json& j) { j["sources"][0]["position"] = {1.0, 0.0}; }},
      {"distributions", [](json& j) { j["distributions"] = json::object(); }},
      {"distributions.mixedwave.radii", [](json& j) { j["distributions"]["mixedwave"]["radii"] = {20.0, 2.0}; }},
      {"distributions.mixedwave.radii", [](json& j) { j["distributions"]["mixedwave"]["radii"] = {2.0}; }},
      {"analysis.frequencies[1]", [](json& j) { j["analysis"]["frequencies"] = {500.0, 9000.0}; }},
      {"analysis.frequencies[0]", [](json& j) { j["analysis"]["frequencies"] = {0.0}; }},
      {"analysis.field_grid.plane", [](json& j) { j["analysis"]["field_grid"]["plane"] = "xq"; }},
      {"analysis.field_grid.resolution", [](json& j) { j["analysis"]["field_grid"]["resolution"] = 0.0; }},
      {"irls.p", [](json& j) { j["irls"]["p"] = 3.0; }},
      {"irls.max_iterations", [](json& j) { j["irls"]["max_iterations"] = 0; }},
      {"schema_version", [](json& j) { j["schema_version"] = 2; }},
  };
  for (const auto& c : cases) {
    json j = reference_json();
    c.mutate(j);
    const auto msg = validation_message(j);
    EXPECT_TRUE(starts_with(msg, c.field + ":")) << c.field << " -> '" << msg << "'";
  }
}

TEST(Scene, MalformedJsonIsParseError) {
  EXPECT_THROW(parse_scene("{\"sources\": ["), ParseError);
  EXPECT_THROW(parse_scene("[1, 2]"), ParseError);
  EXPECT_THROW(load_scene("/nonexistent/scene.json"), ParseError);
}

TEST(Scene, GridFromFileResolvesRelativeToScene) {
  const auto dir = std::filesystem::temp_directory_path() / "sft_test_grid_file";
  std::filesystem::create_directories(dir);
  fliege_grid(36)->save_csv(dir / "grid.csv");
  json j = reference_json();
  j["distributions"]["planewave"]["direction_grid"] = {{"file", "grid.csv"}};
  {
    std::ofstream out(dir / "scene.json");
    out << j.dump(2);
  }
  const Scene s = load_scene(dir / "scene.json");
  EXPECT_EQ(s.planewave->direction_grid.grid->size(), 36u);
  EXPECT_EQ(s.planewave->direction_grid.file, std::filesystem::path("grid.csv"));
  std::filesystem::remove_all(dir);
}

TEST(Scene, MissingDistributionIsModelError) {
  json j = reference_json();
  j["distributions"].erase("planewave");
  const Scene s = parse_scene(j.dump());
  EXPECT_THROW((void)s.distribution(SourceModel::planewave), ModelError);
  EXPECT_NO_THROW((void)s.distribution(SourceModel::mixedwave));
}
