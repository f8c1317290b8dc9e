#include "sft/scene.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sft/errors.hpp"

namespace sft {
namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& field, const std::string& what) {
  throw ValidationError(field + ": " + what);
}

const json* find(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& obj, const char* key, const std::string& path, std::optional<double> fallback = {}) {
  const json* v = find(obj, key);
  if (v == nullptr) {
    if (fallback) return *fallback;
    invalid(path + key, "missing required field");
  }
  if (!v->is_number()) invalid(path + key, "expected a number");
  return v->get<double>();
}

int get_int(const json& obj, const char* key, const std::string& path, std::optional<int> fallback = {}) {
  const json* v = find(obj, key);
  if (v == nullptr) {
    if (fallback) return *fallback;
    invalid(path + key, "missing required field");
  }
  if (!v->is_number_integer()) invalid(path + key, "expected an integer");
  return v->get<int>();
}

const json& get_object(const json& obj, const char* key, const std::string& path) {
  const json* v = find(obj, key);
  if (v == nullptr) invalid(path + key, "missing required field");
  if (!v->is_object()) invalid(path + key, "expected an object");
  return *v;
}

Vec3 parse_vec3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) invalid(path, "expected [x, y, z]");
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    if (!v[i].is_number()) invalid(path, "expected numeric coordinates");
    out[i] = v[i].get<double>();
  }
  return out;
}

std::vector<double> parse_numbers(const json& v, const std::string& path) {
  if (!v.is_array()) invalid(path, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) invalid(path, "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

GridRef parse_grid(const json& v, const std::string& path, const std::filesystem::path& base) {
  GridRef ref;
  if (v.is_string()) {
    ref.name = v.get<std::string>();
    const std::string prefix = "fliege_";
    if (ref.name.rfind(prefix, 0) != 0) invalid(path, "unknown grid '" + ref.name + "'");
    int count = 0;
    try {
      std::size_t used = 0;
      count = std::stoi(ref.name.substr(prefix.size()), &used);
      if (used + prefix.size() != ref.name.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      invalid(path, "unknown grid '" + ref.name + "'");
    }
    try {
      ref.grid = fliege_grid(count);
    } catch (const UnsupportedGridError& e) {
      invalid(path, e.what());
    }
  } else if (v.is_object() && v.contains("file") && v["file"].is_string()) {
    ref.file = v["file"].get<std::string>();
    const auto resolved = ref.file.is_absolute() ? ref.file : base / ref.file;
    try {
      ref.grid = std::make_shared<const QuadratureGrid>(QuadratureGrid::load_csv(resolved));
    } catch (const Error& e) {
      invalid(path, e.what());
    }
  } else {
    invalid(path, "expected a grid name or {\"file\": path}");
  }
  return ref;
}

json grid_to_json(const GridRef& ref) {
  if (!ref.name.empty()) return ref.name;
  return json{{"file", ref.file.generic_string()}};
}

json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

bool Scene::operator==(const Scene& other) const {
  return schema_version == other.schema_version && speed_of_sound == other.speed_of_sound &&
         sample_rate == other.sample_rate && frame_size == other.frame_size && hop_size == other.hop_size &&
         sources == other.sources && microphone == other.microphone && planewave == other.planewave &&
         mixedwave == other.mixedwave && ear_offset == other.ear_offset && analysis == other.analysis &&
         irls == other.irls;
}

const DistributionSpec& Scene::distribution(SourceModel model) const {
  const auto& d = model == SourceModel::planewave ? planewave : mixedwave;
  if (!d) {
    throw ModelError(std::string("scene defines no ") + (model == SourceModel::planewave ? "planewave" : "mixedwave") +
                     " distribution");
  }
  return *d;
}

Scene parse_scene(const std::string& json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scene is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("scene root must be a JSON object");

  Scene s;
  s.base_dir = base_dir;
  s.schema_version = get_int(root, "schema_version", "");
  if (s.schema_version != kSceneSchemaVersion) {
    invalid("schema_version", "unsupported version " + std::to_string(s.schema_version) + " (expected " +
                                  std::to_string(kSceneSchemaVersion) + ")");
  }
  s.speed_of_sound = get_number(root, "speed_of_sound", "", kDefaultSpeedOfSound);
  s.sample_rate = get_number(root, "sample_rate", "", kDefaultSampleRate);
  if (const json* stft = find(root, "stft")) {
    if (!stft->is_object()) invalid("stft", "expected an object");
    s.frame_size = get_int(*stft, "frame_size", "stft.", kDefaultFrameSize);
    s.hop_size = get_int(*stft, "hop_size", "stft.", kDefaultHopSize);
  }

  const json* sources = find(root, "sources");
  if (sources == nullptr) invalid("sources", "missing required field");
  if (!sources->is_array()) invalid("sources", "expected an array");
  for (std::size_t i = 0; i < sources->size(); ++i) {
    const std::string path = "sources[" + std::to_string(i) + "].";
    const json& src = (*sources)[i];
    if (!src.is_object()) invalid("sources[" + std::to_string(i) + "]", "expected an object");
    PointSourceSpec spec;
    const json* pos = find(src, "position");
    if (pos == nullptr) invalid(path + "position", "missing required field");
    spec.position = parse_vec3(*pos, path + "position");
    if (const json* sig = find(src, "signal")) {
      if (!sig->is_string()) invalid(path + "signal", "expected a file path");
      spec.signal_file = sig->get<std::string>();
    }
    s.sources.push_back(std::move(spec));
  }

  const json& mic = get_object(root, "microphone", "");
  s.microphone.order = get_int(mic, "order", "microphone.");
  s.microphone.radius = get_number(mic, "radius", "microphone.");
  const json* sensors = find(mic, "sensor_grid");
  if (sensors == nullptr) invalid("microphone.sensor_grid", "missing required field");
  s.microphone.sensor_grid = parse_grid(*sensors, "microphone.sensor_grid", base_dir);
  s.microphone.simulation_order = get_int(mic, "simulation_order", "microphone.", s.microphone.order + 8);
  if (const json* band = find(mic, "usable_band_hz")) {
    const auto b = parse_numbers(*band, "microphone.usable_band_hz");
    if (b.size() != 2) invalid("microphone.usable_band_hz", "expected [min, max]");
    s.microphone.band_min_hz = b[0];
    s.microphone.band_max_hz = b[1];
  } else {
    s.microphone.band_min_hz = 0.0;
    s.microphone.band_max_hz = s.sample_rate / 2.0;
  }

  const json& dists = get_object(root, "distributions", "");
  if (const json* pw = find(dists, "planewave")) {
    if (!pw->is_object()) invalid("distributions.planewave", "expected an object");
    DistributionSpec d;
    d.model = SourceModel::planewave;
    const json* g = find(*pw, "direction_grid");
    if (g == nullptr) invalid("distributions.planewave.direction_grid", "missing required field");
    d.direction_grid = parse_grid(*g, "distributions.planewave.direction_grid", base_dir);
    s.planewave = std::move(d);
  }
  if (const json* mw = find(dists, "mixedwave")) {
    if (!mw->is_object()) invalid("distributions.mixedwave", "expected an object");
    DistributionSpec d;
    d.model = SourceModel::mixedwave;
    const json* g = find(*mw, "direction_grid");
    if (g == nullptr) invalid("distributions.mixedwave.direction_grid", "missing required field");
    d.direction_grid = parse_grid(*g, "distributions.mixedwave.direction_grid", base_dir);
    const json* radii = find(*mw, "radii");
    if (radii == nullptr) invalid("distributions.mixedwave.radii", "missing required field");
    d.radii = parse_numbers(*radii, "distributions.mixedwave.radii");
    s.mixedwave = std::move(d);
  }

  if (const json* listener = find(root, "listener")) {
    if (!listener->is_object()) invalid("listener", "expected an object");
    if (listener->contains("rotation") || listener->contains("orientation")) {
      invalid("listener.rotation", "head rotation is not supported; the head faces +x");
    }
    s.ear_offset = get_number(*listener, "ear_offset", "listener.", kDefaultEarOffset);
  }

  if (const json* analysis = find(root, "analysis")) {
    if (!analysis->is_object()) invalid("analysis", "expected an object");
    const json& a = *analysis;
    if (const json* f = find(a, "frequencies")) s.analysis.frequencies = parse_numbers(*f, "analysis.frequencies");
    if (const json* lp = find(a, "listener_positions")) {
      if (!lp->is_array()) invalid("analysis.listener_positions", "expected an array of [x, y, z]");
      for (std::size_t i = 0; i < lp->size(); ++i) {
        s.analysis.listener_positions.push_back(
            parse_vec3((*lp)[i], "analysis.listener_positions[" + std::to_string(i) + "]"));
      }
    }
    if (const json* fg = find(a, "field_grid")) {
      if (!fg->is_object()) invalid("analysis.field_grid", "expected an object");
      auto& g = s.analysis.field_grid;
      if (const json* plane = find(*fg, "plane")) {
        if (!plane->is_string()) invalid("analysis.field_grid.plane", "expected a string");
        g.plane = plane->get<std::string>();
      }
      if (const json* c = find(*fg, "center")) g.center = parse_vec3(*c, "analysis.field_grid.center");
      if (const json* ext = find(*fg, "extent")) {
        const auto e = parse_numbers(*ext, "analysis.field_grid.extent");
        if (e.size() != 2) invalid("analysis.field_grid.extent", "expected [width, height]");
        g.width = e[0];
        g.height = e[1];
      }
      g.resolution = get_number(*fg, "resolution", "analysis.field_grid.", g.resolution);
    }
    if (const json* r = find(a, "sphere_radii")) s.analysis.sphere_radii = parse_numbers(*r, "analysis.sphere_radii");
    s.analysis.sphere_points = get_int(a, "sphere_points", "analysis.", s.analysis.sphere_points);
    if (const json* band = find(a, "band")) {
      if (!band->is_object()) invalid("analysis.band", "expected an object");
      s.analysis.band_min_hz = get_number(*band, "min_hz", "analysis.band.", s.analysis.band_min_hz);
      s.analysis.band_max_hz = get_number(*band, "max_hz", "analysis.band.", s.analysis.band_max_hz);
      s.analysis.band_count = get_int(*band, "count", "analysis.band.", s.analysis.band_count);
      s.analysis.band_radius = get_number(*band, "radius", "analysis.band.", s.analysis.band_radius);
    }
  }

  if (const json* irls = find(root, "irls")) {
    if (!irls->is_object()) invalid("irls", "expected an object");
    s.irls.p = get_number(*irls, "p", "irls.", s.irls.p);
    s.irls.max_iterations = get_int(*irls, "max_iterations", "irls.", s.irls.max_iterations);
  }

  validate_scene(s);
  return s;
}

void validate_scene(const Scene& s) {
  if (!(s.speed_of_sound > 0.0) || !std::isfinite(s.speed_of_sound)) invalid("speed_of_sound", "must be positive");
  if (!(s.sample_rate > 0.0)) invalid("sample_rate", "must be positive");
  if (s.frame_size <= 0 || s.frame_size % 2 != 0) invalid("stft.frame_size", "must be a positive even integer");
  if (s.hop_size <= 0 || s.hop_size > s.frame_size) invalid("stft.hop_size", "must be in (0, frame_size]");

  const auto& mic = s.microphone;
  if (mic.order < 0) invalid("microphone.order", "must be >= 0");
  if (!(mic.radius > 0.0)) invalid("microphone.radius", "must be positive");
  if (!mic.sensor_grid.grid) invalid("microphone.sensor_grid", "grid not loaded");
  if (mic.sensor_grid.grid->max_fit_order() < mic.order) {
    invalid("microphone.sensor_grid", std::to_string(mic.sensor_grid.grid->size()) +
                                          " sensors cannot resolve order " + std::to_string(mic.order));
  }
  if (mic.simulation_order < mic.order) invalid("microphone.simulation_order", "must be >= microphone.order");
  if (!(mic.band_min_hz >= 0.0) || !(mic.band_max_hz > mic.band_min_hz)) {
    invalid("microphone.usable_band_hz", "expected 0 <= min < max");
  }

  if (s.sources.empty()) invalid("sources", "at least one source is required");
  double max_translation = 0.0;
  for (const auto& p : s.analysis.listener_positions) max_translation = std::max(max_translation, p.norm());

  if (!s.planewave && !s.mixedwave) invalid("distributions", "define planewave and/or mixedwave");
  for (const auto* d : {s.planewave ? &*s.planewave : nullptr, s.mixedwave ? &*s.mixedwave : nullptr}) {
    if (d == nullptr) continue;
    const std::string path = d->model == SourceModel::planewave ? "distributions.planewave" : "distributions.mixedwave";
    if (!d->direction_grid.grid) invalid(path + ".direction_grid", "grid not loaded");
    if (d->model == SourceModel::mixedwave) {
      if (d->radii.size() != 2) invalid(path + ".radii", "expected [near, far]");
      if (!(d->radii[0] > 0.0) || !(d->radii[1] > d->radii[0])) invalid(path + ".radii", "expected 0 < near < far");
      if (!(d->radii[0] > max_translation)) {
        invalid(path + ".radii", "near radius must exceed the largest listener translation");
      }
    }
  }

  const double far = s.mixedwave ? s.mixedwave->radii[1] : std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.sources.size(); ++i) {
    const std::string path = "sources[" + std::to_string(i) + "].position";
    const double r = s.sources[i].position.norm();
    if (!std::isfinite(r)) invalid(path, "must be finite");
    if (!(r > mic.radius)) invalid(path, "source lies inside the microphone radius");
    if (!(r < far)) invalid(path, "source lies outside the far-field shell");
  }

  for (std::size_t i = 0; i < s.analysis.frequencies.size(); ++i) {
    const double f = s.analysis.frequencies[i];
    if (!(f > 0.0)) invalid("analysis.frequencies[" + std::to_string(i) + "]", "must be positive");
    if (f < mic.band_min_hz || f > mic.band_max_hz) {
      invalid("analysis.frequencies[" + std::to_string(i) + "]", "outside the microphone's usable band");
    }
  }
  for (std::size_t i = 0; i < s.analysis.listener_positions.size(); ++i) {
    if (!s.analysis.listener_positions[i].allFinite()) {
      invalid("analysis.listener_positions[" + std::to_string(i) + "]", "must be finite");
    }
  }
  const auto& g = s.analysis.field_grid;
  if (g.plane != "xy" && g.plane != "xz" && g.plane != "yz") invalid("analysis.field_grid.plane", "expected xy, xz or yz");
  if (!(g.resolution > 0.0)) invalid("analysis.field_grid.resolution", "must be positive");
  if (!(g.width > 0.0) || !(g.height > 0.0)) invalid("analysis.field_grid.extent", "must be positive");
  for (std::size_t i = 0; i < s.analysis.sphere_radii.size(); ++i) {
    if (!(s.analysis.sphere_radii[i] > 0.0)) invalid("analysis.sphere_radii[" + std::to_string(i) + "]", "must be positive");
  }
  if (s.analysis.sphere_points <= 0) invalid("analysis.sphere_points", "must be positive");
  if (!(s.analysis.band_min_hz > 0.0) || !(s.analysis.band_max_hz > s.analysis.band_min_hz)) {
    invalid("analysis.band", "expected 0 < min_hz < max_hz");
  }
  if (s.analysis.band_count < 2) invalid("analysis.band.count", "must be >= 2");
  if (!(s.analysis.band_radius > 0.0)) invalid("analysis.band.radius", "must be positive");
  if (!(s.ear_offset > 0.0)) invalid("listener.ear_offset", "must be positive");
  if (!(s.irls.p > 0.0) || s.irls.p > 2.0) invalid("irls.p", "must be in (0, 2]");
  if (s.irls.max_iterations <= 0) invalid("irls.max_iterations", "must be positive");
}

Scene load_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open scene file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scene(buffer.str(), path.parent_path());
}

std::string serialize_scene(const Scene& s) {
  json root;
  root["schema_version"] = s.schema_version;
  root["speed_of_sound"] = s.speed_of_sound;
  root["sample_rate"] = s.sample_rate;
  root["stft"] = {{"frame_size", s.frame_size}, {"hop_size", s.hop_size}};
  json sources = json::array();
  for (const auto& src : s.sources) {
    json j{{"position", vec_to_json(src.position)}};
    if (!src.signal_file.empty()) j["signal"] = src.signal_file.generic_string();
    sources.push_back(j);
  }
  root["sources"] = sources;
  root["microphone"] = {{"order", s.microphone.order},
                        {"radius", s.microphone.radius},
                        {"sensor_grid", grid_to_json(s.microphone.sensor_grid)},
                        {"simulation_order", s.microphone.simulation_order},
                        {"usable_band_hz", {s.microphone.band_min_hz, s.microphone.band_max_hz}}};
  json dists = json::object();
  if (s.planewave) dists["planewave"] = {{"direction_grid", grid_to_json(s.planewave->direction_grid)}};
  if (s.mixedwave) {
    dists["mixedwave"] = {{"direction_grid", grid_to_json(s.mixedwave->direction_grid)}, {"radii", s.mixedwave->radii}};
  }
  root["distributions"] = dists;
  root["listener"] = {{"ear_offset", s.ear_offset}};
  json listeners = json::array();
  for (const auto& p : s.analysis.listener_positions) listeners.push_back(vec_to_json(p));
  const auto& g = s.analysis.field_grid;
  root["analysis"] = {{"frequencies", s.analysis.frequencies},
                      {"listener_positions", listeners},
                      {"field_grid",
                       {{"plane", g.plane},
                        {"center", vec_to_json(g.center)},
                        {"extent", {g.width, g.height}},
                        {"resolution", g.resolution}}},
                      {"sphere_radii", s.analysis.sphere_radii},
                      {"sphere_points", s.analysis.sphere_points},
                      {"band",
                       {{"min_hz", s.analysis.band_min_hz},
                        {"max_hz", s.analysis.band_max_hz},
                        {"count", s.analysis.band_count},
                        {"radius", s.analysis.band_radius}}}};
  root["irls"] = {{"p", s.irls.p}, {"max_iterations", s.irls.max_iterations}};
  return root.dump(2) + "\n";
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << serialize_scene(scene);
}

}  // namespace sft
