#include "fiberscan/serialize.hpp"

#include <fstream>
#include <iterator>
#include <json.hpp>

#include "fiberscan/error.hpp"

namespace fiberscan {

using Json = nlohmann::ordered_json;

namespace {

Json parse_object(std::string_view text, ErrorCode code, const char* what) {
  Json j;
  try {
    j = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(code, std::string(what) + ": invalid JSON (" + e.what() + ")");
  }
  if (!j.is_object()) throw Error(code, std::string(what) + ": expected a JSON object");
  return j;
}

template <typename T>
T get_as(const Json& j, const std::string& key, ErrorCode code) {
  try {
    return j.get<T>();
  } catch (const Json::exception&) {
    throw Error(code, "field '" + key + "' has the wrong type");
  }
}

int get_int(const Json& j, const std::string& key, ErrorCode code) {
  if (!j.is_number_integer()) throw Error(code, "field '" + key + "' must be an integer");
  return get_as<int>(j, key, code);
}

double get_number(const Json& j, const std::string& key, ErrorCode code) {
  if (!j.is_number()) throw Error(code, "field '" + key + "' must be a number");
  return get_as<double>(j, key, code);
}

Rect get_rect(const Json& j, const std::string& key, ErrorCode code) {
  if (!j.is_array() || j.size() != 4) {
    throw Error(code, "field '" + key + "' must be an array [x, y, w, h]");
  }
  Rect r;
  r.x = get_int(j[0], key, code);
  r.y = get_int(j[1], key, code);
  r.w = get_int(j[2], key, code);
  r.h = get_int(j[3], key, code);
  return r;
}

Json rect_json(const Rect& r) { return Json::array({r.x, r.y, r.w, r.h}); }

std::array<double, 2> get_pair(const Json& j, const std::string& key, ErrorCode code) {
  if (!j.is_array() || j.size() != 2) {
    throw Error(code, "field '" + key + "' must be a two-element array");
  }
  return {get_number(j[0], key, code), get_number(j[1], key, code)};
}

Json config_json(const DetectorConfig& c) {
  Json j;
  j["se_close_side"] = c.se_close_side;
  j["se_open_side"] = c.se_open_side;
  j["se_dil_side"] = c.se_dil_side;
  j["eps"] = c.eps;
  j["smooth_sigma"] = c.smooth_sigma;
  j["probe_delta"] = c.probe_delta;
  j["t_low"] = c.t_low;
  j["t_high"] = c.t_high;
  j["gap"] = c.gap;
  j["min_length"] = c.min_length;
  j["min_fiber_count"] = c.min_fiber_count;
  j["photo_region"] = c.photo_region ? rect_json(*c.photo_region) : Json(nullptr);
  return j;
}

}  // namespace

DetectorConfig config_from_json(std::string_view text, const DetectorConfig& base) {
  constexpr ErrorCode kCode = ErrorCode::kInvalidConfig;
  const Json j = parse_object(text, kCode, "config");
  DetectorConfig c = base;
  for (const auto& [key, value] : j.items()) {
    if (key == "se_close_side") c.se_close_side = get_int(value, key, kCode);
    else if (key == "se_open_side") c.se_open_side = get_int(value, key, kCode);
    else if (key == "se_dil_side") c.se_dil_side = get_int(value, key, kCode);
    else if (key == "eps") c.eps = get_number(value, key, kCode);
    else if (key == "smooth_sigma") c.smooth_sigma = get_number(value, key, kCode);
    else if (key == "probe_delta") c.probe_delta = get_number(value, key, kCode);
    else if (key == "t_low") c.t_low = get_number(value, key, kCode);
    else if (key == "t_high") c.t_high = get_number(value, key, kCode);
    else if (key == "gap") c.gap = get_int(value, key, kCode);
    else if (key == "min_length") c.min_length = get_int(value, key, kCode);
    else if (key == "min_fiber_count") c.min_fiber_count = get_int(value, key, kCode);
    else if (key == "photo_region") {
      if (value.is_null()) c.photo_region.reset();
      else c.photo_region = get_rect(value, key, kCode);
    } else {
      throw Error(kCode, "unknown config key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

std::string config_to_json(const DetectorConfig& config) {
  return config_json(config).dump(2) + "\n";
}

std::string report_to_json(const DetectionReport& report, const std::string& input,
                           bool include_timings) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["input"] = input;
  j["width"] = report.width;
  j["height"] = report.height;
  j["config"] = config_json(report.config);
  Json fibers = Json::array();
  for (const FiberComponent& f : report.fibers) {
    Json item;
    item["bbox"] = rect_json(f.bbox);
    item["length_px"] = f.length();
    item["centroid"] = Json::array({f.centroid_x, f.centroid_y});
    fibers.push_back(std::move(item));
  }
  j["fibers"] = std::move(fibers);
  j["fiber_count"] = report.fiber_count;
  j["verdict"] = to_string(report.verdict);
  Json timings = Json::object();
  if (include_timings) {
    for (const StageTiming& t : report.timings) timings[t.stage] = t.ms;
  }
  j["timings_ms"] = std::move(timings);
  return j.dump(2) + "\n";
}

std::string truth_to_json(const GroundTruth& truth) {
  Json j;
  j["seed"] = truth.seed;
  j["model_page"] = truth.model_page;
  Json fibers = Json::array();
  for (const TruthFiber& f : truth.fibers) {
    Json pts = Json::array();
    for (const Point2& p : f.points) pts.push_back(Json::array({p.x, p.y}));
    Json item;
    item["points"] = std::move(pts);
    item["amplitude"] = f.amplitude;
    fibers.push_back(std::move(item));
  }
  j["fibers"] = std::move(fibers);
  return j.dump(1) + "\n";
}

GroundTruth truth_from_json(std::string_view text) {
  constexpr ErrorCode kCode = ErrorCode::kCorpus;
  const Json j = parse_object(text, kCode, "ground truth");
  GroundTruth t;
  if (!j.contains("seed") || !j["seed"].is_number_unsigned()) {
    throw Error(kCode, "ground truth: 'seed' must be an unsigned integer");
  }
  t.seed = j["seed"].get<std::uint64_t>();
  if (!j.contains("model_page") || !j["model_page"].is_boolean()) {
    throw Error(kCode, "ground truth: 'model_page' must be a boolean");
  }
  t.model_page = j["model_page"].get<bool>();
  if (!j.contains("fibers") || !j["fibers"].is_array()) {
    throw Error(kCode, "ground truth: 'fibers' must be an array");
  }
  for (const Json& item : j["fibers"]) {
    if (!item.is_object() || !item.contains("points") || !item["points"].is_array()) {
      throw Error(kCode, "ground truth: each fiber needs a 'points' array");
    }
    TruthFiber f;
    for (const Json& p : item["points"]) {
      const auto xy = get_pair(p, "points", kCode);
      f.points.push_back({xy[0], xy[1]});
    }
    if (f.points.empty()) throw Error(kCode, "ground truth: fiber without points");
    f.amplitude = item.contains("amplitude") ? get_number(item["amplitude"], "amplitude", kCode)
                                             : 0.0;
    t.fibers.push_back(std::move(f));
  }
  return t;
}

SyntheticSpec spec_from_json(std::string_view text, const SyntheticSpec& base) {
  constexpr ErrorCode kCode = ErrorCode::kInvalidSpec;
  const Json j = parse_object(text, kCode, "synthetic spec");
  SyntheticSpec s = base;
  for (const auto& [key, value] : j.items()) {
    if (key == "width") s.width = get_int(value, key, kCode);
    else if (key == "height") s.height = get_int(value, key, kCode);
    else if (key == "background_base") s.background_base = get_number(value, key, kCode);
    else if (key == "background_gradient") s.background_gradient = get_pair(value, key, kCode);
    else if (key == "noise_sigma") s.noise_sigma = get_number(value, key, kCode);
    else if (key == "fiber_count") s.fiber_count = get_int(value, key, kCode);
    else if (key == "fiber_length_range") s.fiber_length_range = get_pair(value, key, kCode);
    else if (key == "fiber_amplitude_range") s.fiber_amplitude_range = get_pair(value, key, kCode);
    else if (key == "along_fiber_modulation") s.along_fiber_modulation = get_number(value, key, kCode);
    else if (key == "text_blocks") s.text_blocks = get_int(value, key, kCode);
    else if (key == "model_page") {
      if (!value.is_boolean()) throw Error(kCode, "field 'model_page' must be a boolean");
      s.model_page = value.get<bool>();
    } else if (key == "photo_patch") {
      if (value.is_null()) {
        s.photo_patch.reset();
      } else {
        if (!value.is_object() || !value.contains("region") || !value.contains("intensity")) {
          throw Error(kCode, "field 'photo_patch' must be {region: [x,y,w,h], intensity}");
        }
        s.photo_patch = PhotoPatch{get_rect(value["region"], "photo_patch.region", kCode),
                                   get_number(value["intensity"], "photo_patch.intensity", kCode)};
      }
    } else {
      throw Error(kCode, "unknown synthetic spec key '" + key + "'");
    }
  }
  s.validate();
  return s;
}

std::string spec_to_json(const SyntheticSpec& s) {
  Json j;
  j["width"] = s.width;
  j["height"] = s.height;
  j["background_base"] = s.background_base;
  j["background_gradient"] = Json::array({s.background_gradient[0], s.background_gradient[1]});
  j["noise_sigma"] = s.noise_sigma;
  j["fiber_count"] = s.fiber_count;
  j["fiber_length_range"] = Json::array({s.fiber_length_range[0], s.fiber_length_range[1]});
  j["fiber_amplitude_range"] =
      Json::array({s.fiber_amplitude_range[0], s.fiber_amplitude_range[1]});
  j["along_fiber_modulation"] = s.along_fiber_modulation;
  j["text_blocks"] = s.text_blocks;
  if (s.photo_patch) {
    Json p;
    p["region"] = rect_json(s.photo_patch->region);
    p["intensity"] = s.photo_patch->intensity;
    j["photo_patch"] = std::move(p);
  } else {
    j["photo_patch"] = nullptr;
  }
  j["model_page"] = s.model_page;
  return j.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kUnreadable, "cannot open file: " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kUnwritable, "cannot open for writing: " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kUnwritable, "write failed: " + path.string());
}

}  // namespace fiberscan
