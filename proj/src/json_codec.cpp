#include "radtherm/json_codec.hpp"

#include <cmath>

#include "radtherm/errors.hpp"
#include "radtherm/units.hpp"

namespace radtherm {

namespace {

double number(const Json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_number()) throw DomainError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

Json vertex_list(const std::vector<Eigen::Vector2d>& pts) {
  Json arr = Json::array();
  for (const auto& p : pts) arr.push_back({p.x(), p.y()});
  return arr;
}

std::vector<Eigen::Vector2d> vertices_from(const Json& j) {
  if (!j.is_array()) throw DomainError("vertices must be an array of [x, y] pairs");
  std::vector<Eigen::Vector2d> out;
  out.reserve(j.size());
  for (const auto& v : j) {
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
      out.emplace_back(v[0].get<double>(), v[1].get<double>());
    } else if (v.is_object() && v.contains("x") && v.contains("y")) {
      out.emplace_back(number(v, "x", 0.0), number(v, "y", 0.0));
    } else {
      throw DomainError("vertex must be [x, y] or {\"x\":..,\"y\":..}");
    }
  }
  return out;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const PixelParameters& p) {
  return {{"wall_temp_C", kelvin_to_celsius(p.wall_temp)},
          {"gas_temp_C", kelvin_to_celsius(p.gas_temp)},
          {"eps_height", p.eps_height},
          {"eps_mean", p.eps_mean},
          {"eps_sigma", p.eps_sigma},
          {"alpha_height", p.alpha_height},
          {"alpha_mean", p.alpha_mean},
          {"alpha_sigma", p.alpha_sigma}};
}

PixelParameters pixel_parameters_from_json(const Json& j, const PixelParameters& base) {
  if (!j.is_object()) throw DomainError("parameters must be an object");
  PixelParameters p = base;
  p.wall_temp = celsius_to_kelvin(number(j, "wall_temp_C", kelvin_to_celsius(base.wall_temp)));
  p.gas_temp = celsius_to_kelvin(number(j, "gas_temp_C", kelvin_to_celsius(base.gas_temp)));
  p.eps_height = number(j, "eps_height", base.eps_height);
  p.eps_mean = number(j, "eps_mean", base.eps_mean);
  p.eps_sigma = number(j, "eps_sigma", base.eps_sigma);
  p.alpha_height = number(j, "alpha_height", base.alpha_height);
  p.alpha_mean = number(j, "alpha_mean", base.alpha_mean);
  p.alpha_sigma = number(j, "alpha_sigma", base.alpha_sigma);
  return p;
}

Json to_json(const Polygon& polygon) { return vertex_list(polygon); }

Polygon polygon_from_json(const Json& j) { return vertices_from(j); }

Json to_json(const ParameterMask& mask) {
  Json regions = Json::array();
  for (const auto& r : mask.regions) regions.push_back({{"polygon", to_json(r.polygon)}, {"parameters", to_json(r.parameters)}});
  return {{"mask_id", mask.mask_id},
          {"camera_id", mask.camera_id},
          {"version", mask.version},
          {"defaults", to_json(mask.defaults)},
          {"regions", regions}};
}

ParameterMask mask_from_json(const Json& j) {
  if (!j.is_object()) throw DomainError("mask must be an object");
  ParameterMask m;
  m.mask_id = j.value("mask_id", std::string{});
  m.camera_id = j.value("camera_id", std::string{});
  m.version = j.value("version", 0);
  if (j.contains("defaults")) m.defaults = pixel_parameters_from_json(j.at("defaults"));
  if (j.contains("regions")) {
    if (!j.at("regions").is_array()) throw DomainError("regions must be an array");
    for (const auto& r : j.at("regions")) {
      if (!r.is_object() || !r.contains("polygon")) throw DomainError("region needs a polygon");
      MaskRegion region;
      region.polygon = polygon_from_json(r.at("polygon"));
      region.parameters = pixel_parameters_from_json(r.value("parameters", Json::object()), m.defaults);
      m.regions.push_back(std::move(region));
    }
  }
  return m;
}

Json to_json(const SceneSpec& spec) {
  Json tubes = Json::array();
  for (const auto& t : spec.tubes) {
    tubes.push_back({{"center_x", t.center_x},
                     {"center_y", t.center_y},
                     {"radius", t.radius},
                     {"temp_C", kelvin_to_celsius(t.temp)},
                     {"gradient", t.gradient}});
  }
  Json regions = Json::array();
  for (const auto& r : spec.regions) regions.push_back({{"polygon", to_json(r.polygon)}, {"parameters", to_json(r.parameters)}});
  return {{"camera_id", spec.camera_id},
          {"width", spec.width},
          {"height", spec.height},
          {"timestamp_ms", spec.timestamp_ms},
          {"defaults", to_json(spec.defaults)},
          {"regions", regions},
          {"tubes", tubes},
          {"noise_amplitude", spec.noise_amplitude},
          {"seed", spec.seed}};
}

SceneSpec scene_from_json(const Json& j) {
  if (!j.is_object()) throw DomainError("scene must be an object");
  SceneSpec s;
  s.camera_id = j.value("camera_id", s.camera_id);
  s.width = j.value("width", s.width);
  s.height = j.value("height", s.height);
  s.timestamp_ms = j.value("timestamp_ms", s.timestamp_ms);
  if (j.contains("defaults")) s.defaults = pixel_parameters_from_json(j.at("defaults"));
  if (j.contains("regions")) {
    for (const auto& r : j.at("regions")) {
      MaskRegion region;
      region.polygon = polygon_from_json(r.at("polygon"));
      region.parameters = pixel_parameters_from_json(r.value("parameters", Json::object()), s.defaults);
      s.regions.push_back(std::move(region));
    }
  }
  if (j.contains("tubes")) {
    for (const auto& t : j.at("tubes")) {
      TubeSpec tube;
      tube.center_x = number(t, "center_x", tube.center_x);
      tube.center_y = number(t, "center_y", tube.center_y);
      tube.radius = number(t, "radius", tube.radius);
      tube.temp = celsius_to_kelvin(number(t, "temp_C", kelvin_to_celsius(tube.temp)));
      tube.gradient = number(t, "gradient", tube.gradient);
      s.tubes.push_back(tube);
    }
  }
  s.noise_amplitude = number(j, "noise_amplitude", s.noise_amplitude);
  s.seed = j.value("seed", s.seed);
  return s;
}

Json frame_meta_json(const ThermalFrame& frame) {
  Json j = {{"frame_id", frame.frame_id},
            {"camera_id", frame.camera_id},
            {"timestamp_ms", frame.timestamp_ms},
            {"kind", to_string(frame.kind)},
            {"width", frame.width()},
            {"height", frame.height()},
            {"unit", display_unit(frame.kind)},
            {"error_count", frame.error_count}};
  j["mask_version"] = frame.mask_version ? Json(*frame.mask_version) : Json(nullptr);
  j["method"] = frame.method ? Json(to_string(*frame.method)) : Json(nullptr);
  j["source_frame_id"] = frame.source_frame_id.empty() ? Json(nullptr) : Json(frame.source_frame_id);
  return j;
}

void apply_frame_meta(const Json& j, ThermalFrame& frame) {
  frame.frame_id = j.value("frame_id", std::string{});
  frame.camera_id = j.value("camera_id", std::string{});
  frame.error_count = j.value("error_count", 0);
  if (j.contains("mask_version") && !j.at("mask_version").is_null()) frame.mask_version = j.at("mask_version").get<int>();
  if (j.contains("method") && !j.at("method").is_null()) {
    frame.method = parse_correction_method(j.at("method").get<std::string>());
  }
  if (j.contains("source_frame_id") && !j.at("source_frame_id").is_null()) {
    frame.source_frame_id = j.at("source_frame_id").get<std::string>();
  }
}

Json to_json(const RoiGeometry& geom) { return {{"kind", to_string(geom.kind)}, {"vertices", vertex_list(geom.vertices)}}; }

RoiGeometry geometry_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("vertices")) {
    throw DomainError("geometry needs 'kind' and 'vertices'");
  }
  RoiGeometry g;
  g.kind = parse_roi_kind(j.at("kind").get<std::string>());
  g.vertices = vertices_from(j.at("vertices"));
  return g;
}

Json to_json(const RoiSummary& s) {
  return {{"count", s.count},          {"invalid", s.invalid},          {"min", finite_or_null(s.min)},
          {"max", finite_or_null(s.max)}, {"mean", finite_or_null(s.mean)}, {"std", finite_or_null(s.std)},
          {"p5", finite_or_null(s.p5)},   {"p25", finite_or_null(s.p25)},   {"p50", finite_or_null(s.p50)},
          {"p75", finite_or_null(s.p75)}, {"p95", finite_or_null(s.p95)}};
}

Json to_json(const RoiStats& st, std::string_view unit) {
  Json j = {{"kind", to_string(st.kind)}, {"unit", unit}, {"summary", to_json(st.summary)}};
  Json pixels = Json::array();
  Json values = Json::array();
  for (std::size_t i = 0; i < st.pixels.size(); ++i) {
    pixels.push_back({st.pixels[i].x(), st.pixels[i].y()});
    values.push_back(finite_or_null(st.values[i]));
  }
  j["pixels"] = pixels;
  j["values"] = values;
  if (st.kind == RoiKind::polygon) {
    j["histogram"] = {{"lo", finite_or_null(st.histogram.lo)},
                      {"hi", finite_or_null(st.histogram.hi)},
                      {"counts", st.histogram.counts}};
  }
  return j;
}

ThermalFrame display_frame(const ThermalFrame& frame) {
  ThermalFrame out = frame;
  if (frame.kind == FrameKind::corrected_temperature) out.values = frame.values - kCelsiusOffset;
  return out;
}

std::string_view display_unit(FrameKind kind) { return kind == FrameKind::corrected_temperature ? "degC" : "signal"; }

}  // namespace radtherm
