#pragma once

// JSON forms used by the HTTP API and the CLI. Temperatures cross this
// boundary in degC; the in-memory types stay in kelvin.

#include <json.hpp>

#include "radtherm/frame.hpp"

namespace radtherm {

using Json = nlohmann::json;

Json to_json(const PixelParameters& p);
PixelParameters pixel_parameters_from_json(const Json& j, const PixelParameters& base = {});

Json to_json(const Polygon& polygon);
Polygon polygon_from_json(const Json& j);

Json to_json(const ParameterMask& mask);
/// Missing fields fall back to the defaults of ParameterMask.
ParameterMask mask_from_json(const Json& j);

Json to_json(const SceneSpec& spec);
SceneSpec scene_from_json(const Json& j);

/// Metadata of a frame (no pixel values).
Json frame_meta_json(const ThermalFrame& frame);
/// Fills ids and provenance of `frame` from a metadata document.
void apply_frame_meta(const Json& j, ThermalFrame& frame);

Json to_json(const RoiGeometry& geom);
RoiGeometry geometry_from_json(const Json& j);

Json to_json(const RoiSummary& s);
/// `unit` labels the value axis ("degC" or "signal").
Json to_json(const RoiStats& st, std::string_view unit);

/// Frame values as shown to operators: degC for corrected frames, signal
/// otherwise.
ThermalFrame display_frame(const ThermalFrame& frame);
std::string_view display_unit(FrameKind kind);

}  // namespace radtherm
