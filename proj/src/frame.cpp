#include "radtherm/frame.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <random>

#include "radtherm/errors.hpp"
#include "radtherm/units.hpp"

namespace radtherm {

std::string_view to_string(FrameKind kind) {
  return kind == FrameKind::raw_signal ? "raw_signal" : "corrected_temperature";
}

FrameKind parse_frame_kind(std::string_view text) {
  if (text == "raw_signal") return FrameKind::raw_signal;
  if (text == "corrected_temperature") return FrameKind::corrected_temperature;
  throw DomainError("unknown frame kind '" + std::string(text) + "'");
}

std::string_view to_string(CorrectionMethod method) {
  return method == CorrectionMethod::bisection ? "bisection" : "surrogate";
}

CorrectionMethod parse_correction_method(std::string_view text) {
  if (text == "bisection") return CorrectionMethod::bisection;
  if (text == "surrogate") return CorrectionMethod::surrogate;
  throw DomainError("unknown correction method '" + std::string(text) + "' (expected bisection or surrogate)");
}

// ---------------------------------------------------------------------------
// Parameters and masks

void PixelParameters::validate(const ParameterRanges& r) const {
  auto check = [](const Range& range, double v, const char* name) {
    if (!range.contains(v)) {
      throw DomainError(std::string("parameter ") + name + " = " + std::to_string(v) + " outside [" +
                        std::to_string(range.lo) + ", " + std::to_string(range.hi) + "]");
    }
  };
  check(r.wall_temp, wall_temp, "wall_temp");
  check(r.gas_temp, gas_temp, "gas_temp");
  check(r.eps_height, eps_height, "eps_h");
  check(r.eps_mean, eps_mean, "eps_mu");
  check(r.eps_sigma, eps_sigma, "eps_sigma");
  check(r.alpha_height, alpha_height, "alpha_h");
  check(r.alpha_mean, alpha_mean, "alpha_mu");
  check(r.alpha_sigma, alpha_sigma, "alpha_sigma");
}

Eigen::RowVectorXd PixelParameters::features(double signal) const {
  Eigen::RowVectorXd row(kFeatureCount);
  row << signal, wall_temp, gas_temp, eps_height, eps_mean, eps_sigma, alpha_height, alpha_mean, alpha_sigma;
  return row;
}

FurnaceScene PixelParameters::scene(double tube_temp) const {
  return scene_from_features(features(0.0), tube_temp);
}

void ParameterMask::validate(const ParameterRanges& ranges) const {
  defaults.validate(ranges);
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (regions[i].polygon.size() < 3) {
      throw DomainError("mask region " + std::to_string(i) + ": polygon needs at least 3 vertices");
    }
    regions[i].parameters.validate(ranges);
  }
}

Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> ParameterMask::region_map(int width,
                                                                                             int height) const {
  Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> map =
      Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Constant(height, width, -1);
  for (std::size_t i = 0; i < regions.size(); ++i) {
    for (const auto& p : rasterize_polygon(regions[i].polygon, width, height)) map(p.y(), p.x()) = static_cast<int>(i);
  }
  return map;
}

const PixelParameters& ParameterMask::resolve(int x, int y) const {
  for (auto it = regions.rbegin(); it != regions.rend(); ++it) {
    if (point_in_polygon(it->polygon, x, y)) return it->parameters;
  }
  return defaults;
}

// ---------------------------------------------------------------------------
// Synthetic scenes

void SceneSpec::validate(const SolverConfig& cfg) const {
  if (width < 1 || height < 1) throw DomainError("scene: width and height must be positive");
  if (!(noise_amplitude >= 0.0)) throw DomainError("scene: noise amplitude must be >= 0");
  generating_mask().validate();
  auto in_bracket = [&cfg](double t) { return t >= cfg.bracket_lo && t <= cfg.bracket_hi; };
  for (const auto& tube : tubes) {
    if (!(tube.radius > 0.0)) throw DomainError("scene: tube radius must be positive");
    const double top = tube.temp + tube.gradient * (0.0 - tube.center_y);
    const double bottom = tube.temp + tube.gradient * (height - 1 - tube.center_y);
    if (!in_bracket(tube.temp) || !in_bracket(top) || !in_bracket(bottom)) {
      throw DomainError("scene: tube temperature profile leaves the solver bracket");
    }
  }
}

ParameterMask SceneSpec::generating_mask() const {
  ParameterMask m;
  m.mask_id = camera_id + "-generating";
  m.camera_id = camera_id;
  m.regions = regions;
  m.defaults = defaults;
  m.version = 0;
  return m;
}

FrameValues SceneSpec::ground_truth() const {
  const auto map = generating_mask().region_map(width, height);
  FrameValues truth(height, width);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int r = map(y, x);
      double t = (r < 0 ? defaults : regions[static_cast<std::size_t>(r)].parameters).wall_temp;
      for (const auto& tube : tubes) {
        const double dx = x - tube.center_x;
        const double dy = y - tube.center_y;
        if (dx * dx + dy * dy <= tube.radius * tube.radius) t = tube.temp + tube.gradient * dy;
      }
      truth(y, x) = t;
    }
  }
  return truth;
}

ThermalFrame render_synthetic_frame(const SceneSpec& spec, const QuadratureConfig& q) {
  spec.validate();
  const auto map = spec.generating_mask().region_map(spec.width, spec.height);
  const FrameValues truth = spec.ground_truth();

  ThermalFrame frame;
  frame.camera_id = spec.camera_id;
  frame.timestamp_ms = spec.timestamp_ms;
  frame.kind = FrameKind::raw_signal;
  frame.values.resize(spec.height, spec.width);

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> noise(-spec.noise_amplitude, spec.noise_amplitude);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const int r = map(y, x);
      const auto& params = r < 0 ? spec.defaults : spec.regions[static_cast<std::size_t>(r)].parameters;
      double s = forward_signal(ModelKind::D, params.scene(truth(y, x)), q);
      if (spec.noise_amplitude > 0.0) s += noise(rng);
      frame.values(y, x) = s;
    }
  }
  return frame;
}

ThermalFrame correct_frame(const ThermalFrame& frame, const ParameterMask& mask, CorrectionMethod method,
                           const MlpModel* surrogate, const SolverConfig& cfg, const QuadratureConfig& q) {
  if (frame.kind != FrameKind::raw_signal) throw DomainError("correct_frame: frame is not a raw signal frame");
  if (method == CorrectionMethod::surrogate && surrogate == nullptr) {
    throw DomainError("correct_frame: surrogate method requested but no model loaded");
  }
  const int w = frame.width();
  const int h = frame.height();
  const auto map = mask.region_map(w, h);
  auto params_at = [&](int x, int y) -> const PixelParameters& {
    const int r = map(y, x);
    return r < 0 ? mask.defaults : mask.regions[static_cast<std::size_t>(r)].parameters;
  };

  ThermalFrame out;
  out.camera_id = frame.camera_id;
  out.timestamp_ms = frame.timestamp_ms;
  out.kind = FrameKind::corrected_temperature;
  out.values.resize(h, w);
  out.mask_version = mask.version;
  out.method = method;
  out.source_frame_id = frame.frame_id;

  if (method == CorrectionMethod::bisection) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        try {
          out.values(y, x) = invert_signal(ModelKind::D, params_at(x, y).scene(cfg.bracket_lo), frame.values(y, x),
                                           cfg, q)
                                 .tube_temp;
        } catch (const std::runtime_error&) {
          out.values(y, x) = std::nan("");
          ++out.error_count;
        } catch (const DomainError&) {
          out.values(y, x) = std::nan("");
          ++out.error_count;
        }
      }
    }
  } else {
    Eigen::MatrixXd inputs(static_cast<Eigen::Index>(w) * h, kFeatureCount);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) inputs.row(static_cast<Eigen::Index>(y) * w + x) = params_at(x, y).features(frame.values(y, x));
    }
    const Eigen::VectorXd t = predict(*surrogate, inputs);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) out.values(y, x) = t[static_cast<Eigen::Index>(y) * w + x];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Binary frame files

static_assert(std::endian::native == std::endian::little, "frame files are little-endian");

namespace {

constexpr std::size_t kFrameHeaderSize = 4 + 4 + 4 + 4 + 1 + 8;

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T get(std::string_view bytes, std::size_t& pos, const char* what) {
  if (bytes.size() - pos < sizeof(T)) throw ParseError(std::string("frame file truncated in ") + what, pos);
  T v;
  std::memcpy(&v, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

std::string encode_frame(const ThermalFrame& frame) {
  std::string out;
  out.reserve(kFrameHeaderSize + static_cast<std::size_t>(frame.values.size()) * 4);
  out.append("THFR", 4);
  put<std::uint32_t>(out, kFrameFileVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(frame.width()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(frame.height()));
  put<std::uint8_t>(out, static_cast<std::uint8_t>(frame.kind));
  put<std::int64_t>(out, frame.timestamp_ms);
  const bool celsius = frame.kind == FrameKind::corrected_temperature;
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      const double v = frame.values(y, x);
      put<float>(out, static_cast<float>(celsius ? kelvin_to_celsius(v) : v));
    }
  }
  return out;
}

ThermalFrame decode_frame(std::string_view bytes) {
  std::size_t pos = 0;
  if (bytes.size() < 4 || bytes.substr(0, 4) != "THFR") throw ParseError("frame file: bad magic", 0);
  pos = 4;
  const auto version_at = pos;
  if (get<std::uint32_t>(bytes, pos, "version") != kFrameFileVersion) {
    throw ParseError("frame file: unsupported version", version_at);
  }
  const auto width = get<std::uint32_t>(bytes, pos, "width");
  const auto height = get<std::uint32_t>(bytes, pos, "height");
  const auto kind_at = pos;
  const auto kind = get<std::uint8_t>(bytes, pos, "kind");
  if (kind > 1) throw ParseError("frame file: unknown kind", kind_at);
  ThermalFrame f;
  f.kind = static_cast<FrameKind>(kind);
  f.timestamp_ms = get<std::int64_t>(bytes, pos, "timestamp");
  const std::uint64_t count = std::uint64_t{width} * height;
  if ((bytes.size() - pos) != count * 4) throw ParseError("frame file: pixel payload size mismatch", pos);
  f.values.resize(height, width);
  const bool celsius = f.kind == FrameKind::corrected_temperature;
  for (std::uint32_t y = 0; y < height; ++y) {
    for (std::uint32_t x = 0; x < width; ++x) {
      const double v = get<float>(bytes, pos, "pixels");
      f.values(y, x) = celsius ? celsius_to_kelvin(v) : v;
    }
  }
  return f;
}

}  // namespace radtherm
