#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "radtherm/inverse_solver.hpp"
#include "radtherm/surrogate.hpp"

namespace radtherm {

using FrameValues = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;  // height x width

enum class FrameKind : std::uint8_t { raw_signal = 0, corrected_temperature = 1 };

std::string_view to_string(FrameKind kind);
FrameKind parse_frame_kind(std::string_view text);

enum class CorrectionMethod { bisection, surrogate };

std::string_view to_string(CorrectionMethod method);
CorrectionMethod parse_correction_method(std::string_view text);

/// One thermal image. Raw frames hold band-integrated signal; corrected
/// frames hold tube temperature in kelvin (NaN where inversion failed).
struct ThermalFrame {
  std::string frame_id;
  std::string camera_id;
  std::int64_t timestamp_ms = 0;  // unix epoch, UTC
  FrameKind kind = FrameKind::raw_signal;
  FrameValues values;

  // Provenance of corrected frames.
  std::optional<int> mask_version;
  std::optional<CorrectionMethod> method;
  int error_count = 0;
  std::string source_frame_id;

  int width() const { return static_cast<int>(values.cols()); }
  int height() const { return static_cast<int>(values.rows()); }
};

/// Scene parameters assigned to a pixel by an operator mask. Temperatures in K.
struct PixelParameters {
  double wall_temp = 1378.15;
  double gas_temp = 1253.15;
  double eps_height = 0.82;
  double eps_mean = 3.9;
  double eps_sigma = 0.2;
  double alpha_height = 0.05;
  double alpha_mean = 3.9;
  double alpha_sigma = 0.2;

  /// Throws DomainError when a value lies outside `ranges`.
  void validate(const ParameterRanges& ranges = {}) const;
  FurnaceScene scene(double tube_temp) const;
  /// Surrogate input row for the given measured signal.
  Eigen::RowVectorXd features(double signal) const;

  bool operator==(const PixelParameters&) const = default;
};

using Polygon = std::vector<Eigen::Vector2d>;

struct MaskRegion {
  Polygon polygon;
  PixelParameters parameters;
};

/// Per-pixel parameter assignment. A pixel takes the parameters of the last
/// region containing its centre, else the defaults.
struct ParameterMask {
  std::string mask_id;
  std::string camera_id;
  std::vector<MaskRegion> regions;
  PixelParameters defaults;
  int version = 0;

  void validate(const ParameterRanges& ranges = {}) const;
  /// Index into `regions` for every pixel, -1 for the defaults.
  Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> region_map(int width, int height) const;
  const PixelParameters& resolve(int x, int y) const;
};

// Pixel (x, y) has its centre at coordinates (x, y).

/// Even-odd containment of a point (half-open crossing rule).
bool point_in_polygon(const Polygon& polygon, double x, double y);

/// Pixels whose centres lie inside the polygon, scanline order.
std::vector<Eigen::Vector2i> rasterize_polygon(const Polygon& polygon, int width, int height);

/// Bresenham traversal between the pixels nearest to `from` and `to`, inclusive.
std::vector<Eigen::Vector2i> bresenham_line(const Eigen::Vector2d& from, const Eigen::Vector2d& to);

enum class RoiKind { point, line, polygon };

std::string_view to_string(RoiKind kind);
RoiKind parse_roi_kind(std::string_view text);

struct RoiGeometry {
  RoiKind kind = RoiKind::point;
  std::vector<Eigen::Vector2d> vertices;

  /// Vertex count rules, non-collinear polygons, and vertices within the frame.
  void validate(int width, int height) const;
};

struct RoiSummary {
  std::size_t count = 0;    // finite values
  std::size_t invalid = 0;  // non-finite (failed) pixels
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  double p5 = 0.0, p25 = 0.0, p50 = 0.0, p75 = 0.0, p95 = 0.0;
};

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;
};

struct RoiStats {
  RoiKind kind = RoiKind::point;
  RoiSummary summary;
  std::vector<Eigen::Vector2i> pixels;  // visited pixels (traversal order for lines)
  std::vector<double> values;           // value at each visited pixel
  Histogram histogram;                  // polygons only
};

inline constexpr int kHistogramBins = 20;

RoiSummary summarize(const std::vector<double>& values);
Histogram histogram(const std::vector<double>& values, int bins = kHistogramBins);

/// Point: 3x3 neighbourhood clipped to the frame. Line: Bresenham values in
/// order from the first vertex. Polygon: pixels whose centres are inside.
RoiStats roi_stats(const ThermalFrame& frame, const RoiGeometry& geom);

struct TubeSpec {
  double center_x = 0.0;
  double center_y = 0.0;
  double radius = 1.0;       // pixels
  double temp = 1223.15;     // K at center_y
  double gradient = 0.0;     // K per pixel along y
};

/// Synthetic furnace view: tubes in front of a wall, seen through gas.
/// Pixels outside every tube show the wall at its own temperature.
struct SceneSpec {
  std::string camera_id = "cam0";
  int width = 64;
  int height = 48;
  std::int64_t timestamp_ms = 0;
  PixelParameters defaults;
  std::vector<MaskRegion> regions;
  std::vector<TubeSpec> tubes;
  double noise_amplitude = 0.0;  // signal units, uniform +-amplitude
  std::uint64_t seed = 1;

  void validate(const SolverConfig& cfg = {}) const;
  /// The mask that reproduces the generating parameters.
  ParameterMask generating_mask() const;
  /// True tube (or wall) temperature per pixel, K.
  FrameValues ground_truth() const;
};

/// Model-D signal per pixel plus optional noise. Deterministic per seed.
ThermalFrame render_synthetic_frame(const SceneSpec& spec, const QuadratureConfig& q = {});

/// Inverts every pixel under the mask's parameters. Bisection failures become
/// NaN and are counted in `error_count`. `surrogate` is required for
/// CorrectionMethod::surrogate.
ThermalFrame correct_frame(const ThermalFrame& frame, const ParameterMask& mask, CorrectionMethod method,
                           const MlpModel* surrogate = nullptr, const SolverConfig& cfg = {},
                           const QuadratureConfig& q = {});

// Frame file, little-endian: "THFR", u32 version, u32 width, u32 height,
// u8 kind, i64 timestamp (unix ms), width*height f32 row-major. Corrected
// frames store degC.
inline constexpr std::uint32_t kFrameFileVersion = 1;

std::string encode_frame(const ThermalFrame& frame);
/// Ids and provenance are not part of the binary and stay empty.
ThermalFrame decode_frame(std::string_view bytes);

}  // namespace radtherm
