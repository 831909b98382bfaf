#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "radtherm/frame.hpp"
#include "radtherm/json_codec.hpp"

namespace radtherm {

/// Index entry for a stored frame.
struct FrameMeta {
  std::string frame_id;
  std::string camera_id;
  std::int64_t timestamp_ms = 0;
  FrameKind kind = FrameKind::raw_signal;
  int width = 0;
  int height = 0;
  std::optional<int> mask_version;
  std::optional<CorrectionMethod> method;
  int error_count = 0;
  std::string source_frame_id;
  std::uint64_t sequence = 0;  // store order
};

struct FrameQuery {
  std::optional<std::string> camera;
  std::optional<FrameKind> kind;
  std::optional<std::int64_t> from_ms;  // inclusive
  std::optional<std::int64_t> to_ms;    // inclusive
};

struct TimeseriesPoint {
  std::int64_t timestamp_ms = 0;
  std::string frame_id;
  RoiSummary summary;  // degC
};

/// File-backed frame and mask store.
///
/// Layout under the root directory:
///   frames/<id>.thfr, frames/<id>.json  binary frame and metadata sidecar
///   masks/<camera>.json                 latest mask per camera
///   index.json                          frame index and id counter
///
/// Frames are immutable once stored. Reads run concurrently; writers take the
/// index lock exclusively. Mask upserts are serialised per camera.
class FrameStore {
 public:
  explicit FrameStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  /// Persists `frame` under a fresh id and returns the stored metadata.
  FrameMeta store(ThermalFrame frame);

  /// Frames matching `q`, ordered by timestamp then store order.
  std::vector<FrameMeta> list(const FrameQuery& q = {}) const;
  FrameMeta meta(const std::string& frame_id) const;
  /// Decodes the stored frame; values are as persisted (float32).
  ThermalFrame fetch(const std::string& frame_id) const;
  /// Raw bytes of the frame file.
  std::string fetch_bytes(const std::string& frame_id) const;

  /// Cameras that own frames or a mask, sorted.
  std::vector<std::string> cameras() const;
  bool has_camera(const std::string& camera_id) const;

  /// Stores the mask as the next version for its camera and returns it.
  ParameterMask upsert_mask(const std::string& camera_id, ParameterMask mask);
  /// The latest mask, or a default-parameter mask at version 0.
  ParameterMask mask(const std::string& camera_id) const;

  /// ROI summary of every corrected frame of `camera_id` in the window.
  /// Frames sharing a timestamp collapse to the most recently stored one, so
  /// timestamps strictly increase.
  std::vector<TimeseriesPoint> roi_timeseries(const std::string& camera_id, const RoiGeometry& geom,
                                              std::optional<std::int64_t> from_ms = {},
                                              std::optional<std::int64_t> to_ms = {}) const;

 private:
  std::filesystem::path frame_path(const std::string& id, const char* ext) const;
  std::filesystem::path mask_path(const std::string& camera_id) const;
  void write_index_locked() const;
  std::mutex& camera_mutex(const std::string& camera_id);

  std::filesystem::path root_;
  mutable std::shared_mutex index_mutex_;
  std::map<std::string, FrameMeta> frames_;
  std::uint64_t next_sequence_ = 1;

  mutable std::shared_mutex mask_mutex_;
  std::map<std::string, ParameterMask> masks_;
  std::mutex camera_locks_mutex_;
  std::map<std::string, std::unique_ptr<std::mutex>> camera_locks_;
};

/// Camera ids become file names, so they are restricted to [A-Za-z0-9_.-].
void validate_camera_id(const std::string& camera_id);

Json frame_meta_json(const FrameMeta& meta);
FrameMeta frame_meta_from_json(const Json& j);

}  // namespace radtherm
