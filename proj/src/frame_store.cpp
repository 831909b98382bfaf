#include "radtherm/frame_store.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "radtherm/errors.hpp"

namespace radtherm {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write to a sibling temp file and rename, so readers never see partial files.
void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string format_id(std::uint64_t seq) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "f%08llu", static_cast<unsigned long long>(seq));
  return buf;
}

bool before(const FrameMeta& a, const FrameMeta& b) {
  if (a.timestamp_ms != b.timestamp_ms) return a.timestamp_ms < b.timestamp_ms;
  return a.sequence < b.sequence;
}

}  // namespace

void validate_camera_id(const std::string& camera_id) {
  if (camera_id.empty() || camera_id.size() > 64) throw DomainError("camera id must have 1 to 64 characters");
  for (char c : camera_id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                    c == '-' || c == '.';
    if (!ok) throw DomainError("camera id '" + camera_id + "' contains characters outside [A-Za-z0-9_.-]");
  }
  if (camera_id == "." || camera_id == "..") throw DomainError("camera id '" + camera_id + "' is reserved");
}

Json frame_meta_json(const FrameMeta& m) {
  Json j = {{"frame_id", m.frame_id},
            {"camera_id", m.camera_id},
            {"timestamp_ms", m.timestamp_ms},
            {"kind", to_string(m.kind)},
            {"width", m.width},
            {"height", m.height},
            {"unit", display_unit(m.kind)},
            {"error_count", m.error_count},
            {"sequence", m.sequence}};
  j["mask_version"] = m.mask_version ? Json(*m.mask_version) : Json(nullptr);
  j["method"] = m.method ? Json(to_string(*m.method)) : Json(nullptr);
  j["source_frame_id"] = m.source_frame_id.empty() ? Json(nullptr) : Json(m.source_frame_id);
  return j;
}

FrameMeta frame_meta_from_json(const Json& j) {
  FrameMeta m;
  m.frame_id = j.at("frame_id").get<std::string>();
  m.camera_id = j.at("camera_id").get<std::string>();
  m.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
  m.kind = parse_frame_kind(j.at("kind").get<std::string>());
  m.width = j.at("width").get<int>();
  m.height = j.at("height").get<int>();
  m.error_count = j.value("error_count", 0);
  m.sequence = j.value("sequence", std::uint64_t{0});
  if (j.contains("mask_version") && !j.at("mask_version").is_null()) m.mask_version = j.at("mask_version").get<int>();
  if (j.contains("method") && !j.at("method").is_null()) m.method = parse_correction_method(j.at("method").get<std::string>());
  if (j.contains("source_frame_id") && !j.at("source_frame_id").is_null()) {
    m.source_frame_id = j.at("source_frame_id").get<std::string>();
  }
  return m;
}

FrameStore::FrameStore(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / "frames");
  fs::create_directories(root_ / "masks");
  const fs::path index = root_ / "index.json";
  if (fs::exists(index)) {
    const Json j = Json::parse(read_file(index));
    next_sequence_ = j.value("next_sequence", std::uint64_t{1});
    for (const auto& f : j.at("frames")) {
      FrameMeta m = frame_meta_from_json(f);
      frames_.emplace(m.frame_id, std::move(m));
    }
  }
  for (const auto& entry : fs::directory_iterator(root_ / "masks")) {
    if (entry.path().extension() != ".json") continue;
    ParameterMask m = mask_from_json(Json::parse(read_file(entry.path())));
    masks_[m.camera_id] = std::move(m);
  }
}

fs::path FrameStore::frame_path(const std::string& id, const char* ext) const {
  return root_ / "frames" / (id + ext);
}

fs::path FrameStore::mask_path(const std::string& camera_id) const { return root_ / "masks" / (camera_id + ".json"); }

void FrameStore::write_index_locked() const {
  Json frames = Json::array();
  std::vector<const FrameMeta*> ordered;
  for (const auto& [id, m] : frames_) ordered.push_back(&m);
  std::sort(ordered.begin(), ordered.end(), [](auto* a, auto* b) { return a->sequence < b->sequence; });
  for (const auto* m : ordered) frames.push_back(frame_meta_json(*m));
  const Json j = {{"next_sequence", next_sequence_}, {"frames", frames}};
  write_file_atomic(root_ / "index.json", j.dump(1));
}

FrameMeta FrameStore::store(ThermalFrame frame) {
  validate_camera_id(frame.camera_id);
  if (frame.values.size() == 0) throw DomainError("cannot store an empty frame");

  std::unique_lock lock(index_mutex_);
  FrameMeta m;
  m.sequence = next_sequence_++;
  m.frame_id = format_id(m.sequence);
  m.camera_id = frame.camera_id;
  m.timestamp_ms = frame.timestamp_ms;
  m.kind = frame.kind;
  m.width = frame.width();
  m.height = frame.height();
  m.mask_version = frame.mask_version;
  m.method = frame.method;
  m.error_count = frame.error_count;
  m.source_frame_id = frame.source_frame_id;
  frame.frame_id = m.frame_id;

  write_file_atomic(frame_path(m.frame_id, ".thfr"), encode_frame(frame));
  write_file_atomic(frame_path(m.frame_id, ".json"), frame_meta_json(m).dump(1));
  frames_.emplace(m.frame_id, m);
  write_index_locked();
  return m;
}

std::vector<FrameMeta> FrameStore::list(const FrameQuery& q) const {
  std::shared_lock lock(index_mutex_);
  std::vector<FrameMeta> out;
  for (const auto& [id, m] : frames_) {
    if (q.camera && m.camera_id != *q.camera) continue;
    if (q.kind && m.kind != *q.kind) continue;
    if (q.from_ms && m.timestamp_ms < *q.from_ms) continue;
    if (q.to_ms && m.timestamp_ms > *q.to_ms) continue;
    out.push_back(m);
  }
  std::sort(out.begin(), out.end(), before);
  return out;
}

FrameMeta FrameStore::meta(const std::string& frame_id) const {
  std::shared_lock lock(index_mutex_);
  const auto it = frames_.find(frame_id);
  if (it == frames_.end()) throw NotFoundError("unknown frame '" + frame_id + "'");
  return it->second;
}

std::string FrameStore::fetch_bytes(const std::string& frame_id) const {
  (void)meta(frame_id);
  return read_file(frame_path(frame_id, ".thfr"));
}

ThermalFrame FrameStore::fetch(const std::string& frame_id) const {
  const FrameMeta m = meta(frame_id);
  ThermalFrame f = decode_frame(read_file(frame_path(frame_id, ".thfr")));
  f.frame_id = m.frame_id;
  f.camera_id = m.camera_id;
  f.mask_version = m.mask_version;
  f.method = m.method;
  f.error_count = m.error_count;
  f.source_frame_id = m.source_frame_id;
  return f;
}

std::vector<std::string> FrameStore::cameras() const {
  std::vector<std::string> out;
  {
    std::shared_lock lock(index_mutex_);
    for (const auto& [id, m] : frames_) out.push_back(m.camera_id);
  }
  {
    std::shared_lock lock(mask_mutex_);
    for (const auto& [cam, m] : masks_) out.push_back(cam);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool FrameStore::has_camera(const std::string& camera_id) const {
  const auto cams = cameras();
  return std::binary_search(cams.begin(), cams.end(), camera_id);
}

std::mutex& FrameStore::camera_mutex(const std::string& camera_id) {
  std::lock_guard lock(camera_locks_mutex_);
  auto& slot = camera_locks_[camera_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

ParameterMask FrameStore::upsert_mask(const std::string& camera_id, ParameterMask mask) {
  validate_camera_id(camera_id);
  if (!mask.camera_id.empty() && mask.camera_id != camera_id) {
    throw DomainError("mask camera '" + mask.camera_id + "' does not match '" + camera_id + "'");
  }
  mask.camera_id = camera_id;
  mask.validate();

  std::lock_guard serial(camera_mutex(camera_id));
  int previous = 0;
  {
    std::shared_lock lock(mask_mutex_);
    if (const auto it = masks_.find(camera_id); it != masks_.end()) previous = it->second.version;
  }
  mask.version = previous + 1;
  if (mask.mask_id.empty()) mask.mask_id = camera_id + "-mask";
  write_file_atomic(mask_path(camera_id), to_json(mask).dump(1));
  std::unique_lock lock(mask_mutex_);
  masks_[camera_id] = mask;
  return mask;
}

ParameterMask FrameStore::mask(const std::string& camera_id) const {
  std::shared_lock lock(mask_mutex_);
  if (const auto it = masks_.find(camera_id); it != masks_.end()) return it->second;
  ParameterMask m;
  m.mask_id = camera_id + "-mask";
  m.camera_id = camera_id;
  m.version = 0;
  return m;
}

std::vector<TimeseriesPoint> FrameStore::roi_timeseries(const std::string& camera_id, const RoiGeometry& geom,
                                                        std::optional<std::int64_t> from_ms,
                                                        std::optional<std::int64_t> to_ms) const {
  if (!has_camera(camera_id)) throw NotFoundError("unknown camera '" + camera_id + "'");
  FrameQuery q;
  q.camera = camera_id;
  q.kind = FrameKind::corrected_temperature;
  q.from_ms = from_ms;
  q.to_ms = to_ms;
  const auto metas = list(q);

  std::vector<TimeseriesPoint> out;
  for (std::size_t i = 0; i < metas.size(); ++i) {
    // list() orders equal timestamps by store order; keep the last of each run.
    if (i + 1 < metas.size() && metas[i + 1].timestamp_ms == metas[i].timestamp_ms) continue;
    const ThermalFrame f = display_frame(fetch(metas[i].frame_id));
    out.push_back({metas[i].timestamp_ms, metas[i].frame_id, roi_stats(f, geom).summary});
  }
  return out;
}

}  // namespace radtherm
