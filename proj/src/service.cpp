#include "radtherm/service.hpp"

#include <cctype>
#include <charconv>

#include <httplib.h>

#include "radtherm/errors.hpp"

namespace radtherm {

namespace {

constexpr std::size_t kEventBacklog = 1024;

void send_json(httplib::Response& res, const Json& j, int status = 200) {
  res.status = status;
  res.set_content(j.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, {{"error", message}}, status);
}

template <typename F>
void guarded(httplib::Response& res, F&& handler) {
  try {
    handler();
  } catch (const NotFoundError& e) {
    send_error(res, 404, e.what());
  } catch (const ParseError& e) {
    send_error(res, 400, e.what());
  } catch (const BracketError& e) {
    send_error(res, 422, e.what());
  } catch (const DomainError& e) {
    send_error(res, 400, e.what());
  } catch (const Json::exception& e) {
    send_error(res, 400, std::string("bad JSON: ") + e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, e.what());
  }
}

std::optional<std::int64_t> int_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  const std::string text = req.get_param_value(name);
  std::int64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || end != text.data() + text.size()) {
    throw DomainError(std::string("query parameter '") + name + "' must be an integer (unix ms)");
  }
  return v;
}

Json parse_body(const httplib::Request& req) {
  if (req.body.empty()) throw DomainError("request body is empty");
  return Json::parse(req.body);
}

CorrectionMethod method_from_body(const std::string& body) {
  if (body.empty()) return CorrectionMethod::bisection;
  const auto first = body.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (body[first] == '{' || body[first] == '"')) {
    const Json j = Json::parse(body);
    if (j.is_string()) return parse_correction_method(j.get<std::string>());
    return parse_correction_method(j.value("method", std::string("bisection")));
  }
  std::string text = body.substr(first == std::string::npos ? 0 : first);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
  return parse_correction_method(text);
}

std::string sse_frame(const StreamEvent& e) {
  return "id: " + std::to_string(e.sequence) + "\nevent: frame\ndata: " + e.payload + "\n\n";
}

}  // namespace

// ---------------------------------------------------------------------------

std::uint64_t EventBroker::publish(std::string camera_id, std::string payload) {
  std::uint64_t seq;
  {
    std::lock_guard lock(mutex_);
    seq = ++sequence_;
    events_.push_back({seq, std::move(camera_id), std::move(payload)});
    while (events_.size() > kEventBacklog) events_.pop_front();
  }
  cv_.notify_all();
  return seq;
}

std::uint64_t EventBroker::latest() const {
  std::lock_guard lock(mutex_);
  return sequence_;
}

std::vector<StreamEvent> EventBroker::wait_after(std::uint64_t after, std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  cv_.wait_for(lock, timeout, [&] { return closed_ || sequence_ > after; });
  std::vector<StreamEvent> out;
  if (closed_) return out;
  for (const auto& e : events_) {
    if (e.sequence > after) out.push_back(e);
  }
  return out;
}

void EventBroker::close() {
  {
    std::lock_guard lock(mutex_);
    closed_ = true;
  }
  cv_.notify_all();
}

bool EventBroker::closed() const {
  std::lock_guard lock(mutex_);
  return closed_;
}

// ---------------------------------------------------------------------------

FrameService::FrameService(FrameStore& store, std::shared_ptr<const MlpModel> model, ServiceOptions options)
    : store_(store), model_(std::move(model)), options_(options), server_(std::make_unique<httplib::Server>()) {
  options_.solver.validate();
  options_.quadrature.validate();
  if (options_.auto_correct && options_.auto_method == CorrectionMethod::surrogate && !model_) {
    throw DomainError("auto-correct with the surrogate method needs a model file");
  }
  install_routes();
  worker_ = std::thread([this] { worker_loop(); });
}

FrameService::~FrameService() {
  stop();
  {
    std::lock_guard lock(queue_mutex_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  if (worker_.joinable()) worker_.join();
}

int FrameService::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw std::runtime_error("cannot bind " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void FrameService::listen() { server_->listen_after_bind(); }

void FrameService::stop() {
  events_.close();
  server_->stop();
}

std::future<FrameMeta> FrameService::enqueue(const std::string& frame_id, CorrectionMethod method) {
  Job job{frame_id, method, {}};
  auto fut = job.done.get_future();
  {
    std::lock_guard lock(queue_mutex_);
    if (stopping_) throw std::runtime_error("service is stopping");
    queue_.push_back(std::move(job));
  }
  queue_cv_.notify_one();
  return fut;
}

void FrameService::worker_loop() {
  for (;;) {
    Job job;
    {
      std::unique_lock lock(queue_mutex_);
      queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;
      job = std::move(queue_.front());
      queue_.pop_front();
    }
    try {
      job.done.set_value(run_job(job.frame_id, job.method));
    } catch (...) {
      job.done.set_exception(std::current_exception());
    }
  }
}

FrameMeta FrameService::run_job(const std::string& frame_id, CorrectionMethod method) {
  const ThermalFrame raw = store_.fetch(frame_id);
  if (raw.kind != FrameKind::raw_signal) throw DomainError("frame '" + frame_id + "' is not a raw signal frame");
  // One snapshot of the mask for the whole frame.
  const ParameterMask mask = store_.mask(raw.camera_id);
  ThermalFrame corrected = correct_frame(raw, mask, method, model_.get(), options_.solver, options_.quadrature);
  const FrameMeta meta = store_.store(std::move(corrected));
  events_.publish(meta.camera_id, frame_meta_json(meta).dump());
  return meta;
}

FrameMeta FrameService::ingest_synthetic(const SceneSpec& spec) {
  validate_camera_id(spec.camera_id);
  spec.validate(options_.solver);
  const FrameMeta meta = store_.store(render_synthetic_frame(spec, options_.quadrature));
  if (options_.auto_correct) (void)enqueue(meta.frame_id, options_.auto_method);
  return meta;
}

FrameMeta FrameService::correct(const std::string& frame_id, CorrectionMethod method) {
  (void)store_.meta(frame_id);
  return enqueue(frame_id, method).get();
}

void FrameService::install_routes() {
  auto& srv = *server_;

  srv.Get("/cameras", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      Json out = Json::array();
      for (const auto& cam : store_.cameras()) {
        FrameQuery q;
        q.camera = cam;
        const auto frames = store_.list(q);
        Json entry = {{"camera_id", cam}, {"mask_version", store_.mask(cam).version}, {"frame_count", frames.size()}};
        entry["latest_timestamp_ms"] = frames.empty() ? Json(nullptr) : Json(frames.back().timestamp_ms);
        out.push_back(entry);
      }
      send_json(res, out);
    });
  });

  srv.Post("/frames/synthetic", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, frame_meta_json(ingest_synthetic(scene_from_json(parse_body(req)))), 201); });
  });

  srv.Get("/frames", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      FrameQuery q;
      if (req.has_param("camera")) {
        q.camera = req.get_param_value("camera");
        if (!store_.has_camera(*q.camera)) throw NotFoundError("unknown camera '" + *q.camera + "'");
      }
      if (req.has_param("kind")) q.kind = parse_frame_kind(req.get_param_value("kind"));
      q.from_ms = int_param(req, "from");
      q.to_ms = int_param(req, "to");
      Json out = Json::array();
      for (const auto& m : store_.list(q)) out.push_back(frame_meta_json(m));
      send_json(res, out);
    });
  });

  srv.Get("/frames/:id/meta", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, frame_meta_json(store_.meta(req.path_params.at("id")))); });
  });

  srv.Get("/frames/:id", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { res.set_content(store_.fetch_bytes(req.path_params.at("id")), "application/octet-stream"); });
  });

  srv.Post("/frames/:id/correct", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, frame_meta_json(correct(req.path_params.at("id"), method_from_body(req.body))), 201); });
  });

  srv.Put("/masks/:camera", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string cam = req.path_params.at("camera");
      const ParameterMask stored = store_.upsert_mask(cam, mask_from_json(parse_body(req)));
      send_json(res, {{"camera_id", cam}, {"version", stored.version}, {"mask", to_json(stored)}});
    });
  });

  srv.Get("/masks/:camera", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string cam = req.path_params.at("camera");
      if (!store_.has_camera(cam)) throw NotFoundError("unknown camera '" + cam + "'");
      send_json(res, to_json(store_.mask(cam)));
    });
  });

  srv.Post("/roi/query", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const Json body = parse_body(req);
      if (!body.contains("frame_id") || !body.contains("geometry")) {
        throw DomainError("ROI query needs 'frame_id' and 'geometry'");
      }
      const ThermalFrame frame = store_.fetch(body.at("frame_id").get<std::string>());
      const RoiGeometry geom = geometry_from_json(body.at("geometry"));
      Json out = to_json(roi_stats(display_frame(frame), geom), display_unit(frame.kind));
      out["frame_id"] = frame.frame_id;
      out["mask_version"] = frame.mask_version ? Json(*frame.mask_version) : Json(nullptr);
      out["method"] = frame.method ? Json(to_string(*frame.method)) : Json(nullptr);
      send_json(res, out);
    });
  });

  srv.Get("/roi/timeseries", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      if (!req.has_param("camera") || !req.has_param("geom")) {
        throw DomainError("timeseries needs 'camera' and 'geom' query parameters");
      }
      const std::string cam = req.get_param_value("camera");
      const RoiGeometry geom = geometry_from_json(Json::parse(req.get_param_value("geom")));
      Json points = Json::array();
      for (const auto& p : store_.roi_timeseries(cam, geom, int_param(req, "from"), int_param(req, "to"))) {
        points.push_back({{"timestamp_ms", p.timestamp_ms}, {"frame_id", p.frame_id}, {"summary", to_json(p.summary)}});
      }
      send_json(res, {{"camera_id", cam}, {"unit", "degC"}, {"points", points}});
    });
  });

  srv.Get("/stream", [this](const httplib::Request& req, httplib::Response& res) {
    const std::optional<std::string> camera =
        req.has_param("camera") ? std::optional(req.get_param_value("camera")) : std::nullopt;
    auto cursor = std::make_shared<std::uint64_t>(events_.latest());
    auto greeted = std::make_shared<bool>(false);
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider(
        "text/event-stream", [this, camera, cursor, greeted](std::size_t, httplib::DataSink& sink) {
          if (!*greeted) {
            *greeted = true;
            const std::string hello = ": subscribed\n\n";
            return sink.write(hello.data(), hello.size());
          }
          if (events_.closed()) {
            sink.done();
            return false;
          }
          const auto batch = events_.wait_after(*cursor, std::chrono::seconds(10));
          std::string chunk;
          for (const auto& e : batch) {
            *cursor = e.sequence;
            if (!camera || e.camera_id == *camera) chunk += sse_frame(e);
          }
          if (chunk.empty()) chunk = ": keepalive\n\n";
          return sink.write(chunk.data(), chunk.size());
        });
  });
}

}  // namespace radtherm
