#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <future>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "radtherm/frame_store.hpp"

namespace httplib {
class Server;
}

namespace radtherm {

struct ServiceOptions {
  /// Correct every ingested raw frame with the camera's current mask.
  bool auto_correct = false;
  CorrectionMethod auto_method = CorrectionMethod::bisection;
  SolverConfig solver;
  QuadratureConfig quadrature;
};

struct StreamEvent {
  std::uint64_t sequence = 0;
  std::string camera_id;
  std::string payload;  // JSON
};

/// Fan-out of corrected-frame metadata to stream subscribers.
class EventBroker {
 public:
  std::uint64_t publish(std::string camera_id, std::string payload);
  /// Sequence of the newest event (0 before the first).
  std::uint64_t latest() const;
  /// Events after `after`, waiting up to `timeout` for the first one.
  /// Returns an empty list on timeout or once closed.
  std::vector<StreamEvent> wait_after(std::uint64_t after, std::chrono::milliseconds timeout);
  void close();
  bool closed() const;

 private:
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<StreamEvent> events_;
  std::uint64_t sequence_ = 0;
  bool closed_ = false;
};

/// HTTP front end over a FrameStore. Correction jobs run on one worker thread
/// fed by an internal queue; ingestion and queries run on the server pool.
class FrameService {
 public:
  FrameService(FrameStore& store, std::shared_ptr<const MlpModel> model, ServiceOptions options = {});
  ~FrameService();
  FrameService(const FrameService&) = delete;
  FrameService& operator=(const FrameService&) = delete;

  /// Binds to `port` (0 picks a free port) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();

  /// Renders and stores a synthetic raw frame; queues its correction when
  /// auto-correct is on.
  FrameMeta ingest_synthetic(const SceneSpec& spec);
  /// Queues a correction of `frame_id` and waits for the stored result.
  FrameMeta correct(const std::string& frame_id, CorrectionMethod method);

  EventBroker& events() { return events_; }

 private:
  struct Job {
    std::string frame_id;
    CorrectionMethod method;
    std::promise<FrameMeta> done;
  };

  std::future<FrameMeta> enqueue(const std::string& frame_id, CorrectionMethod method);
  FrameMeta run_job(const std::string& frame_id, CorrectionMethod method);
  void worker_loop();
  void install_routes();

  FrameStore& store_;
  std::shared_ptr<const MlpModel> model_;
  ServiceOptions options_;
  EventBroker events_;
  std::unique_ptr<httplib::Server> server_;

  std::mutex queue_mutex_;
  std::condition_variable queue_cv_;
  std::deque<Job> queue_;
  bool stopping_ = false;
  std::thread worker_;
};

}  // namespace radtherm
