#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "faasflow/exec/orchestrator.hpp"

namespace faasflow {

/// HTTP front end of an Orchestrator:
///   POST /workflows                 local-json body -> 201 {workflow_id, endpoint}
///   POST /workflows/{id}/invoke     inputs object   -> 200 {status, outputs, invocation_id}
///   GET  /invocations/{id}          execution trace
///   GET  /workflows                 registered ids
/// Errors are {"error": message} with 400, 404 or 409.
class GatewayServer {
 public:
  explicit GatewayServer(Orchestrator& orchestrator);
  ~GatewayServer();

  /// Binds (port 0 picks a free one) and serves on a background thread.
  /// Returns the bound port. Throws UnavailableError when binding fails.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Serves on the calling thread until stop().
  void listen(const std::string& host, int port);
  void stop();
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Stand-in FaaS engine: each path maps to a pure JSON handler.
/// POST takes the JSON body as arguments, GET the query string (values that
/// parse as JSON are passed parsed). Unknown paths answer 404.
class MockFaas {
 public:
  using Handler = std::function<nlohmann::json(const nlohmann::json& args)>;

  struct LogEntry {
    std::string method;
    std::string path;
    nlohmann::json args;
    std::chrono::steady_clock::time_point at;
  };

  MockFaas();
  ~MockFaas();

  void add(const std::string& path, Handler handler);
  /// Every later request to `path` answers `status` with a plain-text body.
  void fail(const std::string& path, int status);

  /// Throws UnavailableError when binding fails.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  void stop();
  /// "http://host:port" once started.
  std::string base_url() const;

  std::vector<LogEntry> log() const;
  void clear_log();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace faasflow
