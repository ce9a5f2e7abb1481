#include "faasflow/exec/servers.hpp"

#include <httplib.h>

#include <map>
#include <mutex>
#include <thread>

namespace faasflow {

namespace {

void reply(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void error(httplib::Response& res, int status, const std::string& message) {
  reply(res, status, {{"error", message}});
}

/// Background listener shared by both servers.
struct Listener {
  httplib::Server server;
  std::thread thread;
  std::string host;
  int port = 0;

  int start(const std::string& bind_host, int bind_port) {
    host = bind_host;
    port = bind_port == 0 ? server.bind_to_any_port(bind_host) : (server.bind_to_port(bind_host, bind_port) ? bind_port : -1);
    if (port <= 0) throw UnavailableError("cannot bind " + bind_host + ":" + std::to_string(bind_port));
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
    return port;
  }

  void stop() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
};

}  // namespace

struct GatewayServer::Impl {
  Orchestrator& orchestrator;
  Listener listener;

  explicit Impl(Orchestrator& o) : orchestrator(o) {
    auto& s = listener.server;
    s.Post("/workflows", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        auto reg = orchestrator.register_workflow({CompileTarget::LocalJson, req.body, "", {}});
        reply(res, 201, {{"workflow_id", reg.workflow_id}, {"endpoint", reg.endpoint_path}});
      } catch (const DuplicateIdError& e) {
        error(res, 409, e.what());
      } catch (const Error& e) {
        error(res, 400, e.what());
      }
    });
    s.Get("/workflows", [this](const httplib::Request&, httplib::Response& res) {
      reply(res, 200, {{"workflows", orchestrator.workflow_ids()}});
    });
    s.Post(R"(/workflows/([^/]+)/invoke)", [this](const httplib::Request& req, httplib::Response& res) {
      auto inputs = req.body.empty() ? nlohmann::json::object() : nlohmann::json::parse(req.body, nullptr, false);
      if (inputs.is_discarded() || !inputs.is_object()) return error(res, 400, "inputs must be a JSON object");
      try {
        auto trace = orchestrator.invoke(req.matches[1], inputs);
        reply(res, 200, {{"status", std::string(to_string(trace.status))},
                         {"outputs", trace.outputs},
                         {"invocation_id", trace.invocation_id}});
      } catch (const NotFoundError& e) {
        error(res, 404, e.what());
      } catch (const MissingInputError& e) {
        reply(res, 400, {{"error", e.what()}, {"missing_input", e.name()}});
      } catch (const Error& e) {
        error(res, 400, e.what());
      }
    });
    s.Get(R"(/invocations/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      auto trace = orchestrator.find_invocation(req.matches[1]);
      if (!trace) return error(res, 404, "unknown invocation '" + std::string(req.matches[1]) + "'");
      reply(res, 200, trace_to_json(*trace));
    });
  }
};

GatewayServer::GatewayServer(Orchestrator& orchestrator) : impl_(std::make_unique<Impl>(orchestrator)) {}
GatewayServer::~GatewayServer() { stop(); }

int GatewayServer::start(const std::string& host, int port) { return impl_->listener.start(host, port); }

void GatewayServer::listen(const std::string& host, int port) {
  impl_->listener.host = host;
  impl_->listener.port = port;
  if (!impl_->listener.server.listen(host, port))
    throw UnavailableError("cannot listen on " + host + ":" + std::to_string(port));
}

void GatewayServer::stop() { impl_->listener.stop(); }
int GatewayServer::port() const { return impl_->listener.port; }

struct MockFaas::Impl {
  Listener listener;
  mutable std::mutex mutex;
  std::map<std::string, Handler> handlers;
  std::map<std::string, int> failures;
  std::vector<LogEntry> log;

  Impl() {
    auto handle = [this](const httplib::Request& req, httplib::Response& res) {
      nlohmann::json args = nlohmann::json::object();
      if (req.method == "POST") {
        args = req.body.empty() ? nlohmann::json::object() : nlohmann::json::parse(req.body, nullptr, false);
        if (args.is_discarded()) return error(res, 400, "body is not JSON");
      } else {
        for (const auto& [key, value] : req.params) {
          auto parsed = nlohmann::json::parse(value, nullptr, false);
          args[key] = parsed.is_discarded() ? nlohmann::json(value) : parsed;
        }
      }
      Handler handler;
      int failure = 0;
      {
        std::lock_guard lock(mutex);
        log.push_back({req.method, req.path, args, std::chrono::steady_clock::now()});
        auto f = failures.find(req.path);
        if (f != failures.end()) failure = f->second;
        auto h = handlers.find(req.path);
        if (h != handlers.end()) handler = h->second;
      }
      if (failure) {
        res.status = failure;
        res.set_content("injected failure", "text/plain");
        return;
      }
      if (!handler) return error(res, 404, "no function at " + req.path);
      try {
        reply(res, 200, handler(args));
      } catch (const std::exception& e) {
        error(res, 500, e.what());
      }
    };
    listener.server.Post(R"(/.*)", handle);
    listener.server.Get(R"(/.*)", handle);
  }
};

MockFaas::MockFaas() : impl_(std::make_unique<Impl>()) {}
MockFaas::~MockFaas() { stop(); }

void MockFaas::add(const std::string& path, Handler handler) {
  std::lock_guard lock(impl_->mutex);
  impl_->handlers[path] = std::move(handler);
}

void MockFaas::fail(const std::string& path, int status) {
  std::lock_guard lock(impl_->mutex);
  impl_->failures[path] = status;
}

int MockFaas::start(const std::string& host, int port) { return impl_->listener.start(host, port); }
void MockFaas::stop() { impl_->listener.stop(); }

std::string MockFaas::base_url() const {
  return "http://" + impl_->listener.host + ":" + std::to_string(impl_->listener.port);
}

std::vector<MockFaas::LogEntry> MockFaas::log() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->log;
}

void MockFaas::clear_log() {
  std::lock_guard lock(impl_->mutex);
  impl_->log.clear();
}

}  // namespace faasflow
