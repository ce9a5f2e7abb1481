#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "faasflow/compile/compiler.hpp"
#include "faasflow/compile/local_plan.hpp"
#include "faasflow/exec/function_client.hpp"

namespace faasflow {

struct WorkflowRegistration {
  std::string workflow_id;
  CompiledWorkflow compiled;
  LocalPlan plan;
  std::string endpoint_path;  // "/workflows/<id>/invoke"
  std::chrono::system_clock::time_point created_at;
};

enum class NodeStatus { Succeeded, Failed, Skipped };
enum class RunStatus { Succeeded, Failed };

std::string_view to_string(NodeStatus status);
std::string_view to_string(RunStatus status);

struct NodeRecord {
  std::string node_id;
  nlohmann::json inputs = nlohmann::json::object();
  nlohmann::json outputs = nlohmann::json::object();
  NodeStatus status = NodeStatus::Skipped;
  std::string error;
  std::chrono::steady_clock::time_point start;
  std::chrono::steady_clock::time_point end;
};

struct ExecutionTrace {
  std::string invocation_id;
  std::string workflow_id;
  std::vector<NodeRecord> nodes;  // in plan step order
  RunStatus status = RunStatus::Succeeded;
  /// Outputs of sink steps keyed "node_id.output".
  nlohmann::json outputs = nlohmann::json::object();
  std::chrono::steady_clock::time_point started;

  const NodeRecord* find(std::string_view node_id) const;
};

/// Timestamps become microseconds since the invocation started.
nlohmann::json trace_to_json(const ExecutionTrace& trace);

class WrongTargetError : public Error {
 public:
  WrongTargetError() : Error("only local-json workflows can be registered") {}
};

class InvalidWorkflowError : public Error {
 public:
  explicit InvalidWorkflowError(ValidationReport report)
      : Error("invalid workflow document: " + report.to_string()), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

class MissingInputError : public Error {
 public:
  explicit MissingInputError(std::string name)
      : Error("missing required input '" + name + "'"), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Invokes one step with its assembled arguments and returns its outputs.
using FunctionCaller = std::function<nlohmann::json(const LocalStep&, const nlohmann::json& args)>;

/// Registration table plus level-parallel executor for local-json plans.
/// Registration and invocation may be called from many threads.
class Orchestrator {
 public:
  struct Options {
    RetryPolicy retry;
    /// Registrations are written here and reloaded on construction.
    std::optional<std::filesystem::path> state_dir;
    /// Defaults to call_function against the step endpoint.
    FunctionCaller caller;
    /// Called after each successful registration, outside the table lock.
    std::function<void(const WorkflowRegistration&)> on_register;
  };

  Orchestrator();
  explicit Orchestrator(Options options);

  /// workflow_id is the document's dag_id. Throws WrongTargetError,
  /// InvalidWorkflowError, DuplicateIdError.
  WorkflowRegistration register_workflow(const CompiledWorkflow& compiled);

  /// Throws NotFoundError for an unknown workflow and MissingInputError
  /// (before any step runs) when a required input is absent. Step failures
  /// are reported in the trace.
  ExecutionTrace invoke(const std::string& workflow_id, const nlohmann::json& inputs);

  std::optional<WorkflowRegistration> find_workflow(const std::string& workflow_id) const;
  std::optional<ExecutionTrace> find_invocation(const std::string& invocation_id) const;
  std::vector<std::string> workflow_ids() const;

 private:
  WorkflowRegistration add(const CompiledWorkflow& compiled, bool persist);

  Options options_;
  mutable std::shared_mutex workflows_mutex_;
  std::map<std::string, WorkflowRegistration> workflows_;
  mutable std::mutex traces_mutex_;
  std::map<std::string, ExecutionTrace> traces_;
  std::atomic<std::uint64_t> next_invocation_{1};
};

}  // namespace faasflow
