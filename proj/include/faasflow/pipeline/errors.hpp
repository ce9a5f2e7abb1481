#pragma once

#include <optional>
#include <string>

#include "faasflow/core/error.hpp"
#include "faasflow/core/validate.hpp"

namespace faasflow {

/// Failure of one generation stage ("plan", "select", "order", "classify",
/// "assemble"). The message starts with the stage name.
class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const std::string& message)
      : Error(stage + ": " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

class EmptyPlanError : public PipelineError {
 public:
  EmptyPlanError() : PipelineError("plan", "the planner returned no sub-tasks") {}
};

class SelectionError : public PipelineError {
 public:
  SelectionError(std::size_t subtask_index, const std::string& cause)
      : PipelineError("select", "sub-task " + std::to_string(subtask_index) + ": " + cause),
        subtask_index_(subtask_index) {}
  std::size_t subtask_index() const { return subtask_index_; }

 private:
  std::size_t subtask_index_;
};

class OrderingError : public PipelineError {
 public:
  explicit OrderingError(const std::string& cause) : PipelineError("order", cause) {}
};

class ClassificationError : public PipelineError {
 public:
  ClassificationError(std::string node_id, std::string param, const std::string& cause)
      : PipelineError("classify", node_id + "." + param + ": " + cause),
        node_id_(std::move(node_id)),
        param_(std::move(param)) {}
  const std::string& node_id() const { return node_id_; }
  const std::string& param() const { return param_; }

 private:
  std::string node_id_;
  std::string param_;
};

class AssemblyError : public PipelineError {
 public:
  explicit AssemblyError(ValidationReport report)
      : PipelineError("assemble", report.to_string()), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

}  // namespace faasflow
