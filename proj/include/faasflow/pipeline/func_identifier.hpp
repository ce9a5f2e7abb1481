#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "faasflow/core/model.hpp"
#include "faasflow/llm/gateway.hpp"
#include "faasflow/pipeline/errors.hpp"
#include "faasflow/repo/repository.hpp"

namespace faasflow {

struct UserQuery {
  std::string text;
  /// Values the user already supplied, by parameter name (JSON object).
  nlohmann::json user_inputs = nlohmann::json::object();

  bool supplies(const std::string& name) const {
    return user_inputs.is_object() && user_inputs.contains(name);
  }
};

struct LlmCallOptions {
  int max_retries = 2;
  double temperature = 0.0;
};

/// Turns a query into workflow nodes: plan sub-tasks, retrieve top-k
/// candidate functions per sub-task, let the LLM pick one.
class FuncIdentifier {
 public:
  FuncIdentifier(const FunctionRepository& repo, const llm::LlmGateway& gateway,
                 std::size_t k = FunctionRepository::kDefaultTopK, LlmCallOptions options = {});

  /// Throws EmptyPlanError, or PipelineError("plan") wrapping LLM failures.
  std::vector<SubTask> plan_tasks(const UserQuery& query) const;

  /// A single candidate is returned without consulting the LLM. Throws
  /// SelectionError.
  FunctionSpec select_function(const UserQuery& query, const SubTask& subtask,
                               const std::vector<RankedFunction>& candidates) const;

  /// One node per sub-task with node_id "n<index>". Selections run
  /// concurrently; the first failing sub-task (by index) is reported.
  std::vector<WorkflowNode> identify(const UserQuery& query) const;

 private:
  const FunctionRepository& repo_;
  const llm::LlmGateway& gateway_;
  std::size_t k_;
  LlmCallOptions options_;
};

/// Candidate list as shown to the LLM, one "- id: description" line each.
std::string render_candidates(const std::vector<RankedFunction>& candidates);

}  // namespace faasflow
