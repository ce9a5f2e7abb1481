#pragma once

#include <functional>
#include <string>
#include <vector>

#include "faasflow/core/model.hpp"
#include "faasflow/llm/backend.hpp"

namespace faasflow::eval {

/// Answers each prompt the way a model that knows the ground truth would:
/// the truth's sub-tasks, functions, order and bindings. Transcripts for
/// scripted runs are recorded from it.
class TruthBackend final : public llm::LlmBackend {
 public:
  /// Reply text for the compose templates; the default returns the compiled
  /// truth in a yaml fence.
  using Composer = std::function<std::string(llm::TemplateId, const WorkflowDAG& truth)>;

  explicit TruthBackend(WorkflowDAG truth, Composer composer = {});

  /// Throws llm::BackendError for prompts that do not concern the truth.
  std::string complete(const llm::BackendCall& call) override;

 private:
  WorkflowDAG truth_;
  Composer composer_;
  std::vector<std::string> order_;
};

/// A topological order of `dag` that the generator's wiring rule maps back
/// onto the same ordering edges: each ordering-only edge joins consecutive
/// nodes. Falls back to topological_order when no such order exists.
std::vector<std::string> generation_order(const WorkflowDAG& dag);

}  // namespace faasflow::eval
