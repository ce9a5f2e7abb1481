#include "faasflow/pipeline/func_identifier.hpp"

#include <future>

namespace faasflow {

namespace {

std::string describe(const FunctionSpec& fn) {
  std::string line = fn.id + ": " + (fn.description.empty() ? fn.name : fn.description);
  auto names = [](const std::vector<ParameterSpec>& params) {
    std::string out;
    for (const auto& p : params) out += (out.empty() ? "" : ", ") + p.name;
    return out;
  };
  if (!fn.inputs.empty()) line += " (inputs: " + names(fn.inputs) + ")";
  if (!fn.outputs.empty()) line += " (outputs: " + names(fn.outputs) + ")";
  return line;
}

}  // namespace

std::string render_candidates(const std::vector<RankedFunction>& candidates) {
  std::string out;
  for (const auto& c : candidates) out += "- " + describe(c.function) + "\n";
  return out;
}

FuncIdentifier::FuncIdentifier(const FunctionRepository& repo, const llm::LlmGateway& gateway,
                               std::size_t k, LlmCallOptions options)
    : repo_(repo), gateway_(gateway), k_(k), options_(options) {}

std::vector<SubTask> FuncIdentifier::plan_tasks(const UserQuery& query) const {
  if (query.text.empty()) throw PipelineError("plan", "query text is empty");
  llm::PromptRequest request;
  request.template_id = llm::TemplateId::Plan;
  request.bindings = {{"query", query.text}};
  request.temperature = options_.temperature;
  request.max_retries = options_.max_retries;

  nlohmann::json parsed;
  try {
    parsed = gateway_.complete(request).parsed;
  } catch (const PipelineError&) {
    throw;
  } catch (const Error& e) {
    throw PipelineError("plan", e.what());
  }
  if (parsed.empty()) throw EmptyPlanError();
  std::vector<SubTask> tasks;
  for (std::size_t i = 0; i < parsed.size(); ++i) tasks.push_back({i, parsed[i].get<std::string>()});
  return tasks;
}

FunctionSpec FuncIdentifier::select_function(const UserQuery& query, const SubTask& subtask,
                                             const std::vector<RankedFunction>& candidates) const {
  if (candidates.empty()) throw SelectionError(subtask.index, "no candidate functions");
  if (candidates.size() == 1) return candidates.front().function;

  llm::PromptRequest request;
  request.template_id = llm::TemplateId::Select;
  request.bindings = {{"query", query.text},
                      {"subtask", subtask.text},
                      {"candidates", render_candidates(candidates)}};
  request.temperature = options_.temperature;
  request.max_retries = options_.max_retries;
  for (const auto& c : candidates) request.constraints.choices.push_back(c.function.id);

  try {
    auto chosen = gateway_.complete(request).parsed.get<std::string>();
    for (const auto& c : candidates)
      if (c.function.id == chosen) return c.function;
  } catch (const Error& e) {
    throw SelectionError(subtask.index, e.what());
  }
  throw SelectionError(subtask.index, "selected function is not a candidate");
}

std::vector<WorkflowNode> FuncIdentifier::identify(const UserQuery& query) const {
  if (repo_.size() == 0) throw EmptyRepositoryError();
  auto tasks = plan_tasks(query);

  std::vector<std::future<FunctionSpec>> selections;
  selections.reserve(tasks.size());
  for (const auto& task : tasks) {
    selections.push_back(std::async(std::launch::async, [this, &query, &task] {
      std::vector<RankedFunction> candidates;
      try {
        candidates = repo_.top_k(task.text, k_);
      } catch (const Error& e) {
        throw SelectionError(task.index, std::string("retrieval failed: ") + e.what());
      }
      return select_function(query, task, candidates);
    }));
  }

  // Wait for every selection before rethrowing so no task outlives `tasks`.
  std::vector<WorkflowNode> nodes;
  std::exception_ptr first_error;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    try {
      nodes.push_back({"n" + std::to_string(tasks[i].index), tasks[i], selections[i].get()});
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return nodes;
}

}  // namespace faasflow
