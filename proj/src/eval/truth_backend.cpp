#include "faasflow/eval/truth_backend.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <json.hpp>

#include "faasflow/compile/compiler.hpp"
#include "faasflow/core/topology.hpp"

namespace faasflow::eval {

namespace {

std::string before(const std::string& text, std::string_view delimiter) {
  return text.substr(0, text.find(delimiter));
}

const std::string& binding(const llm::BackendCall& call, const std::string& name) {
  auto it = call.request.bindings.find(name);
  if (it == call.request.bindings.end()) throw llm::BackendError("prompt lacks '" + name + "'");
  return it->second;
}

}  // namespace

std::vector<std::string> generation_order(const WorkflowDAG& dag) {
  std::map<std::string, std::string> chained;  // ordering source -> target
  std::map<std::string, std::size_t> indegree;
  std::set<std::string> ordering_targets;
  for (const auto& n : dag.nodes) indegree[n.node_id] = 0;
  for (const auto& e : dag.edges) {
    if (e.is_ordering_only()) {
      if (!chained.emplace(e.source, e.target).second) return topological_order(dag);
      ordering_targets.insert(e.target);
    }
    if (!e.from_start()) ++indegree[e.target];
  }
  std::map<std::string, std::vector<std::string>> next;
  for (const auto& e : dag.edges)
    if (!e.from_start()) next[e.source].push_back(e.target);

  std::vector<std::string> order;
  std::string last(kStartNodeId);
  while (order.size() < dag.nodes.size()) {
    std::string pick;
    if (auto it = chained.find(last); it != chained.end() && indegree[it->second] == 0) {
      pick = it->second;
    } else {
      for (const auto& [id, deg] : indegree)
        if (deg == 0 && !ordering_targets.count(id)) {
          pick = id;
          break;
        }
    }
    if (pick.empty()) return topological_order(dag);
    order.push_back(pick);
    indegree.erase(pick);
    ordering_targets.erase(pick);
    for (const auto& t : next[pick]) --indegree[t];
    last = pick;
  }
  return order;
}

TruthBackend::TruthBackend(WorkflowDAG truth, Composer composer)
    : truth_(std::move(truth)), composer_(std::move(composer)), order_(generation_order(truth_)) {}

std::string TruthBackend::complete(const llm::BackendCall& call) {
  using llm::TemplateId;
  switch (call.request.template_id) {
    case TemplateId::Plan: {
      auto nodes = truth_.nodes;
      std::sort(nodes.begin(), nodes.end(),
                [](const WorkflowNode& a, const WorkflowNode& b) { return a.subtask.index < b.subtask.index; });
      nlohmann::json tasks = nlohmann::json::array();
      for (const auto& n : nodes) tasks.push_back(n.subtask.text);
      return tasks.dump();
    }
    case TemplateId::Select: {
      const auto& text = binding(call, "subtask");
      for (const auto& n : truth_.nodes)
        if (n.subtask.text == text) return nlohmann::json{{"function_id", n.function.id}}.dump();
      throw llm::BackendError("no truth node for sub-task '" + text + "'");
    }
    case TemplateId::Order:
      return nlohmann::json(order_).dump();
    case TemplateId::Classify: {
      auto node = before(binding(call, "node"), ",");
      auto param = before(binding(call, "parameter"), " (");
      for (const auto& e : truth_.edges)
        if (e.target == node && e.binding && e.binding->target_param == param && !e.from_start())
          return nlohmann::json{{"source", {{"node_id", e.source}, {"output", *e.binding->source_param}}}}.dump();
      return R"({"source": "INPUT"})";
    }
    case TemplateId::ComposeArgo:
    case TemplateId::ComposeWorkflow:
      if (composer_) return composer_(call.request.template_id, truth_);
      return "```yaml\n" + compile_argo(truth_).document + "```\n";
  }
  throw llm::BackendError("unsupported template");
}

}  // namespace faasflow::eval
