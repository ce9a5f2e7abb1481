#include "faasflow/core/model.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>

namespace faasflow {

namespace {

constexpr std::string_view kTypeNames[] = {"string", "number", "boolean", "object",
                                           "array"};

const ParameterSpec* find_param(const std::vector<ParameterSpec>& params,
                                std::string_view name) {
  auto it = std::find_if(params.begin(), params.end(),
                         [&](const ParameterSpec& p) { return p.name == name; });
  return it == params.end() ? nullptr : &*it;
}

void check_params(const std::vector<ParameterSpec>& params, std::string_view list,
                  std::vector<std::string>& problems) {
  std::set<std::string_view> seen;
  for (const auto& p : params) {
    if (p.name.empty()) {
      problems.push_back(std::string(list) + ": parameter with empty name");
    } else if (!seen.insert(p.name).second) {
      problems.push_back(std::string(list) + ": duplicate parameter '" + p.name + "'");
    }
  }
}

}  // namespace

std::string_view to_string(DataType type) {
  return kTypeNames[static_cast<std::size_t>(type)];
}

std::optional<DataType> parse_data_type(std::string_view text) {
  for (std::size_t i = 0; i < std::size(kTypeNames); ++i) {
    if (kTypeNames[i] == text) return static_cast<DataType>(i);
  }
  return std::nullopt;
}

const ParameterSpec* FunctionSpec::find_input(std::string_view param) const {
  return find_param(inputs, param);
}

const ParameterSpec* FunctionSpec::find_output(std::string_view param) const {
  return find_param(outputs, param);
}

const ParameterSpec* StartNode::find_input(std::string_view name) const {
  return find_param(user_inputs, name);
}

bool is_identifier(std::string_view text) {
  return !text.empty() && std::all_of(text.begin(), text.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  }) && text != "." && text != "..";
}

bool is_absolute_url(std::string_view url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos || scheme_end == 0) return false;
  for (char c : url.substr(0, scheme_end)) {
    if (!std::isalpha(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.')
      return false;
  }
  auto rest = url.substr(scheme_end + 3);
  return !rest.empty() && rest.front() != '/';
}

std::vector<std::string> check_function_spec(const FunctionSpec& spec) {
  std::vector<std::string> problems;
  if (!is_identifier(spec.id)) problems.push_back("id '" + spec.id + "' is not an identifier");
  if (spec.name.empty()) problems.push_back("name is empty");
  if (!is_absolute_url(spec.endpoint))
    problems.push_back("endpoint '" + spec.endpoint + "' is not an absolute URL");
  check_params(spec.inputs, "inputs", problems);
  check_params(spec.outputs, "outputs", problems);
  return problems;
}

const WorkflowNode* WorkflowDAG::find_node(std::string_view node_id) const {
  auto it = std::find_if(nodes.begin(), nodes.end(),
                         [&](const WorkflowNode& n) { return n.node_id == node_id; });
  return it == nodes.end() ? nullptr : &*it;
}

WorkflowDAG canonicalize(WorkflowDAG dag) {
  std::stable_sort(dag.nodes.begin(), dag.nodes.end(),
                   [](const WorkflowNode& a, const WorkflowNode& b) {
                     return a.node_id < b.node_id;
                   });
  auto key = [](const DataFlowEdge& e) {
    static const std::string none;
    const auto& tp = e.binding ? e.binding->target_param : none;
    const auto& sp = e.binding && e.binding->source_param ? *e.binding->source_param : none;
    return std::tie(e.source, e.target, tp, sp);
  };
  std::stable_sort(dag.edges.begin(), dag.edges.end(),
                   [&](const DataFlowEdge& a, const DataFlowEdge& b) { return key(a) < key(b); });
  return dag;
}

}  // namespace faasflow
