#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace faasflow {

enum class DataType { String, Number, Boolean, Object, Array };

std::string_view to_string(DataType type);
std::optional<DataType> parse_data_type(std::string_view text);

struct ParameterSpec {
  std::string name;
  DataType data_type = DataType::String;
  std::string description;
  bool required = true;

  friend bool operator==(const ParameterSpec&, const ParameterSpec&) = default;
};

/// A deployed FaaS function as registered in the repository.
struct FunctionSpec {
  std::string id;
  std::string name;
  std::string description;
  std::vector<ParameterSpec> inputs;
  std::vector<ParameterSpec> outputs;
  std::string endpoint;

  const ParameterSpec* find_input(std::string_view param) const;
  const ParameterSpec* find_output(std::string_view param) const;

  friend bool operator==(const FunctionSpec&, const FunctionSpec&) = default;
};

/// Invariant violations of a FunctionSpec in human-readable form; empty when
/// the spec is well formed.
std::vector<std::string> check_function_spec(const FunctionSpec& spec);

bool is_absolute_url(std::string_view url);
/// Letters, digits, '_', '-' and '.'; non-empty.
bool is_identifier(std::string_view text);

struct SubTask {
  std::size_t index = 0;
  std::string text;

  friend bool operator==(const SubTask&, const SubTask&) = default;
};

/// Reserved id of the synthetic start node holding direct user inputs.
inline constexpr std::string_view kStartNodeId = "__start__";

struct WorkflowNode {
  std::string node_id;
  SubTask subtask;
  FunctionSpec function;

  friend bool operator==(const WorkflowNode&, const WorkflowNode&) = default;
};

/// Parameter routed along an edge. A missing `source_param` means the value
/// is the user input of the same name as `target_param` (edge from the start
/// node).
struct ParamBinding {
  std::string target_param;
  std::optional<std::string> source_param;

  friend bool operator==(const ParamBinding&, const ParamBinding&) = default;
};

/// Edge of the dataflow graph. Edges without a binding only order execution.
struct DataFlowEdge {
  std::string source;
  std::string target;
  std::optional<ParamBinding> binding;

  bool is_ordering_only() const { return !binding.has_value(); }
  bool from_start() const { return source == kStartNodeId; }

  friend bool operator==(const DataFlowEdge&, const DataFlowEdge&) = default;
};

struct StartNode {
  std::vector<ParameterSpec> user_inputs;

  const ParameterSpec* find_input(std::string_view name) const;

  friend bool operator==(const StartNode&, const StartNode&) = default;
};

/// Platform-neutral workflow: nodes plus dataflow edges rooted at the start
/// node. Immutable once assembled.
struct WorkflowDAG {
  std::string dag_id;
  std::string query;
  StartNode start;
  std::vector<WorkflowNode> nodes;
  std::vector<DataFlowEdge> edges;

  const WorkflowNode* find_node(std::string_view node_id) const;

  friend bool operator==(const WorkflowDAG&, const WorkflowDAG&) = default;
};

/// Sorts nodes by node_id and edges by (source, target, target_param,
/// source_param), the order used by the canonical document.
WorkflowDAG canonicalize(WorkflowDAG dag);

}  // namespace faasflow
