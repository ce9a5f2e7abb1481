#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "faasflow/core/model.hpp"
#include "faasflow/core/validate.hpp"

namespace faasflow {

inline constexpr std::string_view kLocalFormat = "faasflow-local/v1";

/// Where a step input comes from: a user input (source_node empty) or an
/// output of an earlier step.
struct LocalInput {
  std::string param;
  DataType data_type = DataType::String;
  std::string source_node;
  std::string source;  // user-input name, or the producing step's output

  bool from_user() const { return source_node.empty(); }
  friend bool operator==(const LocalInput&, const LocalInput&) = default;
};

struct LocalStep {
  std::string node_id;
  std::string function_id;
  std::string endpoint;
  std::vector<LocalInput> inputs;  // sorted by param
  std::vector<std::string> outputs;
  std::vector<std::string> after;  // steps that must finish first, sorted

  friend bool operator==(const LocalStep&, const LocalStep&) = default;
};

/// Parsed local-json document:
///   {"format": "faasflow-local/v1", "dag_id", "query",
///    "entry_params": [{"name", "data_type", "required"}],
///    "steps": [{"node_id", "function_id", "endpoint",
///               "inputs": [{"param", "data_type",
///                           "from": {"user_input"} | {"node", "output"}}],
///               "outputs": [name], "after": [node_id]}],
///    "levels": [[node_id]]}
/// Steps appear in topological order; level i may only depend on levels < i.
struct LocalPlan {
  std::string dag_id;
  std::string query;
  std::vector<ParameterSpec> entry_params;
  std::vector<LocalStep> steps;
  std::vector<std::vector<std::string>> levels;

  const LocalStep* find_step(std::string_view node_id) const;
  friend bool operator==(const LocalPlan&, const LocalPlan&) = default;
};

/// Throws ParseError on malformed text or a field of the wrong shape.
LocalPlan parse_local_plan(std::string_view document);

/// Reference checks on a parsed plan (inputs, after lists, levels).
ValidationReport check_local_plan(const LocalPlan& plan);

}  // namespace faasflow
