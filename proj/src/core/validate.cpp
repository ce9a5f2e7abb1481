#include "faasflow/core/validate.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "faasflow/core/topology.hpp"

namespace faasflow {

namespace {

std::string edge_locus(const DataFlowEdge& e) {
  std::string locus = e.source + "->" + e.target;
  if (e.binding) locus += ":" + e.binding->target_param;
  return locus;
}

}  // namespace

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::EmptyNodeId: return "empty-node-id";
    case ViolationKind::DuplicateNodeId: return "duplicate-node-id";
    case ViolationKind::ReservedNodeId: return "reserved-node-id";
    case ViolationKind::InvalidFunction: return "invalid-function";
    case ViolationKind::EmptySubtaskText: return "empty-subtask-text";
    case ViolationKind::SubtaskIndexGap: return "subtask-index-gap";
    case ViolationKind::InvalidUserInput: return "invalid-user-input";
    case ViolationKind::UnknownEdgeEndpoint: return "unknown-edge-endpoint";
    case ViolationKind::SelfLoop: return "self-loop";
    case ViolationKind::Cycle: return "cycle";
    case ViolationKind::Unreachable: return "unreachable";
    case ViolationKind::UnknownTargetParam: return "unknown-target-param";
    case ViolationKind::UnknownSourceParam: return "unknown-source-param";
    case ViolationKind::UnknownUserInput: return "unknown-user-input";
    case ViolationKind::MalformedBinding: return "malformed-binding";
    case ViolationKind::DuplicateBinding: return "duplicate-binding";
    case ViolationKind::UnboundParameter: return "unbound-parameter";
    case ViolationKind::DocumentParse: return "document-parse";
    case ViolationKind::DocumentSchema: return "document-schema";
    case ViolationKind::DanglingReference: return "dangling-reference";
    case ViolationKind::TypeMismatch: return "type-mismatch";
  }
  return "unknown";
}

bool ValidationReport::has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::to_string() const {
  if (violations.empty()) return "valid";
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += std::string(faasflow::to_string(v.kind)) + " at " + v.locus + ": " + v.message;
  }
  return out;
}

ValidationReport validate_dag(const WorkflowDAG& dag) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, std::string locus, std::string message) {
    report.violations.push_back({kind, std::move(locus), std::move(message)});
  };

  std::map<std::string, const WorkflowNode*> nodes;
  std::set<std::size_t> indices;
  for (const auto& node : dag.nodes) {
    if (node.node_id.empty()) {
      add(ViolationKind::EmptyNodeId, "", "node with empty node_id");
      continue;
    }
    if (node.node_id == kStartNodeId) {
      add(ViolationKind::ReservedNodeId, node.node_id, "node_id is reserved for the start node");
      continue;
    }
    if (!nodes.emplace(node.node_id, &node).second) {
      add(ViolationKind::DuplicateNodeId, node.node_id, "node_id used more than once");
      continue;
    }
    for (const auto& problem : check_function_spec(node.function))
      add(ViolationKind::InvalidFunction, node.node_id, problem);
    if (node.subtask.text.empty())
      add(ViolationKind::EmptySubtaskText, node.node_id, "sub-task text is empty");
    indices.insert(node.subtask.index);
  }
  if (!indices.empty() &&
      (indices.size() != nodes.size() || *indices.rbegin() != indices.size() - 1)) {
    add(ViolationKind::SubtaskIndexGap, dag.dag_id,
        "sub-task indices are not contiguous from 0");
  }

  std::set<std::string_view> user_inputs;
  for (const auto& p : dag.start.user_inputs) {
    if (p.name.empty()) {
      add(ViolationKind::InvalidUserInput, std::string(kStartNodeId), "user input with empty name");
    } else if (!user_inputs.insert(p.name).second) {
      add(ViolationKind::InvalidUserInput, p.name, "duplicate user input name");
    }
  }

  std::map<std::pair<std::string, std::string>, std::size_t> binding_count;
  std::map<std::string, std::vector<std::string>> successors;
  WorkflowDAG live;  // nodes and well-formed edges only, for cycle detection
  for (const auto& [id, node] : nodes) live.nodes.push_back(*node);
  for (const auto& edge : dag.edges) {
    auto locus = edge_locus(edge);
    bool source_known = edge.from_start() || nodes.contains(edge.source);
    bool target_known = nodes.contains(edge.target);
    if (!source_known || !target_known) {
      add(ViolationKind::UnknownEdgeEndpoint, locus,
          "edge references unknown node '" + (source_known ? edge.target : edge.source) + "'");
      continue;
    }
    if (edge.source == edge.target) {
      add(ViolationKind::SelfLoop, locus, "edge source equals target");
      continue;
    }
    successors[edge.source].push_back(edge.target);
    live.edges.push_back(edge);
    if (!edge.binding) continue;

    const auto& binding = *edge.binding;
    const auto& target_fn = nodes.at(edge.target)->function;
    const ParameterSpec* target_param = target_fn.find_input(binding.target_param);
    if (!target_param) {
      add(ViolationKind::UnknownTargetParam, locus,
          "'" + binding.target_param + "' is not an input of " + target_fn.id);
    }
    if (++binding_count[{edge.target, binding.target_param}] == 2) {
      add(ViolationKind::DuplicateBinding, edge.target + "." + binding.target_param,
          "parameter '" + binding.target_param + "' bound more than once");
    }

    const ParameterSpec* source_param = nullptr;
    if (edge.from_start()) {
      if (binding.source_param) {
        add(ViolationKind::MalformedBinding, locus, "start-node binding carries a source_param");
      }
      source_param = dag.start.find_input(binding.target_param);
      if (!source_param) {
        add(ViolationKind::UnknownUserInput, locus,
            "no user input named '" + binding.target_param + "'");
      }
    } else if (!binding.source_param) {
      add(ViolationKind::MalformedBinding, locus, "node-output binding lacks a source_param");
    } else {
      const auto& source_fn = nodes.at(edge.source)->function;
      source_param = source_fn.find_output(*binding.source_param);
      if (!source_param) {
        add(ViolationKind::UnknownSourceParam, locus,
            "'" + *binding.source_param + "' is not an output of " + source_fn.id);
      }
    }
    if (source_param && target_param && source_param->data_type != target_param->data_type) {
      report.warnings.push_back(
          {ViolationKind::TypeMismatch, locus,
           std::string(to_string(source_param->data_type)) + " routed into " +
               std::string(to_string(target_param->data_type))});
    }
  }

  if (auto cycle = find_cycle(live); !cycle.empty()) {
    std::string locus;
    for (const auto& id : cycle) locus += (locus.empty() ? "" : "->") + id;
    add(ViolationKind::Cycle, locus, "edges form a directed cycle");
  }

  std::set<std::string> reached;
  std::deque<std::string> frontier{std::string(kStartNodeId)};
  while (!frontier.empty()) {
    auto id = frontier.front();
    frontier.pop_front();
    for (const auto& next : successors[id]) {
      if (reached.insert(next).second) frontier.push_back(next);
    }
  }
  for (const auto& [id, node] : nodes) {
    if (!reached.contains(id))
      add(ViolationKind::Unreachable, id, "node is not reachable from the start node");
    for (const auto& input : node->function.inputs) {
      if (input.required && !binding_count.contains({id, input.name})) {
        add(ViolationKind::UnboundParameter, id + "." + input.name,
            "required input '" + input.name + "' has no incoming binding");
      }
    }
  }
  return report;
}

}  // namespace faasflow
