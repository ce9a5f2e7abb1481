#include "faasflow/pipeline/workflow_generator.hpp"

#include <algorithm>
#include <set>

#include "faasflow/core/digest.hpp"
#include "faasflow/core/validate.hpp"

namespace faasflow {

namespace {

std::string param_line(const ParameterSpec& p) {
  std::string line = p.name + " (" + std::string(to_string(p.data_type)) + ")";
  if (!p.description.empty()) line += ": " + p.description;
  return line;
}

std::string names(const std::vector<ParameterSpec>& params) {
  std::string out;
  for (const auto& p : params) out += (out.empty() ? "" : ", ") + p.name;
  return out;
}

}  // namespace

bool OutputCatalog::contains(const std::string& node_id, const std::string& output) const {
  return std::any_of(entries.begin(), entries.end(), [&](const Entry& e) {
    return e.node_id == node_id && e.output.name == output;
  });
}

std::string OutputCatalog::render() const {
  if (entries.empty()) return "(none)\n";
  std::string out;
  for (const auto& e : entries) out += "- " + e.node_id + "." + param_line(e.output) + "\n";
  return out;
}

std::string render_nodes(const std::vector<WorkflowNode>& nodes) {
  std::string out;
  for (const auto& n : nodes) {
    out += "- " + n.node_id + ": " + n.subtask.text + " (function " + n.function.id;
    if (!n.function.inputs.empty()) out += "; inputs: " + names(n.function.inputs);
    if (!n.function.outputs.empty()) out += "; outputs: " + names(n.function.outputs);
    out += ")\n";
  }
  return out;
}

std::string default_dag_id(const std::string& query) {
  return "wf-" + to_hex(fnv1a64(query)).substr(0, 12);
}

WorkflowGenerator::WorkflowGenerator(const llm::LlmGateway& gateway, LlmCallOptions options)
    : gateway_(gateway), options_(options) {}

std::vector<WorkflowNode> WorkflowGenerator::order_nodes(const std::vector<WorkflowNode>& nodes,
                                                         const UserQuery& query) const {
  if (nodes.empty()) throw OrderingError("no nodes to order");
  if (nodes.size() == 1) return nodes;

  llm::PromptRequest request;
  request.template_id = llm::TemplateId::Order;
  request.bindings = {{"query", query.text}, {"nodes", render_nodes(nodes)}};
  request.temperature = options_.temperature;
  request.max_retries = options_.max_retries;
  for (const auto& n : nodes) request.constraints.choices.push_back(n.node_id);

  nlohmann::json order;
  try {
    order = gateway_.complete(request).parsed;
  } catch (const Error& e) {
    throw OrderingError(e.what());
  }
  std::vector<WorkflowNode> ordered;
  for (const auto& id : order) {
    auto it = std::find_if(nodes.begin(), nodes.end(),
                           [&](const WorkflowNode& n) { return n.node_id == id.get<std::string>(); });
    ordered.push_back(*it);
  }
  return ordered;
}

Classification WorkflowGenerator::classify_parameter(const WorkflowNode& node,
                                                     const ParameterSpec& param,
                                                     const OutputCatalog& catalog,
                                                     const UserQuery& query) const {
  if (catalog.entries.empty()) return {};

  llm::PromptRequest request;
  request.template_id = llm::TemplateId::Classify;
  request.bindings = {
      {"query", query.text},
      {"node", node.node_id + ", " + node.subtask.text + " (function " + node.function.id + ")"},
      {"parameter", param_line(param)},
      {"catalog", catalog.render()}};
  request.temperature = options_.temperature;
  request.max_retries = options_.max_retries;
  for (const auto& e : catalog.entries) request.constraints.catalog.emplace_back(e.node_id, e.output.name);

  try {
    return llm::to_classification(gateway_.complete(request).parsed);
  } catch (const Error& e) {
    throw ClassificationError(node.node_id, param.name, e.what());
  }
}

Dataflow WorkflowGenerator::build_dataflow(const std::vector<WorkflowNode>& ordered,
                                           const UserQuery& query) const {
  Dataflow flow;
  OutputCatalog catalog;
  std::set<std::string> user_input_names;
  std::string predecessor(kStartNodeId);

  for (const auto& node : ordered) {
    bool has_incoming = false;
    for (const auto& param : node.function.inputs) {
      auto c = classify_parameter(node, param, catalog, query);
      if (c.is_input()) {
        if (!param.required && !query.supplies(param.name)) continue;
        if (user_input_names.insert(param.name).second) flow.user_inputs.push_back(param);
        flow.edges.push_back(
            {std::string(kStartNodeId), node.node_id, ParamBinding{param.name, std::nullopt}});
      } else {
        flow.edges.push_back({c.output->first, node.node_id, ParamBinding{param.name, c.output->second}});
      }
      has_incoming = true;
    }
    if (!has_incoming) flow.edges.push_back({predecessor, node.node_id, std::nullopt});
    for (const auto& out : node.function.outputs) catalog.entries.push_back({node.node_id, out});
    predecessor = node.node_id;
  }
  return flow;
}

WorkflowDAG WorkflowGenerator::assemble_dag(std::string dag_id, std::vector<WorkflowNode> nodes,
                                            Dataflow dataflow, const UserQuery& query) {
  WorkflowDAG dag;
  dag.dag_id = std::move(dag_id);
  dag.query = query.text;
  dag.start.user_inputs = std::move(dataflow.user_inputs);
  dag.nodes = std::move(nodes);
  dag.edges = std::move(dataflow.edges);
  dag = canonicalize(std::move(dag));
  auto report = validate_dag(dag);
  if (!report.ok()) throw AssemblyError(std::move(report));
  return dag;
}

WorkflowDAG WorkflowGenerator::generate(std::string dag_id, const std::vector<WorkflowNode>& nodes,
                                        const UserQuery& query) const {
  auto ordered = order_nodes(nodes, query);
  auto flow = build_dataflow(ordered, query);
  return assemble_dag(std::move(dag_id), nodes, std::move(flow), query);
}

WorkflowDAG generate_workflow(const FuncIdentifier& identifier, const WorkflowGenerator& generator,
                              const UserQuery& query, std::string dag_id) {
  if (dag_id.empty()) dag_id = default_dag_id(query.text);
  return generator.generate(std::move(dag_id), identifier.identify(query), query);
}

}  // namespace faasflow
