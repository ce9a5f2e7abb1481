#include "faasflow/core/serialize.hpp"

#include <set>

#include "faasflow/core/error.hpp"
#include "faasflow/core/validate.hpp"

namespace faasflow {

namespace {

const Json& field(const Json& doc, const std::string& key, const std::string& path) {
  if (!doc.is_object()) throw ParseError(path + " is not an object", path);
  auto it = doc.find(key);
  if (it == doc.end()) throw ParseError("missing field '" + key + "' in " + path, path);
  return *it;
}

std::string string_field(const Json& doc, const std::string& key, const std::string& path) {
  const auto& value = field(doc, key, path);
  if (!value.is_string())
    throw ParseError(path + "." + key + " must be a string", path + "." + key);
  return value.get<std::string>();
}

std::optional<std::string> nullable_string(const Json& doc, const std::string& key,
                                           const std::string& path) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return std::nullopt;
  if (!it->is_string())
    throw ParseError(path + "." + key + " must be a string or null", path + "." + key);
  return it->get<std::string>();
}

const Json& array_field(const Json& doc, const std::string& key, const std::string& path) {
  const auto& value = field(doc, key, path);
  if (!value.is_array())
    throw ParseError(path + "." + key + " must be an array", path + "." + key);
  return value;
}

std::vector<ParameterSpec> params_from_json(const Json& doc, const std::string& key,
                                            const std::string& path) {
  std::vector<ParameterSpec> params;
  auto it = doc.find(key);
  if (it == doc.end()) return params;
  if (!it->is_array()) throw ParseError(path + "." + key + " must be an array", path + "." + key);
  for (std::size_t i = 0; i < it->size(); ++i)
    params.push_back(parameter_from_json((*it)[i], path + "." + key + "[" + std::to_string(i) + "]"));
  return params;
}

}  // namespace

std::string dump_pretty(const Json& doc) {
  return doc.dump(2, ' ', false, Json::error_handler_t::replace) + "\n";
}

Json parse_json(std::string_view text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(what + ": syntax error at byte " + std::to_string(e.byte) + ": " + e.what(),
                     "$", e.byte);
  }
}

Json parameter_to_json(const ParameterSpec& param, bool with_required) {
  Json doc = {{"name", param.name},
              {"data_type", std::string(to_string(param.data_type))},
              {"description", param.description}};
  if (with_required) doc["required"] = param.required;
  return doc;
}

ParameterSpec parameter_from_json(const Json& doc, const std::string& path) {
  ParameterSpec param;
  param.name = string_field(doc, "name", path);
  auto type_text = string_field(doc, "data_type", path);
  auto type = parse_data_type(type_text);
  if (!type)
    throw ParseError("unknown data_type '" + type_text + "' at " + path, path + ".data_type");
  param.data_type = *type;
  if (auto it = doc.find("description"); it != doc.end() && it->is_string())
    param.description = it->get<std::string>();
  if (auto it = doc.find("required"); it != doc.end()) {
    if (!it->is_boolean())
      throw ParseError(path + ".required must be a boolean", path + ".required");
    param.required = it->get<bool>();
  }
  return param;
}

Json function_to_json(const FunctionSpec& spec) {
  Json inputs = Json::array();
  for (const auto& p : spec.inputs) inputs.push_back(parameter_to_json(p));
  Json outputs = Json::array();
  for (const auto& p : spec.outputs) outputs.push_back(parameter_to_json(p, false));
  return {{"id", spec.id},
          {"name", spec.name},
          {"description", spec.description},
          {"endpoint", spec.endpoint},
          {"inputs", std::move(inputs)},
          {"outputs", std::move(outputs)}};
}

FunctionSpec function_from_json(const Json& doc, const std::string& path) {
  FunctionSpec spec;
  spec.id = string_field(doc, "id", path);
  spec.name = doc.contains("name") ? string_field(doc, "name", path) : spec.id;
  if (auto it = doc.find("description"); it != doc.end() && it->is_string())
    spec.description = it->get<std::string>();
  spec.endpoint = string_field(doc, "endpoint", path);
  spec.inputs = params_from_json(doc, "inputs", path);
  spec.outputs = params_from_json(doc, "outputs", path);
  return spec;
}

Json dag_to_json(const WorkflowDAG& dag) {
  auto sorted = canonicalize(dag);
  Json user_inputs = Json::array();
  for (const auto& p : sorted.start.user_inputs) user_inputs.push_back(parameter_to_json(p));
  Json nodes = Json::array();
  for (const auto& n : sorted.nodes) {
    nodes.push_back({{"node_id", n.node_id},
                     {"subtask", {{"index", n.subtask.index}, {"text", n.subtask.text}}},
                     {"function_id", n.function.id}});
  }
  Json edges = Json::array();
  for (const auto& e : sorted.edges) {
    Json edge = {{"source", e.source}, {"target", e.target}};
    edge["target_param"] = e.binding ? Json(e.binding->target_param) : Json(nullptr);
    edge["source_param"] =
        e.binding && e.binding->source_param ? Json(*e.binding->source_param) : Json(nullptr);
    edges.push_back(std::move(edge));
  }
  return {{"dag_id", sorted.dag_id},
          {"query", sorted.query},
          {"user_inputs", std::move(user_inputs)},
          {"nodes", std::move(nodes)},
          {"edges", std::move(edges)}};
}

std::string canonical_serialize(const WorkflowDAG& dag) {
  auto report = validate_dag(dag);
  if (!report.ok()) throw ValidationError("cannot serialize invalid DAG", std::move(report));
  return dump_pretty(dag_to_json(dag));
}

WorkflowDAG dag_from_json(const Json& doc, const FunctionResolver& resolve) {
  WorkflowDAG dag;
  dag.dag_id = string_field(doc, "dag_id", "$");
  dag.query = string_field(doc, "query", "$");

  std::set<std::string> names;
  const auto& inputs = array_field(doc, "user_inputs", "$");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    auto param = parameter_from_json(inputs[i], "$.user_inputs[" + std::to_string(i) + "]");
    if (!names.insert(param.name).second) throw DuplicateIdError(param.name);
    dag.start.user_inputs.push_back(std::move(param));
  }

  std::set<std::string> node_ids;
  const auto& nodes = array_field(doc, "nodes", "$");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto path = "$.nodes[" + std::to_string(i) + "]";
    WorkflowNode node;
    node.node_id = string_field(nodes[i], "node_id", path);
    if (!node_ids.insert(node.node_id).second) throw DuplicateIdError(node.node_id);
    const auto& subtask = field(nodes[i], "subtask", path);
    const auto& index = field(subtask, "index", path + ".subtask");
    if (!index.is_number_unsigned())
      throw ParseError(path + ".subtask.index must be a non-negative integer",
                       path + ".subtask.index");
    node.subtask.index = index.get<std::size_t>();
    node.subtask.text = string_field(subtask, "text", path + ".subtask");
    auto function_id = string_field(nodes[i], "function_id", path);
    auto function = resolve ? resolve(function_id) : std::nullopt;
    if (!function)
      throw ParseError("unknown function_id '" + function_id + "' at " + path,
                       path + ".function_id");
    node.function = std::move(*function);
    dag.nodes.push_back(std::move(node));
  }

  const auto& edges = array_field(doc, "edges", "$");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto path = "$.edges[" + std::to_string(i) + "]";
    DataFlowEdge edge;
    edge.source = string_field(edges[i], "source", path);
    edge.target = string_field(edges[i], "target", path);
    auto target_param = nullable_string(edges[i], "target_param", path);
    auto source_param = nullable_string(edges[i], "source_param", path);
    if (target_param) {
      edge.binding = ParamBinding{*target_param, source_param};
    } else if (source_param) {
      throw ParseError("source_param without target_param at " + path, path);
    }
    dag.edges.push_back(std::move(edge));
  }
  return dag;
}

WorkflowDAG parse_dag(std::string_view text, const FunctionResolver& resolve) {
  return dag_from_json(parse_json(text, "DAG document"), resolve);
}

}  // namespace faasflow
