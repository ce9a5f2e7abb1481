#include <algorithm>
#include <map>
#include <set>

#include "faasflow/compile/compiler.hpp"
#include "faasflow/compile/local_plan.hpp"
#include "faasflow/core/serialize.hpp"
#include "faasflow/core/topology.hpp"
#include "detail.hpp"

namespace faasflow {

namespace {

Json input_to_json(const LocalInput& in) {
  Json from = in.from_user() ? Json{{"user_input", in.source}}
                             : Json{{"node", in.source_node}, {"output", in.source}};
  return {{"param", in.param}, {"data_type", std::string(to_string(in.data_type))}, {"from", from}};
}

const Json& field(const Json& obj, const char* key, const std::string& path, Json::value_t type) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError("missing field '" + std::string(key) + "'", path);
  const auto& value = obj.at(key);
  if (value.type() != type && !(type == Json::value_t::number_unsigned && value.is_number_integer()))
    throw ParseError("field '" + std::string(key) + "' has the wrong type", path + "." + key);
  return value;
}

std::string string_field(const Json& obj, const char* key, const std::string& path) {
  return field(obj, key, path, Json::value_t::string).get<std::string>();
}

std::vector<std::string> string_list(const Json& obj, const char* key, const std::string& path) {
  std::vector<std::string> out;
  const auto& arr = field(obj, key, path, Json::value_t::array);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string()) throw ParseError("expected a string", path + "." + key + "[" + std::to_string(i) + "]");
    out.push_back(arr[i].get<std::string>());
  }
  return out;
}

DataType data_type_field(const Json& obj, const std::string& path) {
  auto text = string_field(obj, "data_type", path);
  auto type = parse_data_type(text);
  if (!type) throw ParseError("unknown data type '" + text + "'", path + ".data_type");
  return *type;
}

}  // namespace

const LocalStep* LocalPlan::find_step(std::string_view node_id) const {
  auto it = std::find_if(steps.begin(), steps.end(), [&](const LocalStep& s) { return s.node_id == node_id; });
  return it == steps.end() ? nullptr : &*it;
}

CompiledWorkflow compile_local(const WorkflowDAG& input) {
  auto report = validate_dag(input);
  if (!report.ok()) throw ValidationError("cannot compile invalid DAG", std::move(report));
  auto dag = canonicalize(input);

  Json entry = Json::array();
  for (const auto& p : dag.start.user_inputs)
    entry.push_back({{"name", p.name}, {"data_type", std::string(to_string(p.data_type))}, {"required", p.required}});

  Json steps = Json::array();
  for (const auto& id : topological_order(dag)) {
    const auto& node = *dag.find_node(id);
    LocalStep step{node.node_id, node.function.id, node.function.endpoint, {}, {}, {}};
    std::set<std::string> after;
    for (const auto& e : dag.edges) {
      if (e.target != id) continue;
      if (!e.from_start()) after.insert(e.source);
      if (!e.binding) continue;
      const auto* param = node.function.find_input(e.binding->target_param);
      step.inputs.push_back({e.binding->target_param, param->data_type,
                             e.from_start() ? std::string() : e.source,
                             e.binding->source_param.value_or(e.binding->target_param)});
    }
    std::sort(step.inputs.begin(), step.inputs.end(),
              [](const LocalInput& a, const LocalInput& b) { return a.param < b.param; });
    Json inputs = Json::array();
    for (const auto& in : step.inputs) inputs.push_back(input_to_json(in));
    Json outputs = Json::array();
    for (const auto& o : node.function.outputs) outputs.push_back(o.name);
    steps.push_back({{"node_id", step.node_id},
                     {"function_id", step.function_id},
                     {"endpoint", step.endpoint},
                     {"inputs", inputs},
                     {"outputs", outputs},
                     {"after", Json(std::vector<std::string>(after.begin(), after.end()))}});
  }

  Json doc = {{"format", std::string(kLocalFormat)},
              {"dag_id", dag.dag_id},
              {"query", dag.query},
              {"entry_params", entry},
              {"steps", steps},
              {"levels", topological_levels(dag)}};

  CompiledWorkflow compiled;
  compiled.target = CompileTarget::LocalJson;
  compiled.document = dump_pretty(doc);
  compiled.dag_id = dag.dag_id;
  for (const auto& p : dag.start.user_inputs) compiled.entry_params.push_back(p.name);
  return compiled;
}

LocalPlan parse_local_plan(std::string_view document) {
  auto doc = parse_json(document, "local workflow");
  if (!doc.is_object()) throw ParseError("expected an object", "$");
  if (string_field(doc, "format", "$") != kLocalFormat)
    throw ParseError("unsupported format, expected " + std::string(kLocalFormat), "$.format");

  LocalPlan plan;
  plan.dag_id = string_field(doc, "dag_id", "$");
  plan.query = doc.contains("query") ? string_field(doc, "query", "$") : "";

  const auto& entry = field(doc, "entry_params", "$", Json::value_t::array);
  for (std::size_t i = 0; i < entry.size(); ++i) {
    auto path = "$.entry_params[" + std::to_string(i) + "]";
    ParameterSpec p;
    p.name = string_field(entry[i], "name", path);
    p.data_type = data_type_field(entry[i], path);
    p.required = field(entry[i], "required", path, Json::value_t::boolean).get<bool>();
    plan.entry_params.push_back(std::move(p));
  }

  const auto& steps = field(doc, "steps", "$", Json::value_t::array);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    auto path = "$.steps[" + std::to_string(i) + "]";
    const auto& s = steps[i];
    LocalStep step;
    step.node_id = string_field(s, "node_id", path);
    step.function_id = string_field(s, "function_id", path);
    step.endpoint = string_field(s, "endpoint", path);
    const auto& inputs = field(s, "inputs", path, Json::value_t::array);
    for (std::size_t j = 0; j < inputs.size(); ++j) {
      auto ipath = path + ".inputs[" + std::to_string(j) + "]";
      LocalInput in;
      in.param = string_field(inputs[j], "param", ipath);
      in.data_type = data_type_field(inputs[j], ipath);
      const auto& from = field(inputs[j], "from", ipath, Json::value_t::object);
      if (from.contains("user_input")) {
        in.source = string_field(from, "user_input", ipath + ".from");
      } else {
        in.source_node = string_field(from, "node", ipath + ".from");
        in.source = string_field(from, "output", ipath + ".from");
      }
      step.inputs.push_back(std::move(in));
    }
    step.outputs = string_list(s, "outputs", path);
    step.after = string_list(s, "after", path);
    plan.steps.push_back(std::move(step));
  }

  const auto& levels = field(doc, "levels", "$", Json::value_t::array);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!levels[i].is_array()) throw ParseError("expected an array", "$.levels[" + std::to_string(i) + "]");
    std::vector<std::string> level;
    for (const auto& id : levels[i]) {
      if (!id.is_string()) throw ParseError("expected a string", "$.levels[" + std::to_string(i) + "]");
      level.push_back(id.get<std::string>());
    }
    plan.levels.push_back(std::move(level));
  }
  return plan;
}

ValidationReport check_local_plan(const LocalPlan& plan) {
  ValidationReport report;
  auto fail = [&](ViolationKind kind, std::string locus, std::string message) {
    report.violations.push_back({kind, std::move(locus), std::move(message)});
  };

  std::set<std::string> entry;
  for (const auto& p : plan.entry_params)
    if (!entry.insert(p.name).second) fail(ViolationKind::DocumentSchema, p.name, "duplicate entry parameter");

  std::map<std::string, std::size_t> level_of;
  for (std::size_t i = 0; i < plan.levels.size(); ++i)
    for (const auto& id : plan.levels[i])
      if (!level_of.emplace(id, i).second) fail(ViolationKind::DocumentSchema, id, "listed in more than one level");

  std::map<std::string, const LocalStep*> steps;
  for (const auto& s : plan.steps)
    if (!steps.emplace(s.node_id, &s).second) fail(ViolationKind::DocumentSchema, s.node_id, "duplicate step");

  for (const auto& [id, level] : level_of)
    if (!steps.count(id)) fail(ViolationKind::DanglingReference, id, "level names an unknown step");

  for (const auto& s : plan.steps) {
    if (!is_absolute_url(s.endpoint)) fail(ViolationKind::DocumentSchema, s.node_id, "endpoint is not an absolute URL");
    auto level = level_of.find(s.node_id);
    if (level == level_of.end()) fail(ViolationKind::DocumentSchema, s.node_id, "step missing from levels");
    std::set<std::string> params;
    for (const auto& dep : s.after) {
      auto it = steps.find(dep);
      if (it == steps.end() || dep == s.node_id) {
        fail(ViolationKind::DanglingReference, s.node_id, "waits for unknown step '" + dep + "'");
        continue;
      }
      auto dep_level = level_of.find(dep);
      if (level != level_of.end() && dep_level != level_of.end() && dep_level->second >= level->second)
        fail(ViolationKind::DocumentSchema, s.node_id, "scheduled no later than its dependency '" + dep + "'");
    }
    for (const auto& in : s.inputs) {
      auto locus = s.node_id + "." + in.param;
      if (!params.insert(in.param).second) fail(ViolationKind::DocumentSchema, locus, "bound twice");
      if (in.from_user()) {
        if (!entry.count(in.source))
          fail(ViolationKind::DanglingReference, locus, "unknown entry parameter '" + in.source + "'");
        continue;
      }
      auto src = steps.find(in.source_node);
      if (src == steps.end()) {
        fail(ViolationKind::DanglingReference, locus, "unknown step '" + in.source_node + "'");
        continue;
      }
      const auto& outs = src->second->outputs;
      if (std::find(outs.begin(), outs.end(), in.source) == outs.end())
        fail(ViolationKind::DanglingReference, locus, "step '" + in.source_node + "' has no output '" + in.source + "'");
      if (std::find(s.after.begin(), s.after.end(), in.source_node) == s.after.end())
        fail(ViolationKind::DanglingReference, locus, "reads '" + in.source_node + "' without waiting for it");
    }
  }
  return report;
}

ValidationReport verify_local(std::string_view document) {
  try {
    return check_local_plan(parse_local_plan(document));
  } catch (const ParseError& e) {
    ValidationReport report;
    std::string locus = e.path();
    if (e.position() != ParseError::npos) {
      auto end = std::min(e.position(), document.size());
      locus = "line " + std::to_string(1 + std::count(document.begin(), document.begin() + end, '\n'));
    }
    report.violations.push_back({e.position() != ParseError::npos ? ViolationKind::DocumentParse
                                                                   : ViolationKind::DocumentSchema,
                                 locus, e.what()});
    return report;
  }
}

}  // namespace faasflow
