#include "faasflow/compile/argo_import.hpp"

#include <map>
#include <regex>
#include <set>

#include <yaml-cpp/yaml.h>

#include "faasflow/compile/compiler.hpp"

namespace faasflow {

namespace {

std::string scalar(const YAML::Node& node, const std::string& fallback = {}) {
  return node && node.IsScalar() ? node.as<std::string>() : fallback;
}

std::vector<ParameterSpec> declared(const YAML::Node& section) {
  std::vector<ParameterSpec> out;
  if (!section || !section["parameters"] || !section["parameters"].IsSequence()) return out;
  for (const auto& p : section["parameters"])
    if (auto name = scalar(p["name"]); !name.empty()) out.push_back({name, DataType::String, "", !p["default"]});
  return out;
}

FunctionSpec resolve_function(const std::string& template_name, const YAML::Node& tmpl,
                              const std::vector<FunctionSpec>& known) {
  std::string annotated;
  if (tmpl && tmpl["metadata"] && tmpl["metadata"]["annotations"])
    annotated = scalar(tmpl["metadata"]["annotations"][std::string(kFunctionIdAnnotation)]);
  std::string url = tmpl && tmpl["http"] ? scalar(tmpl["http"]["url"]) : "";

  for (const auto& fn : known)
    if (!annotated.empty() && fn.id == annotated) return fn;
  for (const auto& fn : known)
    if (argo_template_name(fn.id) == template_name) return fn;
  for (const auto& fn : known)
    if (!url.empty() && fn.endpoint == url) return fn;

  FunctionSpec placeholder;
  placeholder.id = template_name;
  placeholder.name = template_name;
  placeholder.endpoint = url;
  if (tmpl) {
    placeholder.inputs = declared(tmpl["inputs"]);
    placeholder.outputs = declared(tmpl["outputs"]);
  }
  return placeholder;
}

YAML::Node dag_template(const YAML::Node& templates, const std::string& entrypoint) {
  for (const auto& t : templates)
    if (scalar(t["name"]) == entrypoint && t["dag"]) return t;
  for (const auto& t : templates)
    if (t["dag"]) return t;
  return {};
}

std::set<std::string> dependencies_of(const YAML::Node& task, const std::set<std::string>& task_names) {
  std::set<std::string> deps;
  if (task["dependencies"] && task["dependencies"].IsSequence())
    for (const auto& d : task["dependencies"]) deps.insert(scalar(d));
  // "depends" expressions such as "a && (b.Succeeded || c)".
  if (auto depends = scalar(task["depends"]); !depends.empty()) {
    static const std::regex word(R"([A-Za-z0-9_-]+)");
    for (auto it = std::sregex_iterator(depends.begin(), depends.end(), word); it != std::sregex_iterator(); ++it)
      if (task_names.count(it->str())) deps.insert(it->str());
  }
  return deps;
}

}  // namespace

WorkflowDAG import_argo(std::string_view document, const std::vector<FunctionSpec>& known) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(document));
  } catch (const YAML::Exception& e) {
    throw ParseError("unreadable YAML at line " + std::to_string(e.mark.line + 1) + ": " + e.msg, "$",
                     e.mark.is_null() ? ParseError::npos : static_cast<std::size_t>(e.mark.pos));
  }
  try {
    if (!root.IsMap() || !root["spec"] || !root["spec"]["templates"] || !root["spec"]["templates"].IsSequence())
      throw ParseError("not an Argo Workflow manifest", "$.spec.templates");
    auto spec = root["spec"];
    auto main = dag_template(spec["templates"], scalar(spec["entrypoint"]));
    if (!main || !main["dag"]["tasks"] || !main["dag"]["tasks"].IsSequence())
      throw ParseError("manifest has no dag template", "$.spec.templates");

    std::map<std::string, YAML::Node> templates;
    for (const auto& t : spec["templates"])
      if (auto name = scalar(t["name"]); !name.empty()) templates.emplace(name, t);

    WorkflowDAG dag;
    if (root["metadata"]) {
      auto annotations = root["metadata"]["annotations"];
      dag.dag_id = annotations ? scalar(annotations["faasflow.io/dag-id"]) : "";
      dag.query = annotations ? scalar(annotations["faasflow.io/query"]) : "";
      if (dag.dag_id.empty()) {
        dag.dag_id = scalar(root["metadata"]["name"], scalar(root["metadata"]["generateName"]));
        if (!dag.dag_id.empty() && dag.dag_id.back() == '-') dag.dag_id.pop_back();
      }
    }
    if (spec["arguments"]) dag.start.user_inputs = declared(spec["arguments"]);
    for (auto& p : dag.start.user_inputs) p.required = true;

    std::set<std::string> task_names;
    for (const auto& task : main["dag"]["tasks"]) task_names.insert(scalar(task["name"]));

    static const std::regex workflow_ref(R"(\{\{\s*workflow\.parameters\.([^\s}]+)\s*\}\})");
    static const std::regex task_ref(R"(\{\{\s*tasks\.([^.\s}]+)\.outputs\.parameters\.([^\s}]+)\s*\}\})");
    std::size_t index = 0;
    for (const auto& task : main["dag"]["tasks"]) {
      auto name = scalar(task["name"]);
      auto tmpl_name = scalar(task["template"]);
      auto tmpl = templates.count(tmpl_name) ? templates.at(tmpl_name) : YAML::Node();
      dag.nodes.push_back({name, {index++, name}, resolve_function(tmpl_name, tmpl, known)});

      std::set<std::string> bound_sources;
      bool has_incoming = false;
      if (task["arguments"] && task["arguments"]["parameters"])
        for (const auto& arg : task["arguments"]["parameters"]) {
          auto param = scalar(arg["name"]);
          auto value = scalar(arg["value"]);
          std::smatch m;
          if (std::regex_search(value, m, task_ref)) {
            dag.edges.push_back({m[1].str(), name, ParamBinding{param, m[2].str()}});
            bound_sources.insert(m[1].str());
            has_incoming = true;
          } else if (std::regex_search(value, m, workflow_ref)) {
            dag.edges.push_back({std::string(kStartNodeId), name, ParamBinding{param, std::nullopt}});
            has_incoming = true;
          }
        }
      for (const auto& dep : dependencies_of(task, task_names))
        if (!bound_sources.count(dep)) {
          dag.edges.push_back({dep, name, std::nullopt});
          has_incoming = true;
        }
      if (!has_incoming) dag.edges.push_back({std::string(kStartNodeId), name, std::nullopt});
    }
    return dag;
  } catch (const YAML::Exception& e) {
    throw ParseError("malformed Argo manifest: " + e.msg, "$");
  }
}

}  // namespace faasflow
