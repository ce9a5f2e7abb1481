#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <set>

#include <yaml-cpp/yaml.h>

#include "faasflow/compile/compiler.hpp"
#include "faasflow/core/digest.hpp"
#include "faasflow/core/topology.hpp"
#include "detail.hpp"

namespace faasflow {

namespace {

constexpr std::string_view kApiVersion = "argoproj.io/v1alpha1";
constexpr std::string_view kEntrypoint = "main";

std::string dns_label(std::string_view text) {
  std::string out;
  for (char c : text) {
    auto u = static_cast<unsigned char>(c);
    out += std::isalnum(u) ? static_cast<char>(std::tolower(u)) : '-';
  }
  return out;
}

/// Template name per function id. Distinct ids that sanitize to the same
/// name get a digest suffix.
std::map<std::string, std::string> template_names(const WorkflowDAG& dag) {
  std::map<std::string, std::set<std::string>> by_name;
  for (const auto& n : dag.nodes) by_name[argo_template_name(n.function.id)].insert(n.function.id);
  std::map<std::string, std::string> names;
  for (const auto& [name, ids] : by_name)
    for (const auto& id : ids)
      names[id] = ids.size() == 1 ? name : name + "-" + to_hex(fnv1a64(id)).substr(0, 8);
  return names;
}

std::string request_body(const FunctionSpec& fn) {
  std::string body = "{";
  for (std::size_t i = 0; i < fn.inputs.size(); ++i) {
    const auto& p = fn.inputs[i];
    auto ref = "{{inputs.parameters." + p.name + "}}";
    if (i) body += ", ";
    body += "\"" + p.name + "\": " + (p.data_type == DataType::String ? "\"" + ref + "\"" : ref);
  }
  return body + "}";
}

void emit_task(YAML::Emitter& out, const WorkflowNode& node, const WorkflowDAG& dag,
               const std::map<std::string, std::string>& templates) {
  std::set<std::string> deps;
  std::map<std::string, std::string> args;
  for (const auto& e : dag.edges) {
    if (e.target != node.node_id) continue;
    if (!e.from_start()) deps.insert(e.source);
    if (!e.binding) continue;
    args[e.binding->target_param] =
        e.from_start()
            ? "{{workflow.parameters." + e.binding->target_param + "}}"
            : "{{tasks." + e.source + ".outputs.parameters." + *e.binding->source_param + "}}";
  }
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << node.node_id;
  out << YAML::Key << "template" << YAML::Value << templates.at(node.function.id);
  if (!deps.empty()) {
    out << YAML::Key << "dependencies" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& d : deps) out << d;
    out << YAML::EndSeq;
  }
  if (!args.empty()) {
    out << YAML::Key << "arguments" << YAML::Value << YAML::BeginMap << YAML::Key << "parameters"
        << YAML::Value << YAML::BeginSeq;
    for (const auto& [name, value] : args)
      out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << name << YAML::Key << "value"
          << YAML::Value << YAML::DoubleQuoted << value << YAML::EndMap;
    out << YAML::EndSeq << YAML::EndMap;
  }
  out << YAML::EndMap;
}

void emit_function_template(YAML::Emitter& out, const FunctionSpec& fn, const std::string& name) {
  out << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << name;
  out << YAML::Key << "metadata" << YAML::Value << YAML::BeginMap << YAML::Key << "annotations"
      << YAML::Value << YAML::BeginMap << YAML::Key << std::string(kFunctionIdAnnotation)
      << YAML::Value << fn.id << YAML::EndMap << YAML::EndMap;
  if (!fn.inputs.empty()) {
    out << YAML::Key << "inputs" << YAML::Value << YAML::BeginMap << YAML::Key << "parameters"
        << YAML::Value << YAML::BeginSeq;
    for (const auto& p : fn.inputs) {
      out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << p.name;
      if (!p.required)
        out << YAML::Key << "default" << YAML::Value << YAML::DoubleQuoted
            << (p.data_type == DataType::String ? "" : "null");
      out << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;
  }
  if (!fn.outputs.empty()) {
    out << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap << YAML::Key << "parameters"
        << YAML::Value << YAML::BeginSeq;
    for (const auto& p : fn.outputs)
      out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << p.name << YAML::Key
          << "valueFrom" << YAML::Value << YAML::BeginMap << YAML::Key << "jsonPath" << YAML::Value
          << YAML::DoubleQuoted << "$." + p.name << YAML::EndMap << YAML::EndMap;
    out << YAML::EndSeq << YAML::EndMap;
  }
  out << YAML::Key << "http" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "method" << YAML::Value << "POST";
  out << YAML::Key << "url" << YAML::Value << fn.endpoint;
  out << YAML::Key << "headers" << YAML::Value << YAML::BeginSeq << YAML::BeginMap << YAML::Key
      << "name" << YAML::Value << "Content-Type" << YAML::Key << "value" << YAML::Value
      << "application/json" << YAML::EndMap << YAML::EndSeq;
  out << YAML::Key << "body" << YAML::Value << YAML::SingleQuoted << request_body(fn);
  out << YAML::EndMap;
  out << YAML::EndMap;
}

// ---- verification ----

struct TemplateInfo {
  std::set<std::string> inputs;
  std::set<std::string> required_inputs;
  std::set<std::string> outputs;
  YAML::Node node;
};

std::set<std::string> parameter_names(const YAML::Node& section, std::set<std::string>* required = nullptr) {
  std::set<std::string> names;
  if (!section || !section["parameters"]) return names;
  for (const auto& p : section["parameters"]) {
    auto name = p["name"].as<std::string>();
    names.insert(name);
    if (required && !p["default"] && !p["value"]) required->insert(name);
  }
  return names;
}

std::vector<std::string> expressions(const std::string& text) {
  static const std::regex pattern(R"(\{\{\s*([^{}]*?)\s*\}\})");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), pattern); it != std::sregex_iterator(); ++it)
    out.push_back((*it)[1].str());
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t pos; (pos = text.find(sep, start)) != std::string::npos; start = pos + 1)
    parts.push_back(text.substr(start, pos - start));
  parts.push_back(text.substr(start));
  return parts;
}

class ArgoChecker {
 public:
  explicit ArgoChecker(ValidationReport& report) : report_(report) {}

  void check(const YAML::Node& root) {
    if (!root.IsMap()) return fail(ViolationKind::DocumentSchema, "document", "not a mapping");
    if (!root["apiVersion"] || root["apiVersion"].as<std::string>() != kApiVersion)
      fail(ViolationKind::DocumentSchema, "apiVersion", "expected " + std::string(kApiVersion));
    if (!root["kind"] || root["kind"].as<std::string>() != "Workflow")
      fail(ViolationKind::DocumentSchema, "kind", "expected Workflow");
    auto spec = root["spec"];
    if (!spec || !spec.IsMap()) return fail(ViolationKind::DocumentSchema, "spec", "missing");
    if (spec["arguments"]) workflow_params_ = parameter_names(spec["arguments"]);
    auto templates = spec["templates"];
    if (!templates || !templates.IsSequence() || templates.size() == 0)
      return fail(ViolationKind::DocumentSchema, "spec.templates", "missing or empty");

    for (const auto& t : templates) {
      if (!t["name"]) {
        fail(ViolationKind::DocumentSchema, "spec.templates", "template without a name");
        continue;
      }
      auto name = t["name"].as<std::string>();
      TemplateInfo info;
      info.inputs = parameter_names(t["inputs"], &info.required_inputs);
      info.outputs = parameter_names(t["outputs"]);
      info.node = static_cast<const YAML::Node&>(t);
      if (!templates_.emplace(name, std::move(info)).second)
        fail(ViolationKind::DocumentSchema, "template " + name, "duplicate template name");
    }
    if (!spec["entrypoint"])
      fail(ViolationKind::DocumentSchema, "spec.entrypoint", "missing");
    else if (!templates_.count(spec["entrypoint"].as<std::string>()))
      fail(ViolationKind::DanglingReference, "spec.entrypoint",
           "names unknown template '" + spec["entrypoint"].as<std::string>() + "'");

    for (const auto& [name, info] : templates_) {
      if (info.node["dag"]) check_dag(name, info);
      else if (info.node["http"]) check_http(name, info);
    }
  }

 private:
  void fail(ViolationKind kind, std::string locus, std::string message) {
    report_.violations.push_back({kind, std::move(locus), std::move(message)});
  }

  void check_http(const std::string& name, const TemplateInfo& info) {
    auto http = info.node["http"];
    if (!http["url"] || http["url"].as<std::string>().empty())
      fail(ViolationKind::DocumentSchema, "template " + name, "http template without url");
    for (auto field : {"url", "body"}) {
      if (!http[field]) continue;
      for (const auto& expr : expressions(http[field].as<std::string>())) {
        auto parts = split(expr, '.');
        if (parts.size() == 3 && parts[0] == "inputs" && parts[1] == "parameters" &&
            !info.inputs.count(parts[2]))
          fail(ViolationKind::DanglingReference, "template " + name, "undeclared input '" + parts[2] + "'");
      }
    }
  }

  void check_dag(const std::string& name, const TemplateInfo& info) {
    auto tasks = info.node["dag"]["tasks"];
    if (!tasks || !tasks.IsSequence())
      return fail(ViolationKind::DocumentSchema, "template " + name, "dag without tasks");
    std::map<std::string, YAML::Node> by_name;
    for (const auto& task : tasks) {
      if (!task["name"]) {
        fail(ViolationKind::DocumentSchema, "template " + name, "task without a name");
        continue;
      }
      if (!by_name.emplace(task["name"].as<std::string>(), task).second)
        fail(ViolationKind::DocumentSchema, "task " + task["name"].as<std::string>(), "duplicate task name");
    }

    std::map<std::string, std::set<std::string>> deps;
    for (const auto& [task_name, task] : by_name) {
      auto& d = deps[task_name];
      if (task["dependencies"])
        for (const auto& dep : task["dependencies"]) {
          auto dep_name = dep.as<std::string>();
          if (!by_name.count(dep_name) || dep_name == task_name)
            fail(ViolationKind::DanglingReference, "task " + task_name,
                 "dependency on unknown task '" + dep_name + "'");
          else
            d.insert(dep_name);
        }
    }
    // Tasks each task transitively waits for; cycles show up as self-membership.
    std::map<std::string, std::set<std::string>> ancestors = deps;
    for (bool grew = true; grew;) {
      grew = false;
      for (auto& [t, anc] : ancestors) {
        auto before = anc.size();
        std::set<std::string> more;
        for (const auto& a : anc) more.insert(ancestors[a].begin(), ancestors[a].end());
        anc.insert(more.begin(), more.end());
        grew |= anc.size() != before;
      }
    }
    for (const auto& [t, anc] : ancestors)
      if (anc.count(t)) fail(ViolationKind::DocumentSchema, "task " + t, "dependency cycle");

    for (const auto& [task_name, task] : by_name) {
      auto locus = "task " + task_name;
      if (!task["template"]) {
        fail(ViolationKind::DocumentSchema, locus, "missing template");
        continue;
      }
      auto tmpl_name = task["template"].as<std::string>();
      auto tmpl = templates_.find(tmpl_name);
      if (tmpl == templates_.end()) {
        fail(ViolationKind::DanglingReference, locus, "unknown template '" + tmpl_name + "'");
        continue;
      }
      std::set<std::string> supplied;
      if (task["arguments"] && task["arguments"]["parameters"])
        for (const auto& arg : task["arguments"]["parameters"]) {
          auto arg_name = arg["name"].as<std::string>();
          supplied.insert(arg_name);
          if (!tmpl->second.inputs.count(arg_name))
            fail(ViolationKind::DanglingReference, locus,
                 "argument '" + arg_name + "' is not an input of " + tmpl_name);
          if (arg["value"]) check_value(locus, arg["value"].as<std::string>(), by_name, ancestors[task_name], info);
        }
      for (const auto& required : tmpl->second.required_inputs)
        if (!supplied.count(required))
          fail(ViolationKind::DocumentSchema, locus, "missing argument '" + required + "'");
    }
  }

  void check_value(const std::string& locus, const std::string& value,
                   const std::map<std::string, YAML::Node>& tasks, const std::set<std::string>& ancestors,
                   const TemplateInfo& dag_template) {
    for (const auto& expr : expressions(value)) {
      auto parts = split(expr, '.');
      if (parts.size() == 3 && parts[0] == "workflow" && parts[1] == "parameters") {
        if (!workflow_params_.count(parts[2]))
          fail(ViolationKind::DanglingReference, locus, "unknown workflow parameter '" + parts[2] + "'");
      } else if (parts.size() == 3 && parts[0] == "inputs" && parts[1] == "parameters") {
        if (!dag_template.inputs.count(parts[2]))
          fail(ViolationKind::DanglingReference, locus, "unknown input '" + parts[2] + "'");
      } else if (parts.size() == 5 && parts[0] == "tasks" && parts[2] == "outputs" && parts[3] == "parameters") {
        auto task = tasks.find(parts[1]);
        if (task == tasks.end()) {
          fail(ViolationKind::DanglingReference, locus, "reference to unknown task '" + parts[1] + "'");
          continue;
        }
        if (!ancestors.count(parts[1]))
          fail(ViolationKind::DanglingReference, locus, "reads '" + parts[1] + "' without depending on it");
        auto tmpl = task->second["template"] ? templates_.find(task->second["template"].as<std::string>())
                                             : templates_.end();
        if (tmpl != templates_.end() && !tmpl->second.outputs.count(parts[4]))
          fail(ViolationKind::DanglingReference, locus,
               "task '" + parts[1] + "' has no output '" + parts[4] + "'");
      } else if (parts[0] == "tasks" || parts[0] == "workflow" || parts[0] == "inputs") {
        fail(ViolationKind::DanglingReference, locus, "unresolvable reference '" + expr + "'");
      }
    }
  }

  ValidationReport& report_;
  std::set<std::string> workflow_params_;
  std::map<std::string, TemplateInfo> templates_;
};

}  // namespace

std::string argo_template_name(std::string_view function_id) {
  return "fn-" + dns_label(function_id);
}

CompiledWorkflow compile_argo(const WorkflowDAG& input) {
  auto report = validate_dag(input);
  if (!report.ok()) throw ValidationError("cannot compile invalid DAG", std::move(report));
  auto dag = canonicalize(input);
  auto templates = template_names(dag);

  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "apiVersion" << YAML::Value << std::string(kApiVersion);
  out << YAML::Key << "kind" << YAML::Value << "Workflow";
  out << YAML::Key << "metadata" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "generateName" << YAML::Value << dns_label(dag.dag_id) + "-";
  out << YAML::Key << "annotations" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "faasflow.io/dag-id" << YAML::Value << dag.dag_id;
  out << YAML::Key << "faasflow.io/query" << YAML::Value << YAML::DoubleQuoted << dag.query;
  out << YAML::EndMap << YAML::EndMap;

  out << YAML::Key << "spec" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "entrypoint" << YAML::Value << std::string(kEntrypoint);
  if (!dag.start.user_inputs.empty()) {
    out << YAML::Key << "arguments" << YAML::Value << YAML::BeginMap << YAML::Key << "parameters"
        << YAML::Value << YAML::BeginSeq;
    for (const auto& p : dag.start.user_inputs)
      out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << p.name << YAML::EndMap;
    out << YAML::EndSeq << YAML::EndMap;
  }
  out << YAML::Key << "templates" << YAML::Value << YAML::BeginSeq;

  out << YAML::BeginMap << YAML::Key << "name" << YAML::Value << std::string(kEntrypoint);
  out << YAML::Key << "dag" << YAML::Value << YAML::BeginMap << YAML::Key << "tasks" << YAML::Value;
  if (dag.nodes.empty()) out << YAML::Flow;
  out << YAML::BeginSeq;
  for (const auto& node : dag.nodes) emit_task(out, node, dag, templates);
  out << YAML::EndSeq << YAML::EndMap << YAML::EndMap;

  std::map<std::string, const FunctionSpec*> functions;
  for (const auto& n : dag.nodes) functions.emplace(templates.at(n.function.id), &n.function);
  for (const auto& [name, fn] : functions) emit_function_template(out, *fn, name);

  out << YAML::EndSeq << YAML::EndMap << YAML::EndMap;
  if (!out.good()) throw CompileError("YAML emitter failed: " + out.GetLastError());

  CompiledWorkflow compiled;
  compiled.target = CompileTarget::ArgoYaml;
  compiled.document = std::string(out.c_str()) + "\n";
  compiled.dag_id = dag.dag_id;
  for (const auto& p : dag.start.user_inputs) compiled.entry_params.push_back(p.name);
  return compiled;
}

ValidationReport verify_argo(std::string_view document) {
  ValidationReport report;
  YAML::Node root;
  try {
    root = YAML::Load(std::string(document));
  } catch (const YAML::ParserException& e) {
    report.violations.push_back(
        {ViolationKind::DocumentParse, "line " + std::to_string(e.mark.line + 1), e.msg});
    return report;
  }
  try {
    ArgoChecker(report).check(root);
  } catch (const YAML::Exception& e) {
    auto line = e.mark.is_null() ? std::string("document") : "line " + std::to_string(e.mark.line + 1);
    report.violations.push_back({ViolationKind::DocumentSchema, line, e.msg});
  }
  return report;
}

}  // namespace faasflow
