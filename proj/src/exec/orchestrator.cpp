#include "faasflow/exec/orchestrator.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include "faasflow/core/serialize.hpp"

namespace faasflow {

namespace {

std::string invocation_name(std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "inv-%06llu", static_cast<unsigned long long>(n));
  return buf;
}

}  // namespace

std::string_view to_string(NodeStatus status) {
  switch (status) {
    case NodeStatus::Succeeded: return "succeeded";
    case NodeStatus::Failed: return "failed";
    case NodeStatus::Skipped: return "skipped";
  }
  return "unknown";
}

std::string_view to_string(RunStatus status) {
  return status == RunStatus::Succeeded ? "succeeded" : "failed";
}

const NodeRecord* ExecutionTrace::find(std::string_view node_id) const {
  auto it = std::find_if(nodes.begin(), nodes.end(), [&](const NodeRecord& r) { return r.node_id == node_id; });
  return it == nodes.end() ? nullptr : &*it;
}

nlohmann::json trace_to_json(const ExecutionTrace& trace) {
  auto micros = [&](std::chrono::steady_clock::time_point t) {
    return std::chrono::duration_cast<std::chrono::microseconds>(t - trace.started).count();
  };
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& r : trace.nodes) {
    nlohmann::json node = {{"node_id", r.node_id},
                           {"status", std::string(to_string(r.status))},
                           {"inputs", r.inputs},
                           {"outputs", r.outputs}};
    if (r.status != NodeStatus::Skipped) {
      node["start_us"] = micros(r.start);
      node["end_us"] = micros(r.end);
    }
    if (!r.error.empty()) node["error"] = r.error;
    nodes.push_back(std::move(node));
  }
  return {{"invocation_id", trace.invocation_id},
          {"workflow_id", trace.workflow_id},
          {"status", std::string(to_string(trace.status))},
          {"outputs", trace.outputs},
          {"nodes", nodes}};
}

Orchestrator::Orchestrator() : Orchestrator(Options{}) {}

Orchestrator::Orchestrator(Options options) : options_(std::move(options)) {
  if (!options_.caller) {
    auto retry = options_.retry;
    options_.caller = [retry](const LocalStep& step, const nlohmann::json& args) {
      return call_function(step.endpoint, args, retry);
    };
  }
  if (options_.state_dir && std::filesystem::is_directory(*options_.state_dir)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(*options_.state_dir))
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      std::ifstream in(file);
      std::stringstream text;
      text << in.rdbuf();
      add({CompileTarget::LocalJson, text.str(), "", {}}, false);
    }
  }
}

WorkflowRegistration Orchestrator::register_workflow(const CompiledWorkflow& compiled) {
  return add(compiled, true);
}

WorkflowRegistration Orchestrator::add(const CompiledWorkflow& compiled, bool persist) {
  if (compiled.target != CompileTarget::LocalJson) throw WrongTargetError();
  auto report = verify_compiled(compiled);
  if (!report.ok()) throw InvalidWorkflowError(std::move(report));

  WorkflowRegistration reg;
  reg.plan = parse_local_plan(compiled.document);
  reg.workflow_id = reg.plan.dag_id;
  if (!is_identifier(reg.workflow_id))
  {
    ValidationReport bad_id;
    bad_id.violations.push_back(
        {ViolationKind::DocumentSchema, "dag_id", "'" + reg.workflow_id + "' is not a usable workflow id"});
    throw InvalidWorkflowError(std::move(bad_id));
  }
  reg.compiled = compiled;
  reg.compiled.dag_id = reg.workflow_id;
  reg.compiled.entry_params.clear();
  for (const auto& p : reg.plan.entry_params) reg.compiled.entry_params.push_back(p.name);
  reg.endpoint_path = "/workflows/" + reg.workflow_id + "/invoke";
  reg.created_at = std::chrono::system_clock::now();

  {
    std::unique_lock lock(workflows_mutex_);
    if (workflows_.count(reg.workflow_id)) throw DuplicateIdError(reg.workflow_id);
    if (persist && options_.state_dir) {
      std::filesystem::create_directories(*options_.state_dir);
      std::ofstream(*options_.state_dir / (reg.workflow_id + ".json")) << compiled.document;
    }
    workflows_.emplace(reg.workflow_id, reg);
  }
  if (options_.on_register) options_.on_register(reg);
  return reg;
}

std::optional<WorkflowRegistration> Orchestrator::find_workflow(const std::string& workflow_id) const {
  std::shared_lock lock(workflows_mutex_);
  auto it = workflows_.find(workflow_id);
  if (it == workflows_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Orchestrator::workflow_ids() const {
  std::shared_lock lock(workflows_mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, reg] : workflows_) ids.push_back(id);
  return ids;
}

std::optional<ExecutionTrace> Orchestrator::find_invocation(const std::string& invocation_id) const {
  std::lock_guard lock(traces_mutex_);
  auto it = traces_.find(invocation_id);
  if (it == traces_.end()) return std::nullopt;
  return it->second;
}

ExecutionTrace Orchestrator::invoke(const std::string& workflow_id, const nlohmann::json& inputs) {
  auto reg = find_workflow(workflow_id);
  if (!reg) throw NotFoundError("unknown workflow '" + workflow_id + "'");
  if (!inputs.is_object()) throw Error("workflow inputs must be a JSON object");
  const auto& plan = reg->plan;
  for (const auto& p : plan.entry_params)
    if (p.required && !inputs.contains(p.name)) throw MissingInputError(p.name);

  ExecutionTrace trace;
  trace.invocation_id = invocation_name(next_invocation_++);
  trace.workflow_id = workflow_id;
  trace.started = std::chrono::steady_clock::now();

  std::map<std::string, NodeRecord> records;
  for (const auto& level : plan.levels) {
    std::vector<std::pair<const LocalStep*, std::future<NodeRecord>>> running;
    for (const auto& id : level) {
      const auto* step = plan.find_step(id);
      NodeRecord record;
      record.node_id = id;
      bool ready = std::all_of(step->after.begin(), step->after.end(), [&](const std::string& dep) {
        return records.at(dep).status == NodeStatus::Succeeded;
      });
      if (!ready) {
        record.error = "skipped: an upstream step did not succeed";
        records[id] = std::move(record);
        continue;
      }
      for (const auto& in : step->inputs) {
        if (in.from_user()) {
          if (inputs.contains(in.source)) record.inputs[in.param] = inputs.at(in.source);
        } else {
          record.inputs[in.param] = records.at(in.source_node).outputs.at(in.source);
        }
      }
      running.emplace_back(step, std::async(std::launch::async, [this, step, record]() mutable {
        record.start = std::chrono::steady_clock::now();
        try {
          auto result = options_.caller(*step, record.inputs);
          for (const auto& out : step->outputs) {
            if (!result.contains(out)) throw Error("response lacks declared output '" + out + "'");
            record.outputs[out] = result.at(out);
          }
          record.status = NodeStatus::Succeeded;
        } catch (const std::exception& e) {
          record.status = NodeStatus::Failed;
          record.error = e.what();
        }
        record.end = std::chrono::steady_clock::now();
        return record;
      }));
    }
    for (auto& [step, future] : running) records[step->node_id] = future.get();
  }

  std::set<std::string> has_dependents;
  for (const auto& s : plan.steps) has_dependents.insert(s.after.begin(), s.after.end());
  for (const auto& s : plan.steps) {
    auto& record = records.at(s.node_id);
    if (record.status != NodeStatus::Succeeded) trace.status = RunStatus::Failed;
    if (!has_dependents.count(s.node_id) && record.status == NodeStatus::Succeeded)
      for (const auto& [name, value] : record.outputs.items()) trace.outputs[s.node_id + "." + name] = value;
    trace.nodes.push_back(std::move(record));
  }

  std::lock_guard lock(traces_mutex_);
  traces_[trace.invocation_id] = trace;
  return trace;
}

}  // namespace faasflow
