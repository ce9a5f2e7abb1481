// Builds an evaluation dataset from a compact source file: truth DAGs from
// step lists, transcripts recorded from TruthBackend, and the ablation
// replies with their authored mistakes. Re-runs the evaluation at the end.
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "faasflow/compile/compiler.hpp"
#include "faasflow/core/serialize.hpp"
#include "faasflow/core/validate.hpp"
#include "faasflow/eval/harness.hpp"
#include "faasflow/eval/truth_backend.hpp"

using namespace faasflow;
using namespace faasflow::eval;
namespace fs = std::filesystem;

namespace {

struct SourceCase {
  EvalCase c;
  Json ablation;
};

std::pair<std::string, std::string> split_ref(const std::string& ref) {
  auto dot = ref.find('.');
  if (dot == std::string::npos) throw Error("bad output reference '" + ref + "'");
  return {ref.substr(0, dot), ref.substr(dot + 1)};
}

void add_user_input(WorkflowDAG& dag, const ParameterSpec& p) {
  if (!dag.start.find_input(p.name)) dag.start.user_inputs.push_back(p);
}

/// Mirrors the generator's wiring: listed inputs get one binding each; a
/// step with none waits for the previous step.
WorkflowDAG build_truth(const Json& src, const std::map<std::string, FunctionSpec>& functions) {
  WorkflowDAG dag;
  dag.dag_id = src.at("case_id");
  dag.query = src.at("query");
  const auto& steps = src.at("steps");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& step = steps[i];
    auto id = "n" + std::to_string(i);
    auto fn = functions.at(step.at("function").get<std::string>());
    bool incoming = false;
    for (const auto& [param, from] : step.at("inputs").items()) {
      const auto* spec = fn.find_input(param);
      if (!spec) throw Error(dag.dag_id + ": " + fn.id + " has no input '" + param + "'");
      if (from == "input") {
        add_user_input(dag, *spec);
        dag.edges.push_back({std::string(kStartNodeId), id, ParamBinding{param, std::nullopt}});
      } else {
        auto [node, output] = split_ref(from);
        dag.edges.push_back({node, id, ParamBinding{param, output}});
      }
      incoming = true;
    }
    if (!incoming) dag.edges.push_back({i == 0 ? std::string(kStartNodeId) : "n" + std::to_string(i - 1), id, std::nullopt});
    dag.nodes.push_back({id, {i, step.at("task")}, fn});
  }
  if (auto report = validate_dag(dag); !report.ok()) throw ValidationError(dag.dag_id + ": truth", report);
  return dag;
}

DataFlowEdge& binding_edge(WorkflowDAG& dag, const std::string& node, const std::string& param) {
  for (auto& e : dag.edges)
    if (e.target == node && e.binding && e.binding->target_param == param) return e;
  throw Error("no binding for " + node + "." + param);
}

std::string break_indentation(const std::string& doc) {
  static const std::regex line(R"((^|\n)( +)template: fn-)");
  std::smatch m;
  if (!std::regex_search(doc, m, line)) throw Error("nothing to break");
  auto at = static_cast<std::size_t>(m.position(2));
  return doc.substr(0, at) + doc.substr(at + 2);
}

std::string drop_dependencies(const std::string& doc, const std::string& node) {
  std::istringstream in(doc);
  std::string out, text;
  bool in_task = false, dropped = false;
  while (std::getline(in, text)) {
    if (text.find("- name: ") != std::string::npos) in_task = text.substr(text.find("- name: ") + 8) == node;
    if (in_task && !dropped && text.find("dependencies:") != std::string::npos) {
      dropped = true;
      continue;
    }
    out += text + "\n";
  }
  if (!dropped) throw Error("task " + node + " has no dependencies");
  return out;
}

/// The manifest a mistaken model would write for `truth`.
std::string mistaken_manifest(WorkflowDAG dag, const Json& mistakes) {
  std::vector<const Json*> text_level;
  for (const auto& m : mistakes) {
    auto kind = m.at("kind").get<std::string>();
    if (kind == "input_instead_of_output") {
      auto& e = binding_edge(dag, m.at("node"), m.at("param"));
      const auto* spec = dag.find_node(e.target)->function.find_input(e.binding->target_param);
      e.source = std::string(kStartNodeId);
      e.binding->source_param.reset();
      add_user_input(dag, *spec);
    } else if (kind == "wrong_source") {
      auto& e = binding_edge(dag, m.at("node"), m.at("param"));
      auto [node, output] = split_ref(m.at("source"));
      e.source = node;
      e.binding->source_param = output;
    } else {
      text_level.push_back(&m);
    }
  }
  // Start-node inputs nobody reads any more would not be declared.
  std::set<std::string> read;
  for (const auto& e : dag.edges)
    if (e.from_start() && e.binding) read.insert(e.binding->target_param);
  std::erase_if(dag.start.user_inputs, [&](const ParameterSpec& p) { return !read.count(p.name); });
  // A node whose bindings all moved to the start node still needs one.
  for (const auto& n : dag.nodes) {
    bool incoming = std::any_of(dag.edges.begin(), dag.edges.end(),
                                [&](const DataFlowEdge& e) { return e.target == n.node_id; });
    if (!incoming) dag.edges.push_back({std::string(kStartNodeId), n.node_id, std::nullopt});
  }

  auto doc = compile_argo(dag).document;
  for (const auto* m : text_level) {
    auto kind = m->at("kind").get<std::string>();
    if (kind == "break_yaml") doc = break_indentation(doc);
    else if (kind == "drop_dependency") doc = drop_dependencies(doc, m->at("node"));
    else throw Error("unknown mistake kind '" + kind + "'");
  }
  return doc;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Author an evaluation dataset from a source file"};
  std::string source_path, out_dir;
  std::size_t repetitions = 5;
  app.add_option("source", source_path, "Source file")->required()->check(CLI::ExistingFile);
  app.add_option("output", out_dir, "Dataset directory to (re)write")->required();
  app.add_option("--repetitions", repetitions, "Repetitions for the check run");
  CLI11_PARSE(app, argc, argv);

  try {
    auto source = parse_json(read_file(source_path), source_path);
    fs::path dir(out_dir);
    fs::remove_all(dir / "cases");
    fs::remove_all(dir / "transcripts");

    Dataset ds;
    ds.name = source.at("name");
    ds.note = source.value("note", "");
    ds.directory = dir;
    std::map<std::string, FunctionSpec> by_id;
    for (const auto& f : source.at("functions")) {
      ds.functions.push_back(function_from_json(f));
      by_id.emplace(ds.functions.back().id, ds.functions.back());
    }

    std::map<std::string, Json> ablations;
    for (const auto& src : source.at("cases")) {
      EvalCase c;
      c.case_id = src.at("case_id");
      c.complexity = *parse_complexity(src.at("complexity").get<std::string>());
      c.query.text = src.at("query");
      if (src.contains("user_inputs")) c.query.user_inputs = src.at("user_inputs");
      c.truth = build_truth(src, by_id);
      c.transcript = dir / "transcripts" / (c.case_id + ".json");
      ablations[c.case_id] = src.value("ablation", Json::object());
      ds.cases.push_back(std::move(c));
    }

    std::mutex mutex;
    std::map<std::string, std::vector<std::shared_ptr<llm::RecordingBackend>>> recorders;
    EvalOptions record;
    record.repetitions = 1;
    record.backend = [&](const EvalCase& c, Setting, std::size_t) -> std::shared_ptr<llm::LlmBackend> {
      const auto& mistakes = ablations.at(c.case_id);
      auto composer = [mistakes](llm::TemplateId id, const WorkflowDAG& truth) {
        auto key = id == llm::TemplateId::ComposeArgo ? "ae-wo-c" : "ae-wo-wgc";
        auto doc = mistaken_manifest(truth, mistakes.value(key, Json::array()));
        return "```yaml\n" + doc + "```\n";
      };
      auto rec = std::make_shared<llm::RecordingBackend>(std::make_shared<TruthBackend>(c.truth, composer));
      std::lock_guard lock(mutex);
      recorders[c.case_id].push_back(rec);
      return rec;
    };
    auto recorded = run_eval(ds, record);
    for (const auto& g : recorded.generations)
      if (!g.error.empty() && !g.syntactic_failure)
        throw Error(g.case_id + " (" + std::string(slug(g.setting)) + "): " + g.error);

    write_file(dir / "dataset.json", dump_pretty({{"name", ds.name}, {"note", ds.note}}));
    Json functions = Json::array();
    for (const auto& f : ds.functions) functions.push_back(function_to_json(f));
    write_file(dir / "functions.json", dump_pretty(functions));
    for (const auto& c : ds.cases) {
      write_file(dir / "cases" / (c.case_id + ".json"), dump_pretty(case_to_json(c, dir)));
      llm::ScriptedBackend::Transcript merged;
      for (const auto& rec : recorders[c.case_id])
        for (const auto& [key, replies] : rec->transcript()) merged.emplace(key, replies);
      fs::create_directories(c.transcript.parent_path());
      llm::ScriptedBackend::save_transcript(merged, c.transcript);
    }

    auto loaded = load_dataset(dir);
    for (const auto& p : loaded.problems) std::cerr << "problem: " << p.source << ": " << p.message << "\n";
    EvalOptions check;
    check.repetitions = repetitions;
    auto report = run_eval(loaded, check);
    std::cout << render_report(report);
    for (const auto& g : report.generations)
      if (g.setting == Setting::Full && g.scores.overall != 1.0) {
        std::cerr << "full pipeline scored " << g.scores.overall << " on " << g.case_id << ": " << g.error << "\n";
        return 1;
      }
    return loaded.problems.empty() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
