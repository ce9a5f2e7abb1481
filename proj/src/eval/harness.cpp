#include "faasflow/eval/harness.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "faasflow/compile/argo_import.hpp"
#include "faasflow/compile/compiler.hpp"
#include "faasflow/core/serialize.hpp"
#include "faasflow/pipeline/workflow_generator.hpp"

namespace faasflow::eval {

namespace fs = std::filesystem;

namespace {

std::string param_list(const std::vector<ParameterSpec>& params, bool mark_optional) {
  std::string out;
  for (const auto& p : params) {
    if (!out.empty()) out += ", ";
    out += p.name + " (" + std::string(to_string(p.data_type));
    if (mark_optional && !p.required) out += ", optional";
    out += ")";
  }
  return out.empty() ? "none" : out;
}

std::string compose(const llm::LlmGateway& gateway, llm::TemplateId id, llm::Bindings bindings) {
  llm::PromptRequest request;
  request.template_id = id;
  request.bindings = std::move(bindings);
  return gateway.complete(request).parsed.get<std::string>();
}

struct Work {
  Setting setting;
  const EvalCase* c;
  std::size_t repetition;
};

GenerationRecord generate_one(const Work& work, const Dataset& dataset, const FunctionRepository& repo,
                              const EvalOptions& options) {
  const auto& c = *work.c;
  GenerationRecord record{c.case_id, c.complexity, work.setting, work.repetition, {}, false, {}, std::nullopt};

  CompiledWorkflow compiled;
  compiled.target = CompileTarget::ArgoYaml;
  compiled.dag_id = c.case_id;
  try {
    llm::LlmGateway gateway(options.backend(c, work.setting, work.repetition));
    FuncIdentifier identifier(repo, gateway, options.top_k);
    WorkflowGenerator generator(gateway);
    switch (work.setting) {
      case Setting::Full:
        compiled = compile_argo(generate_workflow(identifier, generator, c.query, c.case_id));
        break;
      case Setting::WithoutCompiler: {
        auto dag = generate_workflow(identifier, generator, c.query, c.case_id);
        compiled.document = compose(gateway, llm::TemplateId::ComposeArgo,
                                    {{"query", c.query.text}, {"dag", canonical_serialize(dag)}});
        break;
      }
      case Setting::WithoutGeneratorAndCompiler:
        compiled.document = compose(gateway, llm::TemplateId::ComposeWorkflow,
                                    {{"query", c.query.text}, {"nodes", render_steps(identifier.identify(c.query))}});
        break;
    }
  } catch (const Error& e) {
    record.error = e.what();
    return record;
  }

  if (options.tamper) options.tamper(c, work.setting, work.repetition, compiled.document);
  if (options.output_dir) {
    auto dir = *options.output_dir / std::string(slug(work.setting)) / c.case_id;
    fs::create_directories(dir);
    auto path = dir / ("rep-" + std::to_string(work.repetition + 1) + ".yaml");
    std::ofstream(path, std::ios::binary) << compiled.document;
    record.document_path = path;
  }

  auto report = verify_compiled(compiled);
  if (!report.ok()) {
    record.syntactic_failure = true;
    record.error = report.to_string();
    return record;
  }
  try {
    auto pred = import_argo(compiled.document, dataset.functions);
    record.scores = score_all(pred, c.truth, options.mode, options.weights);
  } catch (const Error& e) {
    record.syntactic_failure = true;
    record.error = e.what();
    record.scores = {};
  }
  return record;
}

AggregateRow aggregate(const EvalReport& report, Setting setting, std::optional<Complexity> complexity,
                       std::size_t repetitions, double confidence) {
  AggregateRow row;
  row.setting = setting;
  row.complexity = complexity;
  std::vector<double> sel(repetitions), ord(repetitions), dep(repetitions), all(repetitions);
  std::vector<std::size_t> count(repetitions);
  std::set<std::string> cases;
  for (const auto& g : report.generations) {
    if (g.setting != setting || (complexity && g.complexity != *complexity)) continue;
    cases.insert(g.case_id);
    sel[g.repetition] += g.scores.selection;
    ord[g.repetition] += g.scores.ordering;
    dep[g.repetition] += g.scores.dependency;
    all[g.repetition] += g.scores.overall;
    ++count[g.repetition];
    row.syntactic_failures += g.syntactic_failure;
    row.generation_failures += !g.syntactic_failure && !g.error.empty();
  }
  row.cases = cases.size();
  if (row.cases == 0) return row;
  for (std::size_t r = 0; r < repetitions; ++r) {
    sel[r] /= count[r];
    ord[r] /= count[r];
    dep[r] /= count[r];
    all[r] /= count[r];
  }
  row.selection = t_interval(sel, confidence);
  row.ordering = t_interval(ord, confidence);
  row.dependency = t_interval(dep, confidence);
  row.overall = t_interval(all, confidence);
  return row;
}

}  // namespace

std::string_view to_string(Setting s) {
  switch (s) {
    case Setting::Full: return "AE";
    case Setting::WithoutCompiler: return "AE w/o C";
    case Setting::WithoutGeneratorAndCompiler: return "AE w/o WG&C";
  }
  return "?";
}

std::string_view slug(Setting s) {
  switch (s) {
    case Setting::Full: return "ae";
    case Setting::WithoutCompiler: return "ae-wo-c";
    case Setting::WithoutGeneratorAndCompiler: return "ae-wo-wgc";
  }
  return "?";
}

std::optional<Setting> parse_setting(std::string_view text) {
  for (auto s : kAllSettings)
    if (text == slug(s) || text == to_string(s)) return s;
  return std::nullopt;
}

BackendFactory scripted_backends() {
  return [](const EvalCase& c, Setting, std::size_t) -> std::shared_ptr<llm::LlmBackend> {
    if (c.transcript.empty()) throw DatasetError("case '" + c.case_id + "' has no transcript");
    return llm::ScriptedBackend::from_file(c.transcript);
  };
}

std::string render_steps(const std::vector<WorkflowNode>& nodes) {
  std::string out;
  for (const auto& n : nodes) {
    out += "- " + n.node_id + ": " + n.subtask.text + "\n";
    out += "  function: " + n.function.id + " (POST " + n.function.endpoint + ")\n";
    out += "  inputs: " + param_list(n.function.inputs, true) + "\n";
    out += "  outputs: " + param_list(n.function.outputs, false) + "\n";
  }
  return out;
}

Interval t_interval(const std::vector<double>& samples, double confidence) {
  Interval out;
  out.samples = samples.size();
  if (samples.empty()) {
    out.half_width = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double n = static_cast<double>(samples.size());
  for (double x : samples) out.mean += x;
  out.mean /= n;
  if (samples.size() < 2) {
    out.half_width = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double ss = 0.0;
  for (double x : samples) ss += (x - out.mean) * (x - out.mean);
  double sd = std::sqrt(ss / (n - 1));
  boost::math::students_t dist(n - 1);
  out.half_width = boost::math::quantile(dist, 0.5 + confidence / 2) * sd / std::sqrt(n);
  return out;
}

const AggregateRow* EvalReport::row(Setting s, std::optional<Complexity> c) const {
  for (const auto& r : rows)
    if (r.setting == s && r.complexity == c) return &r;
  return nullptr;
}

std::vector<const GenerationRecord*> EvalReport::records(Setting s, std::string_view case_id) const {
  std::vector<const GenerationRecord*> out;
  for (const auto& g : generations)
    if (g.setting == s && g.case_id == case_id) out.push_back(&g);
  return out;
}

EvalReport run_eval(const Dataset& dataset, const EvalOptions& options) {
  if (options.repetitions == 0) throw std::invalid_argument("repetitions must be at least 1");
  EvalReport report;
  report.dataset = dataset.name;
  report.note = dataset.note;
  report.repetitions = options.repetitions;
  report.confidence = options.confidence;
  report.mode = options.mode;
  report.weights = options.weights;
  report.problems = dataset.problems;

  FunctionRepository repo(options.embedder);
  repo.register_functions(dataset.functions);

  std::vector<Work> work;
  for (auto s : options.settings)
    for (const auto& c : dataset.cases)
      for (std::size_t r = 0; r < options.repetitions; ++r) work.push_back({s, &c, r});

  report.generations.resize(work.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < work.size();)
      report.generations[i] = generate_one(work[i], dataset, repo, options);
  };
  std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, work.size()));
  std::vector<std::thread> threads;
  for (std::size_t j = 1; j < jobs; ++j) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  for (const auto& g : report.generations) report.syntactic_failures += g.syntactic_failure;
  for (auto s : options.settings) {
    for (auto c : {Complexity::Easy, Complexity::Intermediate, Complexity::Hard})
      if (auto row = aggregate(report, s, c, options.repetitions, options.confidence); row.cases > 0)
        report.rows.push_back(row);
    report.rows.push_back(aggregate(report, s, std::nullopt, options.repetitions, options.confidence));
  }
  return report;
}

}  // namespace faasflow::eval
