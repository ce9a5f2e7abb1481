#include "faasflow/cli/cli.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

#include <CLI11.hpp>

#include "faasflow/compile/local_plan.hpp"
#include "faasflow/core/serialize.hpp"
#include "faasflow/core/validate.hpp"
#include "faasflow/eval/harness.hpp"
#include "faasflow/exec/orchestrator.hpp"
#include "faasflow/exec/servers.hpp"
#include "faasflow/net/http.hpp"
#include "faasflow/pipeline/workflow_generator.hpp"

namespace faasflow::cli {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  if (!file) throw UsageError("cannot write " + path.string());
  file << text;
}

std::string as_text(const Json& value, const std::string& key) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number()) return value.dump();
  throw UsageError("config '" + key + "' must be a string");
}

std::size_t as_count(const Json& value, const std::string& key) {
  if (value.is_number_integer()) {
    if (value.get<long long>() < 0) throw UsageError("'" + key + "' must not be negative");
    return value.get<std::size_t>();
  }
  auto text = as_text(value, key);
  std::size_t used = 0;
  long long n = 0;
  try {
    n = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.empty() || n < 0) throw UsageError("'" + key + "' must be a non-negative integer");
  return static_cast<std::size_t>(n);
}

eval::Weights as_weights(const Json& value) {
  std::vector<double> parts;
  if (value.is_array()) {
    for (const auto& v : value) {
      if (!v.is_number()) throw UsageError("'weights' must hold numbers");
      parts.push_back(v.get<double>());
    }
  } else {
    std::stringstream text(as_text(value, "weights"));
    for (std::string item; std::getline(text, item, ',');) {
      try {
        parts.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw UsageError("'weights' must be three comma-separated numbers");
      }
    }
  }
  if (parts.size() != 3) throw UsageError("'weights' needs exactly three values (selection, ordering, dependency)");
  return {parts[0], parts[1], parts[2]};
}

void apply_layer(CliConfig& c, const Json& layer) {
  if (!layer.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, value] : layer.items()) {
    if (key == "repo") c.repo = as_text(value, key);
    else if (key == "llm") c.llm = as_text(value, key);
    else if (key == "llm_base_url") c.llm_base_url = as_text(value, key);
    else if (key == "llm_model") c.llm_model = as_text(value, key);
    else if (key == "llm_api_key") c.llm_api_key = as_text(value, key);
    else if (key == "embedding") c.embedding = as_text(value, key);
    else if (key == "embedding_base_url") c.embedding_base_url = as_text(value, key);
    else if (key == "embedding_model") c.embedding_model = as_text(value, key);
    else if (key == "embedding_dimension") c.embedding_dimension = as_count(value, key);
    else if (key == "embedding_api_key") c.embedding_api_key = as_text(value, key);
    else if (key == "k") c.k = as_count(value, key);
    else if (key == "target") {
      auto text = as_text(value, key);
      auto target = parse_compile_target(text);
      if (!target) throw UsageError("unknown target '" + text + "' (expected argo or local)");
      c.target = *target;
    } else if (key == "listen") c.listen = as_text(value, key);
    else if (key == "weights") c.weights = as_weights(value);
    else if (key == "state_dir") c.state_dir = as_text(value, key);
    else throw UsageError("unknown config key '" + key + "'");
  }
}

std::pair<std::string, int> split_listen(const std::string& listen) {
  auto colon = listen.rfind(':');
  if (colon == std::string::npos || colon == 0) throw UsageError("listen address must be host:port");
  auto port = as_count(listen.substr(colon + 1), "listen port");
  if (port > 65535) throw UsageError("listen port out of range");
  return {listen.substr(0, colon), static_cast<int>(port)};
}

std::shared_ptr<const EmbeddingProvider> make_embedder(const CliConfig& c) {
  if (c.embedding == "http")
    return std::make_shared<HttpEmbedder>(HttpEmbedder::Options{
        c.embedding_base_url, c.embedding_model, c.embedding_api_key, c.embedding_dimension, std::chrono::seconds(10)});
  return std::make_shared<TokenHashEmbedder>();
}

std::shared_ptr<llm::LlmBackend> make_backend(const CliConfig& c) {
  if (c.llm.rfind("scripted:", 0) == 0) return llm::ScriptedBackend::from_file(c.llm.substr(9));
  return std::make_shared<llm::RemoteBackend>(
      llm::RemoteBackend::Options{c.llm_base_url, c.llm_model, c.llm_api_key, std::chrono::seconds(60)});
}

std::unique_ptr<FunctionRepository> open_repo(const CliConfig& c) {
  return FunctionRepository::load(c.repo, make_embedder(c));
}

/// "--input name=value" pairs (values that parse as JSON stay typed) merged
/// over an "--inputs" object.
Json parse_inputs(const std::vector<std::string>& pairs, const std::string& object) {
  Json inputs = Json::object();
  if (!object.empty()) {
    inputs = parse_json(object, "--inputs");
    if (!inputs.is_object()) throw UsageError("--inputs must be a JSON object");
  }
  for (const auto& pair : pairs) {
    auto eq = pair.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--input expects name=value, got '" + pair + "'");
    auto raw = pair.substr(eq + 1);
    auto value = Json::parse(raw, nullptr, false);
    inputs[pair.substr(0, eq)] = value.is_discarded() ? Json(raw) : value;
  }
  return inputs;
}

/// A compiled local-json document, or a canonical DAG compiled on the fly.
CompiledWorkflow load_runnable(const fs::path& path, const CliConfig& c) {
  auto text = read_file(path);
  auto doc = parse_json(text, path.string());
  if (doc.is_object() && doc.value("format", "") == kLocalFormat) {
    CompiledWorkflow compiled;
    compiled.target = CompileTarget::LocalJson;
    compiled.document = text;
    compiled.dag_id = doc.value("dag_id", "");
    return compiled;
  }
  auto repo = open_repo(c);
  return compile_local(dag_from_json(doc, repo->resolver()));
}

std::string pad(const std::string& text, std::size_t width) {
  return text.size() >= width ? text : text + std::string(width - text.size(), ' ');
}

// ---- commands ----

int repo_add(const CliConfig& c, const std::vector<std::string>& files, std::ostream& out, std::ostream& err) {
  auto repo = open_repo(c);
  std::vector<FunctionSpec> specs;
  std::size_t rejected = 0;
  for (const auto& file : files) {
    try {
      for (auto& fn : load_function_file(file)) {
        auto problems = check_function_spec(fn);
        if (problems.empty()) {
          specs.push_back(std::move(fn));
          continue;
        }
        ++rejected;
        for (const auto& p : problems) err << file << ": " << (fn.id.empty() ? "<no id>" : fn.id) << ": " << p << "\n";
      }
    } catch (const ParseError& e) {
      ++rejected;
      err << file << ": " << e.what() << "\n";
    }
  }
  if (rejected > 0) throw UsageError(std::to_string(rejected) + " invalid spec(s); nothing registered");
  repo->register_functions(specs);
  repo->save(c.repo);
  out << "registered " << specs.size() << (specs.size() == 1 ? " function" : " functions") << "\n";
  return kSuccess;
}

int repo_list(const CliConfig& c, std::ostream& out) {
  auto functions = open_repo(c)->list();
  std::size_t id_w = 2, name_w = 4;
  for (const auto& f : functions) {
    id_w = std::max(id_w, f.id.size());
    name_w = std::max(name_w, f.name.size());
  }
  out << pad("ID", id_w + 2) << pad("NAME", name_w + 2) << "DESCRIPTION\n";
  for (const auto& f : functions) out << pad(f.id, id_w + 2) << pad(f.name, name_w + 2) << f.description << "\n";
  return kSuccess;
}

int repo_show(const CliConfig& c, const std::string& id, std::ostream& out) {
  auto fn = open_repo(c)->find(id);
  if (!fn) throw NotFoundError("unknown function '" + id + "'");
  out << dump_pretty(function_to_json(*fn));
  return kSuccess;
}

int generate(const CliConfig& c, const std::string& query, const Json& inputs, const std::string& dag_id,
             const std::string& output, std::ostream& out) {
  auto repo = open_repo(c);
  if (repo->size() == 0)
    throw UsageError("the function repository at " + c.repo.string() +
                     " is empty; register functions first with 'faasflow repo add <spec.json>'");
  llm::LlmGateway gateway(make_backend(c));
  FuncIdentifier identifier(*repo, gateway, c.k);
  WorkflowGenerator generator(gateway);
  UserQuery q{query, inputs};
  WorkflowDAG dag;
  try {
    dag = generate_workflow(identifier, generator, q, dag_id);
  } catch (const PipelineError& e) {
    throw PipelineError(e.stage(), std::string("generation failed: ") + e.what());
  }
  auto report = validate_dag(dag);
  fs::path path = output.empty() ? fs::path(dag.dag_id + ".json") : fs::path(output);
  write_file(path, canonical_serialize(dag));

  std::size_t bindings = 0;
  for (const auto& e : dag.edges) bindings += e.binding.has_value();
  out << "nodes: " << dag.nodes.size() << "\n";
  for (const auto& n : canonicalize(dag).nodes)
    out << "  " << n.node_id << "  " << n.function.id << "  " << n.subtask.text << "\n";
  out << "edges: " << dag.edges.size() << " (" << bindings << " bindings, " << dag.edges.size() - bindings
      << " ordering)\n";
  if (!dag.start.user_inputs.empty()) {
    out << "user inputs:";
    for (const auto& p : dag.start.user_inputs) out << " " << p.name;
    out << "\n";
  }
  out << "wrote " << path.string() << "\n";
  return report.ok() ? kSuccess : kUserError;
}

int compile_cmd(const CliConfig& c, const std::string& file, const std::string& output, std::ostream& out) {
  auto repo = open_repo(c);
  auto dag = parse_dag(read_file(file), repo->resolver());
  auto compiled = compile(dag, c.target);
  if (auto report = verify_compiled(compiled); !report.ok())
    throw std::logic_error("compiled document failed verification: " + report.to_string());
  if (output.empty()) {
    out << compiled.document;
  } else {
    write_file(output, compiled.document);
    out << "wrote " << output << " (" << to_string(compiled.target) << ")\n";
  }
  return kSuccess;
}

int serve(const CliConfig& c, const std::vector<std::string>& files, std::ostream& out) {
  auto [host, port] = split_listen(c.listen);
  std::mutex print;
  std::atomic<bool> live{false};
  std::string base;
  Orchestrator::Options options;
  options.state_dir = c.state_dir;
  options.on_register = [&](const WorkflowRegistration& r) {
    if (!live) return;
    std::lock_guard lock(print);
    out << "registered " << r.workflow_id << " at " << base << r.endpoint_path << std::endl;
  };
  Orchestrator orchestrator(options);
  GatewayServer server(orchestrator);
  int bound = server.start(host, port);
  base = "http://" + host + ":" + std::to_string(bound);
  out << "listening on " << base << std::endl;
  for (const auto& id : orchestrator.workflow_ids())
    out << "registered " << id << " at " << base << "/workflows/" << id << "/invoke" << std::endl;
  live = true;
  for (const auto& file : files) {
    try {
      orchestrator.register_workflow(load_runnable(file, c));
    } catch (const DuplicateIdError& e) {
      std::lock_guard lock(print);
      out << file << ": " << e.what() << ", keeping the stored registration" << std::endl;
    }
  }
  std::promise<void>().get_future().wait();
  return kSuccess;
}

int invoke(const CliConfig& c, const std::string& workflow, const Json& inputs, const std::string& gateway,
           std::ostream& out, std::ostream& err) {
  Json result;
  if (!gateway.empty()) {
    auto url = gateway + (gateway.back() == '/' ? "" : "/") + "workflows/" + workflow + "/invoke";
    auto response = net::post_json(url, inputs.dump());
    auto body = Json::parse(response.body, nullptr, false);
    if (response.status == 400 && body.is_object() && body.contains("missing_input"))
      throw MissingInputError(body["missing_input"].get<std::string>());
    if (response.status != 200 || !body.is_object()) {
      auto reason = body.is_object() ? body.value("error", response.body) : response.body;
      throw Error("gateway answered " + std::to_string(response.status) + ": " + reason);
    }
    result = body;
  } else {
    Orchestrator orchestrator;
    auto id = orchestrator.register_workflow(load_runnable(workflow, c)).workflow_id;
    auto trace = orchestrator.invoke(id, inputs);
    for (const auto& n : trace.nodes)
      if (n.status == NodeStatus::Failed) err << n.node_id << " failed: " << n.error << "\n";
    result = {{"status", std::string(to_string(trace.status))},
              {"outputs", trace.outputs},
              {"invocation_id", trace.invocation_id}};
  }
  out << dump_pretty(result);
  return result.value("status", "") == "succeeded" ? kSuccess : kUserError;
}

struct EvalArgs {
  std::string dataset;
  std::size_t repetitions = 5;
  std::vector<std::string> settings;
  std::string output;
  std::string metric = "recall";
  std::size_t jobs = 1;
  std::string backend = "transcripts";
};

int eval_cmd(const CliConfig& c, const EvalArgs& a, std::ostream& out, std::ostream& err) {
  auto ds = eval::load_dataset(a.dataset);
  eval::EvalOptions options;
  options.repetitions = a.repetitions;
  if (!a.settings.empty()) {
    options.settings.clear();
    for (const auto& s : a.settings) {
      auto setting = eval::parse_setting(s);
      if (!setting) throw UsageError("unknown setting '" + s + "' (expected ae, ae-wo-c or ae-wo-wgc)");
      options.settings.push_back(*setting);
    }
  }
  if (a.metric == "f1") options.mode = eval::MetricMode::F1;
  else if (a.metric != "recall") throw UsageError("unknown metric mode '" + a.metric + "' (expected recall or f1)");
  options.weights = c.weights;
  options.top_k = c.k;
  options.jobs = a.jobs;
  options.embedder = make_embedder(c);
  if (!a.output.empty()) options.output_dir = a.output;
  if (a.backend == "remote") {
    auto shared = make_backend(c);
    options.backend = [shared](const eval::EvalCase&, eval::Setting, std::size_t) { return shared; };
  } else if (a.backend != "transcripts") {
    throw UsageError("unknown eval backend '" + a.backend + "' (expected transcripts or remote)");
  }
  auto report = eval::run_eval(ds, options);
  out << eval::render_report(report);
  if (!a.output.empty()) {
    eval::write_report(report, a.output);
    out << "wrote " << (fs::path(a.output) / "report.json").string() << "\n";
  }
  for (const auto& p : ds.problems) err << "skipped " << p.source << ": " << p.message << "\n";
  return kSuccess;
}

}  // namespace

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* value = std::getenv(name.c_str());
    if (!value || !*value) return std::nullopt;
    return std::string(value);
  };
}

CliConfig resolve_config(const Json& file, const EnvLookup& env, const Json& flags) {
  CliConfig c;
  apply_layer(c, file.is_null() ? Json::object() : file);
  if (env) {
    if (auto key = env("FAASFLOW_LLM_API_KEY")) c.llm_api_key = *key;
    else if (auto fallback = env("OPENAI_API_KEY")) c.llm_api_key = *fallback;
    if (auto key = env("FAASFLOW_EMBEDDING_API_KEY")) c.embedding_api_key = *key;
  }
  apply_layer(c, flags.is_null() ? Json::object() : flags);
  return c;
}

void check_config(const CliConfig& c) {
  if (c.k < 1) throw UsageError("k must be at least 1");
  if (c.llm.rfind("scripted:", 0) == 0) {
    auto path = c.llm.substr(9);
    if (path.empty() || !fs::is_regular_file(path)) throw UsageError("scripted transcript '" + path + "' does not exist");
  } else if (c.llm != "remote") {
    throw UsageError("unknown llm backend '" + c.llm + "' (expected remote or scripted:<path>)");
  }
  if (c.embedding != "token-hash" && c.embedding != "http")
    throw UsageError("unknown embedding provider '" + c.embedding + "' (expected token-hash or http)");
  if (c.embedding == "http" && (c.embedding_base_url.empty() || c.embedding_model.empty()))
    throw UsageError("the http embedding provider needs embedding_base_url and embedding_model");
  const auto& w = c.weights;
  if (w.selection < 0 || w.ordering < 0 || w.dependency < 0 || w.selection + w.ordering + w.dependency <= 0)
    throw UsageError("weights must be non-negative and not all zero");
  split_listen(c.listen);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  CLI::App app{"Generate, compile, run and evaluate FaaS workflows from natural-language requests", "faasflow"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (default: ./faasflow.json when present)");
  std::map<std::string, std::string> raw;
  std::vector<std::pair<CLI::Option*, std::string>> globals;
  auto global = [&](const std::string& flags, const std::string& key, const std::string& help) {
    globals.emplace_back(app.add_option(flags, raw[key], help), key);
  };
  global("--repo", "repo", "Function repository directory");
  global("--llm", "llm", "LLM backend: remote or scripted:<transcript.json>");
  global("--llm-base-url", "llm_base_url", "Chat-completions base URL");
  global("--llm-model", "llm_model", "Model name for the remote backend");
  global("--embedding", "embedding", "Embedding provider: token-hash or http");
  global("--embedding-base-url", "embedding_base_url", "Embeddings API base URL");
  global("--embedding-model", "embedding_model", "Embedding model name");
  global("--embedding-dimension", "embedding_dimension", "Embedding vector size");
  global("-k,--top-k", "k", "Candidates retrieved per sub-task");
  global("--target", "target", "Compile target: argo or local");
  global("--listen", "listen", "Gateway address host:port");
  global("--weights", "weights", "Summary weights selection,ordering,dependency");
  global("--state-dir", "state_dir", "Directory holding gateway registrations");

  auto* repo = app.add_subcommand("repo", "Manage the function repository");
  repo->require_subcommand(1);
  repo->fallthrough();
  std::vector<std::string> add_files;
  auto* add = repo->add_subcommand("add", "Register function spec files");
  add->add_option("files", add_files, "Spec files (one object or an array each)")->required();
  add->fallthrough();
  auto* list = repo->add_subcommand("list", "List registered functions");
  list->fallthrough();
  std::string show_id;
  auto* show = repo->add_subcommand("show", "Print one function spec");
  show->add_option("id", show_id, "Function id")->required();
  show->fallthrough();

  std::string query, dag_id, output, inputs_object;
  std::vector<std::string> input_pairs;
  auto* gen = app.add_subcommand("generate", "Generate a workflow DAG from a request");
  gen->add_option("query", query, "The request in plain language")->required();
  gen->add_option("--input", input_pairs, "User-supplied value name=value (repeatable)");
  gen->add_option("--inputs", inputs_object, "User-supplied values as a JSON object");
  gen->add_option("--dag-id", dag_id, "DAG id (default: derived from the request)");
  gen->add_option("-o,--output", output, "Output file (default: <dag_id>.json)");
  gen->fallthrough();

  std::string dag_file;
  auto* comp = app.add_subcommand("compile", "Compile a DAG file for a target platform");
  comp->add_option("dag", dag_file, "Canonical DAG file")->required();
  comp->add_option("-o,--output", output, "Output file (default: stdout)");
  comp->fallthrough();

  std::vector<std::string> register_files;
  auto* srv = app.add_subcommand("serve", "Run the workflow gateway");
  srv->add_option("--register", register_files, "Compiled local-json or DAG files to register at start");
  srv->fallthrough();

  std::string workflow, gateway;
  auto* inv = app.add_subcommand("invoke", "Invoke a workflow");
  inv->add_option("workflow", workflow, "Workflow id (with --gateway) or a local-json/DAG file")->required();
  inv->add_option("--input", input_pairs, "Input value name=value (repeatable)");
  inv->add_option("--inputs", inputs_object, "Inputs as a JSON object");
  inv->add_option("--gateway", gateway, "Gateway base URL, e.g. http://127.0.0.1:8080");
  inv->fallthrough();

  EvalArgs eval_args;
  auto* ev = app.add_subcommand("eval", "Score generated workflows against a dataset");
  ev->add_option("dataset", eval_args.dataset, "Dataset directory")->required();
  ev->add_option("-r,--repetitions", eval_args.repetitions, "Generations per case and setting");
  ev->add_option("--setting", eval_args.settings, "ae, ae-wo-c or ae-wo-wgc (repeatable; default all)");
  ev->add_option("-o,--output", eval_args.output, "Directory for documents and report files");
  ev->add_option("--metric", eval_args.metric, "recall or f1");
  ev->add_option("-j,--jobs", eval_args.jobs, "Parallel generations");
  ev->add_option("--backend", eval_args.backend, "transcripts (per-case scripted replies) or remote");
  ev->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kSuccess : kUserError;
  }

  try {
    Json file = Json::object();
    fs::path path = config_path.empty() ? fs::path("faasflow.json") : fs::path(config_path);
    if (!config_path.empty() || fs::is_regular_file(path)) file = parse_json(read_file(path), path.string());
    Json flags = Json::object();
    for (const auto& [option, key] : globals)
      if (option->count() > 0) flags[key] = raw[key];
    auto config = resolve_config(file, env, flags);
    check_config(config);

    if (*add) return repo_add(config, add_files, out, err);
    if (*list) return repo_list(config, out);
    if (*show) return repo_show(config, show_id, out);
    if (*gen) return generate(config, query, parse_inputs(input_pairs, inputs_object), dag_id, output, out);
    if (*comp) return compile_cmd(config, dag_file, output, out);
    if (*srv) return serve(config, register_files, out);
    if (*inv) return invoke(config, workflow, parse_inputs(input_pairs, inputs_object), gateway, out, err);
    if (*ev) {
      if (eval_args.repetitions == 0) throw UsageError("--repetitions must be at least 1");
      return eval_cmd(config, eval_args, out, err);
    }
    return kUserError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUserError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace faasflow::cli
