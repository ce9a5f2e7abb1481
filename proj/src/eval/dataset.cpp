#include "faasflow/eval/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "faasflow/core/serialize.hpp"
#include "faasflow/core/validate.hpp"

namespace faasflow::eval {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

EvalCase parse_case(const Json& doc, const fs::path& dir, const FunctionResolver& resolve) {
  if (!doc.is_object()) throw ParseError("expected an object", "$");
  auto text = [&](const char* key) {
    if (!doc.contains(key) || !doc.at(key).is_string()) throw ParseError(std::string("missing string '") + key + "'", "$");
    return doc.at(key).get<std::string>();
  };
  EvalCase c;
  c.case_id = text("case_id");
  if (!is_identifier(c.case_id)) throw ParseError("case_id is not an identifier", "$.case_id");
  auto level = text("complexity");
  auto complexity = parse_complexity(level);
  if (!complexity) throw ParseError("unknown complexity '" + level + "'", "$.complexity");
  c.complexity = *complexity;
  c.query.text = text("query");
  if (doc.contains("user_inputs")) {
    if (!doc.at("user_inputs").is_object()) throw ParseError("expected an object", "$.user_inputs");
    c.query.user_inputs = doc.at("user_inputs");
  }
  if (!doc.contains("truth")) throw ParseError("missing field 'truth'", "$");
  c.truth = dag_from_json(doc.at("truth"), resolve);
  if (auto report = validate_dag(c.truth); !report.ok())
    throw ValidationError("truth DAG is invalid", std::move(report));
  if (!fits_complexity(c.complexity, c.truth.nodes.size()))
    throw ParseError(std::to_string(c.truth.nodes.size()) + " nodes do not fit complexity '" + level + "'",
                     "$.truth.nodes");
  if (doc.contains("transcript")) c.transcript = dir / text("transcript");
  return c;
}

}  // namespace

std::string_view to_string(Complexity c) {
  switch (c) {
    case Complexity::Easy: return "easy";
    case Complexity::Intermediate: return "intermediate";
    case Complexity::Hard: return "hard";
  }
  return "?";
}

std::optional<Complexity> parse_complexity(std::string_view text) {
  if (text == "easy") return Complexity::Easy;
  if (text == "intermediate") return Complexity::Intermediate;
  if (text == "hard") return Complexity::Hard;
  return std::nullopt;
}

bool fits_complexity(Complexity c, std::size_t nodes) {
  switch (c) {
    case Complexity::Easy: return nodes >= 1 && nodes <= 2;
    case Complexity::Intermediate: return nodes >= 3 && nodes <= 5;
    case Complexity::Hard: return nodes >= 6 && nodes <= 10;
  }
  return false;
}

const EvalCase* Dataset::find_case(std::string_view id) const {
  auto it = std::find_if(cases.begin(), cases.end(), [&](const EvalCase& c) { return c.case_id == id; });
  return it == cases.end() ? nullptr : &*it;
}

Dataset load_dataset(const fs::path& dir) {
  Dataset ds;
  ds.directory = dir;
  try {
    auto meta = parse_json(read_file(dir / "dataset.json"), "dataset.json");
    ds.name = meta.value("name", dir.filename().string());
    ds.note = meta.value("note", "");
    auto functions = parse_json(read_file(dir / "functions.json"), "functions.json");
    if (!functions.is_array()) throw DatasetError("functions.json must hold an array");
    for (std::size_t i = 0; i < functions.size(); ++i)
      ds.functions.push_back(function_from_json(functions[i], "$[" + std::to_string(i) + "]"));
  } catch (const DatasetError&) {
    throw;
  } catch (const Error& e) {
    throw DatasetError(dir.string() + ": " + e.what());
  }

  std::map<std::string, FunctionSpec, std::less<>> by_id;
  for (const auto& fn : ds.functions) by_id.emplace(fn.id, fn);
  FunctionResolver resolve = [&by_id](std::string_view id) -> std::optional<FunctionSpec> {
    auto it = by_id.find(id);
    if (it == by_id.end()) return std::nullopt;
    return it->second;
  };

  std::vector<fs::path> files;
  if (fs::is_directory(dir / "cases"))
    for (const auto& entry : fs::directory_iterator(dir / "cases"))
      if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::set<std::string> seen;
  for (const auto& file : files) {
    auto source = fs::relative(file, dir).string();
    try {
      auto c = parse_case(parse_json(read_file(file), source), dir, resolve);
      if (!seen.insert(c.case_id).second) throw DatasetError("duplicate case_id '" + c.case_id + "'");
      ds.cases.push_back(std::move(c));
    } catch (const ParseError& e) {
      ds.problems.push_back({source, std::string(e.what()) + " (at " + e.path() + ")"});
    } catch (const Error& e) {
      ds.problems.push_back({source, e.what()});
    }
  }
  std::sort(ds.cases.begin(), ds.cases.end(),
            [](const EvalCase& a, const EvalCase& b) { return a.case_id < b.case_id; });
  return ds;
}

Json case_to_json(const EvalCase& c, const fs::path& dataset_dir) {
  Json doc = {{"case_id", c.case_id},
              {"complexity", std::string(to_string(c.complexity))},
              {"query", c.query.text},
              {"user_inputs", c.query.user_inputs},
              {"truth", dag_to_json(c.truth)}};
  if (!c.transcript.empty()) doc["transcript"] = fs::relative(c.transcript, dataset_dir).generic_string();
  return doc;
}

}  // namespace faasflow::eval
