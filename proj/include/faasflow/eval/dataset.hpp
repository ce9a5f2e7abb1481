#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "faasflow/core/error.hpp"
#include "faasflow/core/model.hpp"
#include "faasflow/pipeline/func_identifier.hpp"

namespace faasflow::eval {

enum class Complexity { Easy, Intermediate, Hard };

std::string_view to_string(Complexity c);
std::optional<Complexity> parse_complexity(std::string_view text);
/// Node count range per level: easy 1-2, intermediate 3-5, hard 6-10.
bool fits_complexity(Complexity c, std::size_t nodes);

struct EvalCase {
  std::string case_id;
  UserQuery query;
  Complexity complexity = Complexity::Easy;
  WorkflowDAG truth;
  std::filesystem::path transcript;  // empty when the case has none
};

/// A case file that could not be used; reported, never fatal.
struct CaseProblem {
  std::string source;
  std::string message;
};

struct Dataset {
  std::string name;
  std::string note;  // printed with every report
  std::filesystem::path directory;
  std::vector<FunctionSpec> functions;
  std::vector<EvalCase> cases;  // sorted by case_id
  std::vector<CaseProblem> problems;

  const EvalCase* find_case(std::string_view id) const;
};

class DatasetError : public Error {
 public:
  using Error::Error;
};

/// Layout:
///   dataset.json        {"name", "note"}
///   functions.json      array of function specs
///   cases/*.json        {"case_id", "complexity", "query", "user_inputs",
///                        "truth": canonical DAG, "transcript": relative path}
/// Throws DatasetError when dataset.json or functions.json is unusable; bad
/// case files land in `problems`.
Dataset load_dataset(const std::filesystem::path& dir);

/// Case file body for `c` (transcript stored relative to `dataset_dir`).
nlohmann::json case_to_json(const EvalCase& c, const std::filesystem::path& dataset_dir);

}  // namespace faasflow::eval
