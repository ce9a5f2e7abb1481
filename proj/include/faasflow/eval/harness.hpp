#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "faasflow/eval/dataset.hpp"
#include "faasflow/eval/metrics.hpp"
#include "faasflow/llm/backend.hpp"
#include "faasflow/repo/embedding.hpp"

namespace faasflow::eval {

/// Generation strategies compared by the ablation.
///   Full:                         identifier, generator, compiler
///   WithoutCompiler:              identifier, generator; the LLM writes the manifest
///   WithoutGeneratorAndCompiler:  identifier; the LLM writes the manifest from the node list
enum class Setting { Full, WithoutCompiler, WithoutGeneratorAndCompiler };

inline const std::vector<Setting> kAllSettings = {Setting::Full, Setting::WithoutCompiler,
                                                  Setting::WithoutGeneratorAndCompiler};

/// "AE", "AE w/o C", "AE w/o WG&C".
std::string_view to_string(Setting s);
/// "ae", "ae-wo-c", "ae-wo-wgc"; used for directories and flags.
std::string_view slug(Setting s);
std::optional<Setting> parse_setting(std::string_view text);

/// Backend for one generation. A fresh backend per call keeps repetitions
/// independent of each other.
using BackendFactory =
    std::function<std::shared_ptr<llm::LlmBackend>(const EvalCase&, Setting, std::size_t repetition)>;

/// Replays each case's transcript file.
BackendFactory scripted_backends();

/// Lets a caller alter a compiled document before it is verified.
using DocumentHook = std::function<void(const EvalCase&, Setting, std::size_t repetition, std::string& document)>;

struct EvalOptions {
  std::size_t repetitions = 5;
  std::vector<Setting> settings = kAllSettings;
  MetricMode mode = MetricMode::Recall;
  Weights weights;
  std::size_t top_k = 5;
  double confidence = 0.95;
  std::size_t jobs = 1;
  /// Documents go to <output_dir>/<setting slug>/<case_id>/rep-<r>.yaml.
  std::optional<std::filesystem::path> output_dir;
  BackendFactory backend = scripted_backends();
  std::shared_ptr<const EmbeddingProvider> embedder = std::make_shared<TokenHashEmbedder>();
  DocumentHook tamper;
};

struct GenerationRecord {
  std::string case_id;
  Complexity complexity = Complexity::Easy;
  Setting setting = Setting::Full;
  std::size_t repetition = 0;
  Scores scores;
  /// The document failed verification; all scores are zero.
  bool syntactic_failure = false;
  /// Verification report or generation failure; empty on success.
  std::string error;
  std::optional<std::filesystem::path> document_path;
};

/// Mean with a two-sided Student-t interval; half_width is NaN below two
/// samples.
struct Interval {
  double mean = 0.0;
  double half_width = 0.0;
  std::size_t samples = 0;
};

Interval t_interval(const std::vector<double>& samples, double confidence = 0.95);

/// One table row. Samples are the per-repetition means over the row's cases.
struct AggregateRow {
  Setting setting = Setting::Full;
  std::optional<Complexity> complexity;  // nullopt: all cases
  std::size_t cases = 0;
  Interval selection, ordering, dependency, overall;
  std::size_t syntactic_failures = 0;
  std::size_t generation_failures = 0;
};

struct EvalReport {
  std::string dataset;
  std::string note;
  std::size_t repetitions = 0;
  double confidence = 0.95;
  MetricMode mode = MetricMode::Recall;
  Weights weights;
  std::vector<GenerationRecord> generations;  // by setting, case, repetition
  std::vector<AggregateRow> rows;
  std::size_t syntactic_failures = 0;
  std::vector<CaseProblem> problems;

  const AggregateRow* row(Setting s, std::optional<Complexity> c = std::nullopt) const;
  std::vector<const GenerationRecord*> records(Setting s, std::string_view case_id) const;
};

/// repetitions x |cases| generations per setting. A document failing
/// verify_compiled scores zero on every metric; failed generations also
/// score zero.
EvalReport run_eval(const Dataset& dataset, const EvalOptions& options = {});

nlohmann::json report_to_json(const EvalReport& report);
/// Per-setting tables: one row per complexity plus "all".
std::string render_report(const EvalReport& report);
/// Writes report.json and report.txt.
void write_report(const EvalReport& report, const std::filesystem::path& dir);

/// Step list shown to the LLM when it writes a manifest from bare nodes.
std::string render_steps(const std::vector<WorkflowNode>& nodes);

}  // namespace faasflow::eval
