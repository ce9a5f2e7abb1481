#include <cmath>
#include <cstdio>
#include <fstream>

#include "faasflow/core/serialize.hpp"
#include "faasflow/eval/harness.hpp"

namespace faasflow::eval {

namespace {

Json interval_json(const Interval& i) {
  Json half = std::isnan(i.half_width) ? Json(nullptr) : Json(i.half_width);
  return {{"mean", i.mean}, {"half_width", half}, {"samples", i.samples}};
}

Json scores_json(const Scores& s) {
  return {{"selection", s.selection}, {"ordering", s.ordering}, {"dependency", s.dependency}, {"overall", s.overall}};
}

std::string cell(const Interval& i) {
  char buf[32];
  if (std::isnan(i.half_width))
    std::snprintf(buf, sizeof buf, "%.3f", i.mean);
  else
    std::snprintf(buf, sizeof buf, "%.3f +/- %.3f", i.mean, i.half_width);
  return buf;
}

std::string pad(std::string text, std::size_t width) {
  if (text.size() < width) text.append(width - text.size(), ' ');
  return text;
}

}  // namespace

Json report_to_json(const EvalReport& report) {
  Json generations = Json::array();
  for (const auto& g : report.generations) {
    Json entry = {{"case_id", g.case_id},
                  {"complexity", std::string(to_string(g.complexity))},
                  {"setting", std::string(slug(g.setting))},
                  {"repetition", g.repetition + 1},
                  {"scores", scores_json(g.scores)},
                  {"syntactic_failure", g.syntactic_failure}};
    if (!g.error.empty()) entry["error"] = g.error;
    if (g.document_path) entry["document"] = g.document_path->generic_string();
    generations.push_back(std::move(entry));
  }
  Json rows = Json::array();
  for (const auto& r : report.rows)
    rows.push_back({{"setting", std::string(slug(r.setting))},
                    {"complexity", r.complexity ? std::string(to_string(*r.complexity)) : "all"},
                    {"cases", r.cases},
                    {"selection", interval_json(r.selection)},
                    {"ordering", interval_json(r.ordering)},
                    {"dependency", interval_json(r.dependency)},
                    {"overall", interval_json(r.overall)},
                    {"syntactic_failures", r.syntactic_failures},
                    {"generation_failures", r.generation_failures}});
  Json problems = Json::array();
  for (const auto& p : report.problems) problems.push_back({{"source", p.source}, {"message", p.message}});
  return {{"dataset", report.dataset},
          {"note", report.note},
          {"repetitions", report.repetitions},
          {"confidence", report.confidence},
          {"metric_mode", report.mode == MetricMode::F1 ? "f1" : "recall"},
          {"weights",
           {{"selection", report.weights.selection},
            {"ordering", report.weights.ordering},
            {"dependency", report.weights.dependency}}},
          {"syntactic_failures", report.syntactic_failures},
          {"rows", rows},
          {"generations", generations},
          {"problems", problems}};
}

std::string render_report(const EvalReport& report) {
  std::string out = "Dataset: " + report.dataset + " (" + std::to_string(report.repetitions) +
                    " repetitions; mean +/- " + std::to_string(static_cast<int>(std::lround(report.confidence * 100))) +
                    "% Student-t half-width over repetition means)\n";
  if (!report.note.empty()) out += "Note: " + report.note + "\n";
  std::optional<Setting> current;
  for (const auto& r : report.rows) {
    if (r.setting != current) {
      current = r.setting;
      out += "\n" + std::string(to_string(r.setting)) + "\n";
      out += pad("complexity", 14) + pad("cases", 7) + pad("selection", 17) + pad("ordering", 17) +
             pad("dependency", 17) + pad("overall", 17) + "broken\n";
    }
    out += pad(r.complexity ? std::string(to_string(*r.complexity)) : "all", 14) + pad(std::to_string(r.cases), 7) +
           pad(cell(r.selection), 17) + pad(cell(r.ordering), 17) + pad(cell(r.dependency), 17) +
           pad(cell(r.overall), 17) + std::to_string(r.syntactic_failures) + "\n";
  }
  out += "\nSyntactically broken documents: " + std::to_string(report.syntactic_failures) + "\n";
  for (const auto& p : report.problems) out += "skipped " + p.source + ": " + p.message + "\n";
  return out;
}

void write_report(const EvalReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "report.json", std::ios::binary) << dump_pretty(report_to_json(report));
  std::ofstream(dir / "report.txt", std::ios::binary) << render_report(report);
}

}  // namespace faasflow::eval
