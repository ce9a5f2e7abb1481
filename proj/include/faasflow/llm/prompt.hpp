#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "faasflow/core/error.hpp"

namespace faasflow::llm {

/// Prompt kinds. The first four drive generation; the compose templates
/// stand in for the workflow generator and compiler in ablation runs.
enum class TemplateId { Plan, Select, Order, Classify, ComposeArgo, ComposeWorkflow };

std::string_view to_string(TemplateId id);
std::optional<TemplateId> parse_template_id(std::string_view text);

using Bindings = std::map<std::string, std::string>;

class MissingPlaceholderError : public Error {
 public:
  explicit MissingPlaceholderError(std::string placeholder)
      : Error("unbound placeholder '{" + placeholder + "}'"), placeholder_(std::move(placeholder)) {}
  const std::string& placeholder() const { return placeholder_; }

 private:
  std::string placeholder_;
};

/// Template texts with `{placeholder}` markers (lower-case letters and '_').
class PromptLibrary {
 public:
  /// The templates compiled into the binary from templates/*.txt.
  static const PromptLibrary& builtin();
  /// Reads <dir>/<template_id>.txt; missing files fall back to builtin.
  static PromptLibrary from_directory(const std::filesystem::path& dir);

  const std::string& text(TemplateId id) const;
  std::vector<std::string> placeholders(TemplateId id) const;

  /// Throws MissingPlaceholderError naming the first unbound placeholder.
  std::string render(TemplateId id, const Bindings& bindings) const;

 private:
  std::map<TemplateId, std::string> texts_;
};

inline std::string render_prompt(TemplateId id, const Bindings& bindings) {
  return PromptLibrary::builtin().render(id, bindings);
}

}  // namespace faasflow::llm
