#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "faasflow/llm/backend.hpp"
#include "faasflow/llm/prompt.hpp"
#include "faasflow/llm/reply.hpp"

namespace faasflow::llm {

struct StructuredReply {
  std::string raw_text;
  nlohmann::json parsed;
  int attempts = 0;
};

/// Every attempt produced a schema violation.
class StructuredParseError : public Error {
 public:
  StructuredParseError(TemplateId id, std::string raw_text, std::string violation, int attempts);
  const std::string& raw_text() const { return raw_text_; }
  const std::string& violation() const { return violation_; }
  int attempts() const { return attempts_; }

 private:
  std::string raw_text_;
  std::string violation_;
  int attempts_;
};

/// Renders prompts, calls the backend and re-prompts with the violation
/// appended until the reply conforms or retries run out.
class LlmGateway {
 public:
  explicit LlmGateway(std::shared_ptr<LlmBackend> backend,
                      const PromptLibrary& library = PromptLibrary::builtin());

  /// Throws StructuredParseError, MissingPlaceholderError, or the backend's
  /// UnavailableError / BackendError.
  StructuredReply complete(const PromptRequest& request) const;

  const PromptLibrary& library() const { return library_; }

 private:
  std::shared_ptr<LlmBackend> backend_;
  PromptLibrary library_;
};

}  // namespace faasflow::llm
