#include "faasflow/llm/gateway.hpp"

#include <algorithm>

namespace faasflow::llm {

StructuredParseError::StructuredParseError(TemplateId id, std::string raw_text,
                                           std::string violation, int attempts)
    : Error(std::string(to_string(id)) + " reply still invalid after " + std::to_string(attempts) +
            " attempt(s): " + violation),
      raw_text_(std::move(raw_text)),
      violation_(std::move(violation)),
      attempts_(attempts) {}

LlmGateway::LlmGateway(std::shared_ptr<LlmBackend> backend, const PromptLibrary& library)
    : backend_(std::move(backend)), library_(library) {}

StructuredReply LlmGateway::complete(const PromptRequest& request) const {
  const auto base_prompt = library_.render(request.template_id, request.bindings);
  auto prompt = base_prompt;
  const int max_attempts = std::max(0, request.max_retries) + 1;
  for (int attempt = 1;; ++attempt) {
    auto raw = backend_->complete(BackendCall{request, prompt, attempt});
    try {
      auto parsed = parse_reply(request.template_id, raw, request.constraints);
      return {std::move(raw), std::move(parsed), attempt};
    } catch (const SchemaViolation& violation) {
      if (attempt >= max_attempts)
        throw StructuredParseError(request.template_id, std::move(raw), violation.what(), attempt);
      prompt = base_prompt + "\n\nYour previous reply was rejected: " + violation.what() +
               "\nReply again using exactly the requested format.";
    }
  }
}

}  // namespace faasflow::llm
