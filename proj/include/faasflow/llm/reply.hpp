#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "faasflow/core/error.hpp"
#include "faasflow/llm/prompt.hpp"

namespace faasflow::llm {

/// Values a reply is allowed to name: candidate function ids (select), node
/// ids to permute (order), or (node_id, output) pairs (classify).
struct ReplyConstraints {
  std::vector<std::string> choices;
  std::vector<std::pair<std::string, std::string>> catalog;
};

/// A reply that does not conform to its template's schema.
class SchemaViolation : public Error {
 public:
  using Error::Error;
};

/// Result of classify: nullopt means the parameter is a direct user input.
struct Classification {
  std::optional<std::pair<std::string, std::string>> output;  // (node_id, param)

  bool is_input() const { return !output.has_value(); }
  friend bool operator==(const Classification&, const Classification&) = default;
};

/// First balanced {...} or [...] block in `text`, skipping brackets inside
/// JSON string literals. nullopt when there is none.
std::optional<std::string_view> extract_structured_block(std::string_view text);

/// Validates `raw` against the schema of `id` and returns the normalized
/// value: plan/order give an array of strings, select a string, classify
/// "INPUT" or [node_id, output], compose templates the document text.
/// Throws SchemaViolation.
nlohmann::json parse_reply(TemplateId id, std::string_view raw, const ReplyConstraints& constraints);

Classification to_classification(const nlohmann::json& parsed);

}  // namespace faasflow::llm
