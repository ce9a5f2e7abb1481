#include "faasflow/llm/reply.hpp"

#include <algorithm>
#include <set>

namespace faasflow::llm {

using nlohmann::json;

namespace {

// Length of the balanced block starting at text[start], or 0.
std::size_t match_block(std::string_view text, std::size_t start) {
  std::vector<char> closers;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    char c = text[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    switch (c) {
      case '"': in_string = true; break;
      case '{': closers.push_back('}'); break;
      case '[': closers.push_back(']'); break;
      case '}':
      case ']':
        if (closers.empty() || closers.back() != c) return 0;
        closers.pop_back();
        if (closers.empty()) return i - start + 1;
        break;
      default: break;
    }
  }
  return 0;
}

json parse_block(std::string_view raw) {
  auto block = extract_structured_block(raw);
  if (!block) throw SchemaViolation("reply contains no JSON object or array");
  try {
    return json::parse(*block);
  } catch (const json::parse_error& e) {
    throw SchemaViolation(std::string("reply block is not valid JSON: ") + e.what());
  }
}

std::string trim(std::string_view text) {
  auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = text.find_last_not_of(" \t\r\n");
  return std::string(text.substr(begin, end - begin + 1));
}

json string_list(const json& value, const char* what) {
  if (!value.is_array()) throw SchemaViolation(std::string(what) + " must be a JSON array of strings");
  json out = json::array();
  for (const auto& item : value) {
    if (!item.is_string()) throw SchemaViolation(std::string(what) + " must contain only strings");
    out.push_back(trim(item.get<std::string>()));
  }
  return out;
}

json parse_plan(std::string_view raw) {
  auto list = string_list(parse_block(raw), "plan");
  for (const auto& item : list)
    if (item.get<std::string>().empty()) throw SchemaViolation("plan contains an empty sub-task");
  return list;
}

json parse_select(std::string_view raw, const ReplyConstraints& constraints) {
  auto doc = parse_block(raw);
  if (!doc.is_object() || !doc.contains("function_id") || !doc["function_id"].is_string())
    throw SchemaViolation("expected {\"function_id\": \"<id>\"}");
  auto id = trim(doc["function_id"].get<std::string>());
  if (std::find(constraints.choices.begin(), constraints.choices.end(), id) ==
      constraints.choices.end())
    throw SchemaViolation("function '" + id + "' is not one of the candidates");
  return id;
}

json parse_order(std::string_view raw, const ReplyConstraints& constraints) {
  auto list = string_list(parse_block(raw), "order");
  std::set<std::string> expected(constraints.choices.begin(), constraints.choices.end());
  std::set<std::string> seen;
  for (const auto& item : list) {
    auto id = item.get<std::string>();
    if (!expected.contains(id)) throw SchemaViolation("unknown step '" + id + "'");
    if (!seen.insert(id).second) throw SchemaViolation("step '" + id + "' listed twice");
  }
  for (const auto& id : expected)
    if (!seen.contains(id)) throw SchemaViolation("step '" + id + "' is missing");
  return list;
}

json parse_classify(std::string_view raw, const ReplyConstraints& constraints) {
  auto doc = parse_block(raw);
  json source = doc.is_object() && doc.contains("source") ? doc["source"] : doc;
  if (source.is_string()) {
    auto token = trim(source.get<std::string>());
    if (token == "INPUT") return "INPUT";
    throw SchemaViolation("source must be INPUT or a {node_id, output} pair, got '" + token + "'");
  }
  std::string node;
  std::string output;
  if (source.is_object() && source.contains("node_id") && source.contains("output") &&
      source["node_id"].is_string() && source["output"].is_string()) {
    node = source["node_id"].get<std::string>();
    output = source["output"].get<std::string>();
  } else if (source.is_array() && source.size() == 2 && source[0].is_string() &&
             source[1].is_string()) {
    node = source[0].get<std::string>();
    output = source[1].get<std::string>();
  } else {
    throw SchemaViolation("source must be INPUT or a {node_id, output} pair");
  }
  auto entry = std::make_pair(trim(node), trim(output));
  if (std::find(constraints.catalog.begin(), constraints.catalog.end(), entry) ==
      constraints.catalog.end())
    throw SchemaViolation("output '" + entry.first + "." + entry.second +
                          "' is not among the earlier steps' outputs");
  return json::array({entry.first, entry.second});
}

json parse_document(std::string_view raw) {
  auto fence = raw.find("```");
  if (fence != std::string_view::npos) {
    auto body = raw.find('\n', fence);
    auto end = body == std::string_view::npos ? body : raw.find("```", body);
    if (end != std::string_view::npos) {
      auto text = std::string(raw.substr(body + 1, end - body - 1));
      if (trim(text).empty()) throw SchemaViolation("fenced document is empty");
      return text;
    }
  }
  if (trim(raw).empty()) throw SchemaViolation("reply is empty");
  return std::string(raw);
}

}  // namespace

std::optional<std::string_view> extract_structured_block(std::string_view text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{' && text[i] != '[') continue;
    if (auto length = match_block(text, i)) return text.substr(i, length);
  }
  return std::nullopt;
}

json parse_reply(TemplateId id, std::string_view raw, const ReplyConstraints& constraints) {
  switch (id) {
    case TemplateId::Plan: return parse_plan(raw);
    case TemplateId::Select: return parse_select(raw, constraints);
    case TemplateId::Order: return parse_order(raw, constraints);
    case TemplateId::Classify: return parse_classify(raw, constraints);
    case TemplateId::ComposeArgo:
    case TemplateId::ComposeWorkflow: return parse_document(raw);
  }
  throw SchemaViolation("unknown template");
}

Classification to_classification(const json& parsed) {
  if (parsed.is_string()) return {};
  return {std::make_pair(parsed.at(0).get<std::string>(), parsed.at(1).get<std::string>())};
}

}  // namespace faasflow::llm
