#include "faasflow/llm/prompt.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace faasflow::llm {

namespace detail {
const std::map<std::string, std::string>& builtin_template_texts();
}

namespace {

constexpr TemplateId kAllTemplates[] = {TemplateId::Plan,     TemplateId::Select,
                                        TemplateId::Order,    TemplateId::Classify,
                                        TemplateId::ComposeArgo, TemplateId::ComposeWorkflow};

bool is_name_char(char c) { return std::islower(static_cast<unsigned char>(c)) || c == '_'; }

// Calls `on_text` for literal runs and `on_placeholder` for each marker.
template <typename Text, typename Placeholder>
void scan(std::string_view tpl, Text on_text, Placeholder on_placeholder) {
  std::size_t pos = 0;
  while (pos < tpl.size()) {
    auto open = tpl.find('{', pos);
    if (open == std::string_view::npos) break;
    auto close = open + 1;
    while (close < tpl.size() && is_name_char(tpl[close])) ++close;
    if (close < tpl.size() && tpl[close] == '}' && close > open + 1) {
      on_text(tpl.substr(pos, open - pos));
      on_placeholder(std::string(tpl.substr(open + 1, close - open - 1)));
      pos = close + 1;
    } else {
      on_text(tpl.substr(pos, open + 1 - pos));
      pos = open + 1;
    }
  }
  on_text(tpl.substr(pos));
}

}  // namespace

std::string_view to_string(TemplateId id) {
  switch (id) {
    case TemplateId::Plan: return "plan";
    case TemplateId::Select: return "select";
    case TemplateId::Order: return "order";
    case TemplateId::Classify: return "classify";
    case TemplateId::ComposeArgo: return "compose_argo";
    case TemplateId::ComposeWorkflow: return "compose_workflow";
  }
  return "unknown";
}

std::optional<TemplateId> parse_template_id(std::string_view text) {
  for (auto id : kAllTemplates)
    if (to_string(id) == text) return id;
  return std::nullopt;
}

const PromptLibrary& PromptLibrary::builtin() {
  static const PromptLibrary library = [] {
    PromptLibrary lib;
    const auto& texts = detail::builtin_template_texts();
    for (auto id : kAllTemplates) lib.texts_[id] = texts.at(std::string(to_string(id)));
    return lib;
  }();
  return library;
}

PromptLibrary PromptLibrary::from_directory(const std::filesystem::path& dir) {
  PromptLibrary lib = builtin();
  for (auto id : kAllTemplates) {
    auto path = dir / (std::string(to_string(id)) + ".txt");
    std::ifstream in(path, std::ios::binary);
    if (!in) continue;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    lib.texts_[id] = buffer.str();
  }
  return lib;
}

const std::string& PromptLibrary::text(TemplateId id) const { return texts_.at(id); }

std::vector<std::string> PromptLibrary::placeholders(TemplateId id) const {
  std::vector<std::string> names;
  scan(text(id), [](std::string_view) {}, [&](std::string name) { names.push_back(std::move(name)); });
  return names;
}

std::string PromptLibrary::render(TemplateId id, const Bindings& bindings) const {
  std::string out;
  scan(
      text(id), [&](std::string_view literal) { out += literal; },
      [&](const std::string& name) {
        auto it = bindings.find(name);
        if (it == bindings.end()) throw MissingPlaceholderError(name);
        out += it->second;
      });
  return out;
}

}  // namespace faasflow::llm
