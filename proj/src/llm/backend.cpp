#include "faasflow/llm/backend.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "faasflow/core/digest.hpp"
#include "faasflow/net/http.hpp"

namespace faasflow::llm {

using nlohmann::json;

std::string transcript_key(TemplateId id, const Bindings& bindings) {
  json canonical(bindings);  // std::map keeps keys sorted
  return std::string(to_string(id)) + ":" + to_hex(fnv1a64(canonical.dump()));
}

ScriptedBackend::ScriptedBackend(Transcript transcript) : transcript_(std::move(transcript)) {}

ScriptedBackend::Transcript ScriptedBackend::load_transcript(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BackendError("cannot read transcript " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return json::parse(buffer.str()).get<Transcript>();
  } catch (const json::exception& e) {
    throw BackendError("malformed transcript " + path.string() + ": " + e.what());
  }
}

std::shared_ptr<ScriptedBackend> ScriptedBackend::from_file(const std::filesystem::path& path) {
  return std::make_shared<ScriptedBackend>(load_transcript(path));
}

void ScriptedBackend::save_transcript(const Transcript& transcript,
                                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw BackendError("cannot write transcript " + path.string());
  out << json(transcript).dump(2) << "\n";
}

void ScriptedBackend::add(TemplateId id, const Bindings& bindings,
                          std::vector<std::string> replies) {
  std::lock_guard lock(mutex_);
  auto& list = transcript_[transcript_key(id, bindings)];
  list.insert(list.end(), std::make_move_iterator(replies.begin()),
              std::make_move_iterator(replies.end()));
}

std::string ScriptedBackend::complete(const BackendCall& call) {
  auto key = transcript_key(call.request.template_id, call.request.bindings);
  std::lock_guard lock(mutex_);
  auto it = transcript_.find(key);
  if (it == transcript_.end()) throw BackendError("no scripted reply for " + key);
  auto& cursor = cursor_[key];
  if (cursor >= it->second.size())
    throw BackendError("scripted replies exhausted for " + key);
  return it->second[cursor++];
}

std::size_t ScriptedBackend::consumed(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = cursor_.find(key);
  return it == cursor_.end() ? 0 : it->second;
}

std::string RecordingBackend::complete(const BackendCall& call) {
  auto reply = inner_->complete(call);
  std::lock_guard lock(mutex_);
  recorded_[transcript_key(call.request.template_id, call.request.bindings)].push_back(reply);
  return reply;
}

ScriptedBackend::Transcript RecordingBackend::transcript() const {
  std::lock_guard lock(mutex_);
  return recorded_;
}

RemoteBackend::Options RemoteBackend::options_from_env() {
  Options options;
  auto env = [](const char* name) -> const char* {
    const char* value = std::getenv(name);
    return value && *value ? value : nullptr;
  };
  if (auto v = env("FAASFLOW_LLM_BASE_URL")) options.base_url = v;
  if (auto v = env("FAASFLOW_LLM_MODEL")) options.model = v;
  if (auto v = env("FAASFLOW_LLM_API_KEY")) {
    options.api_key = v;
  } else if (auto v = env("OPENAI_API_KEY")) {
    options.api_key = v;
  }
  return options;
}

std::string RemoteBackend::complete(const BackendCall& call) {
  json request = {{"model", options_.model},
                  {"temperature", call.request.temperature},
                  {"messages", json::array({{{"role", "user"}, {"content", call.prompt}}})}};
  net::Headers headers;
  if (!options_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + options_.api_key);
  auto base = options_.base_url;
  while (!base.empty() && base.back() == '/') base.pop_back();
  auto response = net::post_json(base + "/chat/completions", request.dump(), headers, options_.timeout);
  if (response.status == 429 || response.status >= 500)
    throw UnavailableError("chat completion returned " + std::to_string(response.status));
  if (response.status < 200 || response.status >= 300)
    throw BackendError("chat completion returned " + std::to_string(response.status) + ": " +
                       response.body.substr(0, 200));
  try {
    return json::parse(response.body).at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw BackendError(std::string("malformed chat completion response: ") + e.what());
  }
}

}  // namespace faasflow::llm
