#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "faasflow/core/error.hpp"
#include "faasflow/llm/prompt.hpp"
#include "faasflow/llm/reply.hpp"

namespace faasflow::llm {

struct PromptRequest {
  TemplateId template_id = TemplateId::Plan;
  Bindings bindings;
  double temperature = 0.0;
  int max_retries = 2;
  ReplyConstraints constraints;
};

/// One attempt handed to a backend. `prompt` already carries any violation
/// feedback from earlier attempts; `attempt` counts from 1.
struct BackendCall {
  const PromptRequest& request;
  std::string prompt;
  int attempt = 1;
};

class BackendError : public Error {
 public:
  using Error::Error;
};

/// Chat-completion backend. Calls are independent and may run concurrently.
class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  /// Throws UnavailableError when the service cannot be reached and
  /// BackendError for any other failure.
  virtual std::string complete(const BackendCall& call) = 0;
};

/// Stable replay key: "<template_id>:<16-hex FNV-1a of the sorted bindings>".
std::string transcript_key(TemplateId id, const Bindings& bindings);

/// Replays canned replies. Each key owns an ordered list consumed one reply
/// per call, so retries see the next entry.
class ScriptedBackend final : public LlmBackend {
 public:
  using Transcript = std::map<std::string, std::vector<std::string>>;

  ScriptedBackend() = default;
  explicit ScriptedBackend(Transcript transcript);

  /// Transcript file: JSON object mapping key to an array of reply strings.
  static std::shared_ptr<ScriptedBackend> from_file(const std::filesystem::path& path);
  static Transcript load_transcript(const std::filesystem::path& path);
  static void save_transcript(const Transcript& transcript, const std::filesystem::path& path);

  void add(TemplateId id, const Bindings& bindings, std::vector<std::string> replies);

  /// Throws BackendError when the key is unknown or its replies are used up.
  std::string complete(const BackendCall& call) override;

  /// Replies consumed so far for `key`.
  std::size_t consumed(const std::string& key) const;

 private:
  mutable std::mutex mutex_;
  Transcript transcript_;
  std::map<std::string, std::size_t> cursor_;
};

/// Passes calls through and records every reply under its transcript key.
class RecordingBackend final : public LlmBackend {
 public:
  explicit RecordingBackend(std::shared_ptr<LlmBackend> inner) : inner_(std::move(inner)) {}
  std::string complete(const BackendCall& call) override;
  ScriptedBackend::Transcript transcript() const;

 private:
  std::shared_ptr<LlmBackend> inner_;
  mutable std::mutex mutex_;
  ScriptedBackend::Transcript recorded_;
};

/// Chat-completions HTTP API (`POST <base_url>/chat/completions`).
class RemoteBackend final : public LlmBackend {
 public:
  struct Options {
    std::string base_url = "https://api.openai.com/v1";
    std::string model = "gpt-4o";
    std::string api_key;
    std::chrono::milliseconds timeout{60000};
  };

  /// Reads FAASFLOW_LLM_BASE_URL, FAASFLOW_LLM_MODEL and FAASFLOW_LLM_API_KEY
  /// (falling back to OPENAI_API_KEY).
  static Options options_from_env();

  explicit RemoteBackend(Options options) : options_(std::move(options)) {}
  std::string complete(const BackendCall& call) override;

 private:
  Options options_;
};

}  // namespace faasflow::llm
