#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "faasflow/compile/compiler.hpp"
#include "faasflow/core/error.hpp"
#include "faasflow/eval/metrics.hpp"

namespace faasflow::cli {

enum ExitCode { kSuccess = 0, kUserError = 1, kInternalError = 2 };

using EnvLookup = std::function<std::optional<std::string>(const std::string& name)>;

/// Reads the process environment.
EnvLookup process_env();

/// Bad flags, config values or arguments.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct CliConfig {
  std::filesystem::path repo = ".faasflow/repo";
  /// "remote" or "scripted:<transcript path>".
  std::string llm = "remote";
  std::string llm_base_url = "https://api.openai.com/v1";
  std::string llm_model = "gpt-4o";
  std::string llm_api_key;
  /// "token-hash" or "http".
  std::string embedding = "token-hash";
  std::string embedding_base_url;
  std::string embedding_model;
  std::size_t embedding_dimension = 384;
  std::string embedding_api_key;
  std::size_t k = 5;
  CompileTarget target = CompileTarget::ArgoYaml;
  std::string listen = "127.0.0.1:8080";
  eval::Weights weights;
  std::filesystem::path state_dir = ".faasflow/state";
};

/// Layers, lowest first: the config file object, API keys from the
/// environment (FAASFLOW_LLM_API_KEY or OPENAI_API_KEY,
/// FAASFLOW_EMBEDDING_API_KEY), then the flags given on the command line.
/// Both objects use the config file keys. Throws UsageError.
CliConfig resolve_config(const nlohmann::json& file, const EnvLookup& env, const nlohmann::json& flags);

/// Throws UsageError: k < 1, a scripted transcript that does not exist,
/// unknown selectors, negative or all-zero weights, malformed listen address.
void check_config(const CliConfig& config);

/// Runs one command line (without the program name). Exit codes: 0 success,
/// 1 user error, 2 internal error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const EnvLookup& env = process_env());

}  // namespace faasflow::cli
