#pragma once

#include <chrono>
#include <string>

#include <json.hpp>

#include "faasflow/core/error.hpp"

namespace faasflow {

struct RetryPolicy {
  int retries = 2;  // extra attempts after a network failure
  std::chrono::milliseconds backoff{100};
  std::chrono::milliseconds timeout{10000};
};

class FunctionCallError : public Error {
 public:
  enum class Kind { Network, Status, Parse };

  FunctionCallError(Kind kind, const std::string& message, int status = 0, std::string excerpt = {})
      : Error(message), kind_(kind), status_(status), excerpt_(std::move(excerpt)) {}
  Kind kind() const { return kind_; }
  int status() const { return status_; }  // 0 unless kind is Status
  const std::string& body_excerpt() const { return excerpt_; }

 private:
  Kind kind_;
  int status_;
  std::string excerpt_;
};

/// POSTs `args` as a JSON object to `endpoint` and returns the response
/// object. Network failures are retried per `policy`; non-2xx statuses and
/// non-object bodies are not. Throws FunctionCallError.
nlohmann::json call_function(const std::string& endpoint, const nlohmann::json& args,
                             const RetryPolicy& policy = {});

}  // namespace faasflow
