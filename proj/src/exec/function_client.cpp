#include "faasflow/exec/function_client.hpp"

#include <thread>

#include "faasflow/net/http.hpp"

namespace faasflow {

namespace {

std::string excerpt(const std::string& body) {
  constexpr std::size_t kMax = 200;
  return body.size() <= kMax ? body : body.substr(0, kMax) + "...";
}

}  // namespace

nlohmann::json call_function(const std::string& endpoint, const nlohmann::json& args,
                             const RetryPolicy& policy) {
  net::HttpResponse response;
  for (int attempt = 0;; ++attempt) {
    try {
      response = net::post_json(endpoint, args.dump(), {}, policy.timeout);
      break;
    } catch (const UnavailableError& e) {
      if (attempt >= policy.retries)
        throw FunctionCallError(FunctionCallError::Kind::Network,
                                std::string(e.what()) + " after " + std::to_string(attempt + 1) + " attempts");
      std::this_thread::sleep_for(policy.backoff);
    }
  }
  if (response.status < 200 || response.status >= 300)
    throw FunctionCallError(FunctionCallError::Kind::Status,
                            endpoint + " answered " + std::to_string(response.status) + ": " + excerpt(response.body),
                            response.status, excerpt(response.body));
  auto parsed = nlohmann::json::parse(response.body, nullptr, false);
  if (parsed.is_discarded() || !parsed.is_object())
    throw FunctionCallError(FunctionCallError::Kind::Parse,
                            endpoint + " returned a body that is not a JSON object: " + excerpt(response.body),
                            response.status, excerpt(response.body));
  return parsed;
}

}  // namespace faasflow
