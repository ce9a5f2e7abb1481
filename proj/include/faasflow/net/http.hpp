#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

namespace faasflow::net {

struct HttpResponse {
  int status = 0;
  std::string body;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

/// One blocking request against an absolute http(s) URL. Throws
/// UnavailableError when no response arrives (refused, timeout, reset).
/// Non-2xx statuses are returned, not thrown.
HttpResponse request(const std::string& method, const std::string& url, const std::string& body,
                     const Headers& headers = {},
                     std::chrono::milliseconds timeout = std::chrono::seconds(10));

inline HttpResponse post_json(const std::string& url, const std::string& body,
                              Headers headers = {},
                              std::chrono::milliseconds timeout = std::chrono::seconds(10)) {
  headers.emplace_back("Content-Type", "application/json");
  return request("POST", url, body, headers, timeout);
}

}  // namespace faasflow::net
