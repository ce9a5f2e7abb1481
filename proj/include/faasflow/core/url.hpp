#pragma once

#include <string>
#include <string_view>

namespace faasflow {

/// Absolute URL split for the HTTP client: "http://host:8080/a/b" gives
/// origin "http://host:8080" and path "/a/b".
struct Url {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path;

  std::string origin() const;
};

/// Throws Error when `text` is not an absolute http(s) URL.
Url parse_url(std::string_view text);

}  // namespace faasflow
