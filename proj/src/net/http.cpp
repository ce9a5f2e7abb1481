#include "faasflow/net/http.hpp"

#include <httplib.h>

#include "faasflow/core/error.hpp"
#include "faasflow/core/url.hpp"

namespace faasflow::net {

HttpResponse request(const std::string& method, const std::string& url, const std::string& body,
                     const Headers& headers, std::chrono::milliseconds timeout) {
  auto parsed = parse_url(url);
  httplib::Client client(parsed.origin());
  auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  httplib::Headers http_headers;
  std::string content_type = "text/plain";
  for (const auto& [name, value] : headers) {
    if (name == "Content-Type") {
      content_type = value;
    } else {
      http_headers.emplace(name, value);
    }
  }

  httplib::Result result;
  if (method == "GET") {
    result = client.Get(parsed.path, http_headers);
  } else if (method == "POST") {
    result = client.Post(parsed.path, http_headers, body, content_type);
  } else if (method == "PUT") {
    result = client.Put(parsed.path, http_headers, body, content_type);
  } else if (method == "DELETE") {
    result = client.Delete(parsed.path, http_headers, body, content_type);
  } else {
    throw Error("unsupported HTTP method " + method);
  }
  if (!result)
    throw UnavailableError(method + " " + url + " failed: " + httplib::to_string(result.error()));
  return {result->status, result->body};
}

}  // namespace faasflow::net
