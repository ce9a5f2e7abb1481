#include "faasflow/core/url.hpp"

#include <charconv>

#include "faasflow/core/digest.hpp"
#include "faasflow/core/error.hpp"

namespace faasflow {

std::string to_hex(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, value >>= 4) out[i] = kDigits[value & 0xf];
  return out;
}

std::string Url::origin() const {
  bool default_port = (scheme == "http" && port == 80) || (scheme == "https" && port == 443);
  return scheme + "://" + host + (default_port ? "" : ":" + std::to_string(port));
}

Url parse_url(std::string_view text) {
  Url url;
  auto scheme_end = text.find("://");
  if (scheme_end == std::string_view::npos) throw Error("not an absolute URL: " + std::string(text));
  url.scheme = std::string(text.substr(0, scheme_end));
  if (url.scheme != "http" && url.scheme != "https")
    throw Error("unsupported URL scheme '" + url.scheme + "'");
  auto rest = text.substr(scheme_end + 3);
  auto path_start = rest.find('/');
  auto authority = rest.substr(0, path_start);
  url.path = path_start == std::string_view::npos ? "/" : std::string(rest.substr(path_start));
  url.port = url.scheme == "https" ? 443 : 80;
  if (auto colon = authority.rfind(':'); colon != std::string_view::npos &&
                                         authority.find(']') == std::string_view::npos) {
    auto digits = authority.substr(colon + 1);
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), url.port);
    if (ec != std::errc() || ptr != digits.data() + digits.size())
      throw Error("bad port in URL: " + std::string(text));
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) throw Error("URL has no host: " + std::string(text));
  url.host = std::string(authority);
  return url;
}

}  // namespace faasflow
