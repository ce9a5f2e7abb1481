#include "faasflow/repo/embedding.hpp"

#include <cctype>
#include <cmath>

#include <json.hpp>

#include "faasflow/core/digest.hpp"
#include "faasflow/net/http.hpp"

namespace faasflow {

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension()) {
    throw EmbeddingError("dimension mismatch: " + std::to_string(a.dimension()) + " vs " +
                         std::to_string(b.dimension()));
  }
  double dot = 0.0;
  double norm_a = 0.0;
  double norm_b = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    norm_a += a.values[i] * a.values[i];
    norm_b += b.values[i] * b.values[i];
  }
  if (norm_a == 0.0 || norm_b == 0.0) throw EmbeddingError("cosine of a zero vector");
  return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

EmbeddingVector EmbeddingProvider::embed(std::string_view text) const {
  if (text.empty()) throw EmbeddingError("cannot embed empty text");
  auto vector = embed_nonempty(text);
  if (vector.dimension() != dimension()) {
    throw EmbeddingError(id() + " returned dimension " + std::to_string(vector.dimension()) +
                         ", expected " + std::to_string(dimension()));
  }
  return vector;
}

EmbeddingVector TokenHashEmbedder::embed_nonempty(std::string_view text) const {
  EmbeddingVector out{std::vector<double>(kDimension, 0.0)};
  std::string token;
  bool any = false;
  auto flush = [&] {
    if (token.empty()) return;
    out.values[fnv1a64(token) % kDimension] += 1.0;
    any = true;
    token.clear();
  };
  for (char c : text) {
    auto uc = static_cast<unsigned char>(c);
    if (std::isalnum(uc) || uc >= 0x80) {
      token.push_back(static_cast<char>(std::tolower(uc)));
    } else {
      flush();
    }
  }
  flush();
  // Punctuation-only text still gets a non-zero vector.
  if (!any) out.values[fnv1a64(text) % kDimension] = 1.0;

  double norm = 0.0;
  for (double v : out.values) norm += v * v;
  norm = std::sqrt(norm);
  for (double& v : out.values) v /= norm;
  return out;
}

HttpEmbedder::HttpEmbedder(Options options) : options_(std::move(options)) {}

EmbeddingVector HttpEmbedder::embed_nonempty(std::string_view text) const {
  nlohmann::json request = {{"model", options_.model}, {"input", std::string(text)}};
  net::Headers headers;
  if (!options_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + options_.api_key);
  auto base = options_.base_url;
  while (!base.empty() && base.back() == '/') base.pop_back();
  auto response = net::post_json(base + "/embeddings", request.dump(), headers, options_.timeout);
  if (response.status < 200 || response.status >= 300) {
    auto message = "embedding service returned " + std::to_string(response.status);
    if (response.status >= 500) throw UnavailableError(message);
    throw EmbeddingError(message + ": " + response.body.substr(0, 200));
  }
  try {
    auto doc = nlohmann::json::parse(response.body);
    EmbeddingVector out;
    out.values = doc.at("data").at(0).at("embedding").get<std::vector<double>>();
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw EmbeddingError(std::string("malformed embedding response: ") + e.what());
  }
}

}  // namespace faasflow
