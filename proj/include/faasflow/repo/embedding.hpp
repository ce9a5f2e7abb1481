#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "faasflow/core/error.hpp"

namespace faasflow {

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dimension() const { return values.size(); }
  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

class EmbeddingError : public Error {
 public:
  using Error::Error;
};

/// dot(a,b) / (|a| |b|). Throws EmbeddingError on dimension mismatch or a
/// zero vector.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// Maps text to a fixed-dimension vector. Implementations must be safe to
/// call concurrently.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  /// Identifies the model; embeddings from different providers never mix.
  virtual std::string id() const = 0;
  virtual std::size_t dimension() const = 0;

  /// Throws EmbeddingError for empty text, UnavailableError when a remote
  /// provider cannot be reached.
  EmbeddingVector embed(std::string_view text) const;

 protected:
  virtual EmbeddingVector embed_nonempty(std::string_view text) const = 0;
};

/// Offline provider: each token (lower-cased, split on whitespace and
/// punctuation) increments one of 256 buckets chosen by FNV-1a; the counts
/// are L2-normalized.
class TokenHashEmbedder final : public EmbeddingProvider {
 public:
  static constexpr std::size_t kDimension = 256;

  std::string id() const override { return "token-hash-256"; }
  std::size_t dimension() const override { return kDimension; }

 protected:
  EmbeddingVector embed_nonempty(std::string_view text) const override;
};

/// Remote provider speaking the common `POST <base>/embeddings` JSON API
/// ({"model", "input"} -> {"data":[{"embedding":[...]}]}).
class HttpEmbedder final : public EmbeddingProvider {
 public:
  struct Options {
    std::string base_url;
    std::string model;
    std::string api_key;
    std::size_t dimension = 384;
    std::chrono::milliseconds timeout{10000};
  };

  explicit HttpEmbedder(Options options);

  std::string id() const override { return "http:" + options_.model; }
  std::size_t dimension() const override { return options_.dimension; }

 protected:
  EmbeddingVector embed_nonempty(std::string_view text) const override;

 private:
  Options options_;
};

}  // namespace faasflow
