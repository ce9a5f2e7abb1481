#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "faasflow/core/model.hpp"
#include "faasflow/core/serialize.hpp"
#include "faasflow/repo/embedding.hpp"

namespace faasflow {

struct RankedFunction {
  FunctionSpec function;
  double score = 0.0;  // cosine similarity to the query
};

class InvalidFunctionError : public Error {
 public:
  InvalidFunctionError(std::string id, std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

class EmptyRepositoryError : public Error {
 public:
  EmptyRepositoryError() : Error("function repository is empty") {}
};

/// Text embedded for retrieval: name, description and every
/// "param: description" pair of inputs and outputs.
std::string embedding_text(const FunctionSpec& spec);

/// Reads a function spec file holding either one spec object or an array of
/// them. Throws ParseError.
std::vector<FunctionSpec> load_function_file(const std::filesystem::path& path);

/// Function store with brute-force cosine retrieval. Readers work on an
/// immutable snapshot; registration swaps in a new one.
class FunctionRepository {
 public:
  static constexpr std::size_t kDefaultTopK = 5;

  struct Entry {
    FunctionSpec spec;
    EmbeddingVector embedding;
  };
  /// Entries sorted by function id.
  using Snapshot = std::shared_ptr<const std::vector<Entry>>;

  explicit FunctionRepository(std::shared_ptr<const EmbeddingProvider> provider);

  FunctionRepository(const FunctionRepository&) = delete;
  FunctionRepository& operator=(const FunctionRepository&) = delete;

  /// Throws InvalidFunctionError, DuplicateIdError, or the provider's error.
  std::string register_function(FunctionSpec spec);
  /// All-or-nothing bulk registration; one snapshot swap.
  void register_functions(std::vector<FunctionSpec> specs);

  /// At most k functions by descending similarity, ties by ascending id.
  /// Throws EmptyRepositoryError, std::invalid_argument for k == 0.
  std::vector<RankedFunction> top_k(std::string_view query, std::size_t k = kDefaultTopK) const;
  std::vector<RankedFunction> top_k(const EmbeddingVector& query, std::size_t k) const;

  std::optional<FunctionSpec> find(std::string_view id) const;
  std::vector<FunctionSpec> list() const;
  std::size_t size() const;
  Snapshot snapshot() const;
  FunctionResolver resolver() const;
  const EmbeddingProvider& provider() const { return *provider_; }

  /// Writes functions/<id>.json per spec plus embeddings.json keyed by
  /// provider id then function id. Entries for other providers are kept.
  void save(const std::filesystem::path& dir) const;
  /// Loads a saved directory; embeddings missing for this provider are
  /// recomputed. A missing directory yields an empty repository.
  static std::unique_ptr<FunctionRepository> load(
      const std::filesystem::path& dir, std::shared_ptr<const EmbeddingProvider> provider);

 private:
  void insert(std::vector<Entry> entries);

  std::shared_ptr<const EmbeddingProvider> provider_;
  mutable std::shared_mutex mutex_;
  Snapshot entries_;
};

}  // namespace faasflow
