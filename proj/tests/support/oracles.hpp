#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "faasflow/core/model.hpp"
#include "faasflow/llm/backend.hpp"
#include "faasflow/repo/embedding.hpp"

namespace faasflow::testing {

// ---- metric oracles: direct enumeration, no shared code with the scorers ----

/// Kahn order, smallest ready node id first.
std::vector<std::string> oracle_topo(const WorkflowDAG& d);
/// Floyd-Warshall reachability over node-to-node edges.
std::map<std::string, std::map<std::string, bool>> oracle_closure(const WorkflowDAG& d);
/// Per function id, the k-th truth node in topological order pairs with the
/// k-th predicted node of that function.
std::map<std::string, std::string> oracle_matching(const WorkflowDAG& pred, const WorkflowDAG& truth);
double oracle_selection(const WorkflowDAG& pred, const WorkflowDAG& truth);
double oracle_ordering(const WorkflowDAG& pred, const WorkflowDAG& truth);
double oracle_dependency(const WorkflowDAG& pred, const WorkflowDAG& truth);

// ---- execution reference ----

/// Deterministic arithmetic stand-in for a function: every output is a
/// weighted sum of the numeric arguments plus a per-function offset.
nlohmann::json arithmetic(const FunctionSpec& fn, const nlohmann::json& args);

/// Sink outputs ("node.output" keys) computed by recursing into edge sources.
nlohmann::json reference_sink_outputs(const WorkflowDAG& dag, const nlohmann::json& inputs);

std::set<std::string> descendants(const WorkflowDAG& dag, const std::string& root);

// ---- scripted pipeline fuzzing ----

/// Backend answering through a callback.
class CallbackBackend final : public llm::LlmBackend {
 public:
  using Handler = std::function<std::string(const llm::BackendCall&)>;
  explicit CallbackBackend(Handler handler) : handler_(std::move(handler)) {}
  std::string complete(const llm::BackendCall& call) override { return handler_(call); }

 private:
  Handler handler_;
};

/// Random but schema-conforming replies, with occasional malformed ones that
/// the gateway must reject and retry.
class FuzzReplies {
 public:
  FuzzReplies(std::uint64_t seed, std::vector<std::string> plan) : rng_(seed), plan_(std::move(plan)) {}

  std::string operator()(const llm::BackendCall& call);
  /// The most recent order reply that was accepted as well-formed.
  std::vector<std::string> last_order() const;

 private:
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::mt19937_64 rng_;
  std::vector<std::string> plan_;
  std::vector<std::string> last_order_;
  mutable std::mutex mutex_;
};

/// Twelve functions "fn_0".."fn_11" described as "step number <i>", drawing
/// parameter names from a five-name pool.
std::vector<FunctionSpec> fuzz_functions(std::mt19937_64& rng);

/// Broken dataflow rules, empty when the DAG is sound: acyclic, every node
/// reachable from the start node, exactly one binding per required input (at
/// most one per optional input) and every edge source earlier than its target
/// in `order`, the node order the generator worked in.
std::vector<std::string> dataflow_violations(const WorkflowDAG& dag, const std::vector<std::string>& order);

// ---- retrieval reference ----

/// Vectors looked up by the first line of the embedded text.
class TableEmbedder final : public EmbeddingProvider {
 public:
  std::map<std::string, std::vector<double>> table;
  std::string id() const override { return "table"; }
  std::size_t dimension() const override { return table.empty() ? 0 : table.begin()->second.size(); }

 protected:
  EmbeddingVector embed_nonempty(std::string_view text) const override {
    return {table.at(std::string(text.substr(0, text.find('\n'))))};
  }
};

double naive_cosine(const std::vector<double>& a, const std::vector<double>& b);

/// Every function scored against the query vector, best first, ties by id.
std::vector<std::pair<double, std::string>> brute_force_ranking(const TableEmbedder& embedder,
                                                                const std::vector<std::string>& ids,
                                                                const std::string& query);

}  // namespace faasflow::testing
