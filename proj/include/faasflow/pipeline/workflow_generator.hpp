#pragma once

#include <string>
#include <vector>

#include "faasflow/core/model.hpp"
#include "faasflow/llm/gateway.hpp"
#include "faasflow/pipeline/errors.hpp"
#include "faasflow/pipeline/func_identifier.hpp"

namespace faasflow {

/// Outputs of the nodes ordered before the node being classified.
struct OutputCatalog {
  struct Entry {
    std::string node_id;
    ParameterSpec output;
  };
  std::vector<Entry> entries;

  bool contains(const std::string& node_id, const std::string& output) const;
  std::string render() const;
};

using Classification = llm::Classification;

struct Dataflow {
  std::vector<DataFlowEdge> edges;
  std::vector<ParameterSpec> user_inputs;  // the start node's inputs
};

/// Orders nodes, classifies every input parameter and wires the dataflow.
/// Stateless between calls; one instance may serve concurrent generations.
class WorkflowGenerator {
 public:
  explicit WorkflowGenerator(const llm::LlmGateway& gateway, LlmCallOptions options = {});

  /// A permutation of `nodes` from the order prompt. A single node is
  /// returned as is. Throws OrderingError.
  std::vector<WorkflowNode> order_nodes(const std::vector<WorkflowNode>& nodes,
                                        const UserQuery& query) const;

  /// Input, or an output of a catalog node. An empty catalog yields Input
  /// without an LLM call. Throws ClassificationError.
  Classification classify_parameter(const WorkflowNode& node, const ParameterSpec& param,
                                    const OutputCatalog& catalog, const UserQuery& query) const;

  /// Walks `ordered` front to back, growing the catalog. Required inputs get
  /// exactly one binding; optional inputs classified Input are bound only
  /// when the query supplies them. Nodes left without any incoming edge get
  /// an ordering edge from their predecessor (the start node for the first).
  Dataflow build_dataflow(const std::vector<WorkflowNode>& ordered, const UserQuery& query) const;

  /// Throws AssemblyError when the result fails validate_dag.
  static WorkflowDAG assemble_dag(std::string dag_id, std::vector<WorkflowNode> nodes,
                                  Dataflow dataflow, const UserQuery& query);

  /// order_nodes, build_dataflow, assemble_dag.
  WorkflowDAG generate(std::string dag_id, const std::vector<WorkflowNode>& nodes,
                       const UserQuery& query) const;

 private:
  const llm::LlmGateway& gateway_;
  LlmCallOptions options_;
};

/// Step list as shown to the order prompt.
std::string render_nodes(const std::vector<WorkflowNode>& nodes);

/// Default DAG id for a query: "wf-" plus 12 hex digits of its digest.
std::string default_dag_id(const std::string& query);

/// Full text-to-workflow run: identify, then generate.
WorkflowDAG generate_workflow(const FuncIdentifier& identifier, const WorkflowGenerator& generator,
                              const UserQuery& query, std::string dag_id = {});

}  // namespace faasflow
