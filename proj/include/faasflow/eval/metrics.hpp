#pragma once

#include <map>
#include <string>

#include "faasflow/core/model.hpp"

namespace faasflow::eval {

/// Recall divides by the ground truth only; F1 also penalizes extra
/// predicted nodes and edges (selection and dependency).
enum class MetricMode { Recall, F1 };

struct Weights {
  double selection = 1.0 / 3;
  double ordering = 1.0 / 3;
  double dependency = 1.0 / 3;
};

struct Scores {
  double selection = 0.0;
  double ordering = 0.0;
  double dependency = 0.0;
  double overall = 0.0;

  friend bool operator==(const Scores&, const Scores&) = default;
};

/// Truth node id -> predicted node id. Truth nodes are visited in
/// topological order and each takes the first unmatched predicted node
/// (in the prediction's topological order) with the same function id.
using NodeMatching = std::map<std::string, std::string>;

NodeMatching match_nodes(const WorkflowDAG& pred, const WorkflowDAG& truth);

/// Matched nodes over truth nodes. An empty truth scores 1.
double score_function_selection(const WorkflowDAG& pred, const WorkflowDAG& truth,
                                MetricMode mode = MetricMode::Recall);

/// Fraction of truth pairs (a, b), b reachable from a, that the prediction
/// keeps in order: the matched b is reachable from the matched a, or the two
/// are unconnected and a comes first in the prediction's topological order.
/// Pairs with an unmatched end fail. No pairs scores 1.
double score_topological_order(const WorkflowDAG& pred, const WorkflowDAG& truth);

/// Binding edges compared as (source function id or START, target function
/// id, target parameter), multiset intersection over truth edges. Predicted
/// edges touching unmatched nodes never count. No truth edges scores 1.
double score_data_dependency(const WorkflowDAG& pred, const WorkflowDAG& truth,
                             MetricMode mode = MetricMode::Recall);

/// Weighted mean of the three; weights are normalized to sum to 1.
Scores score_all(const WorkflowDAG& pred, const WorkflowDAG& truth, MetricMode mode = MetricMode::Recall,
                 const Weights& weights = {});

Scores combine(double selection, double ordering, double dependency, const Weights& weights = {});

}  // namespace faasflow::eval
