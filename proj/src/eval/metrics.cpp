#include "faasflow/eval/metrics.hpp"

#include <algorithm>
#include <set>
#include <tuple>
#include <vector>

#include "faasflow/core/topology.hpp"

namespace faasflow::eval {

namespace {

const std::string kStartLabel = "START";

double ratio_or_one(std::size_t hits, std::size_t total) {
  return total == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(total);
}

double f1(std::size_t hits, std::size_t truth_total, std::size_t pred_total) {
  if (truth_total == 0 && pred_total == 0) return 1.0;
  if (hits == 0) return 0.0;
  double recall = static_cast<double>(hits) / truth_total;
  double precision = static_cast<double>(hits) / pred_total;
  return 2 * precision * recall / (precision + recall);
}

/// Node id -> ids reachable through one or more edges.
std::map<std::string, std::set<std::string>> reachability(const WorkflowDAG& dag) {
  std::map<std::string, std::vector<std::string>> next;
  for (const auto& e : dag.edges)
    if (!e.from_start()) next[e.source].push_back(e.target);
  std::map<std::string, std::set<std::string>> reach;
  for (const auto& n : dag.nodes) {
    auto& seen = reach[n.node_id];
    std::vector<std::string> stack{n.node_id};
    while (!stack.empty()) {
      auto id = stack.back();
      stack.pop_back();
      for (const auto& t : next[id])
        if (seen.insert(t).second) stack.push_back(t);
    }
  }
  return reach;
}

using EdgeKey = std::tuple<std::string, std::string, std::string>;

std::multiset<EdgeKey> truth_edge_keys(const WorkflowDAG& truth) {
  std::multiset<EdgeKey> keys;
  for (const auto& e : truth.edges) {
    if (!e.binding) continue;
    auto src = e.from_start() ? kStartLabel : truth.find_node(e.source)->function.id;
    keys.emplace(src, truth.find_node(e.target)->function.id, e.binding->target_param);
  }
  return keys;
}

std::multiset<EdgeKey> matched_pred_edge_keys(const WorkflowDAG& pred, const NodeMatching& matching) {
  std::set<std::string> matched;
  for (const auto& [t, p] : matching) matched.insert(p);
  std::multiset<EdgeKey> keys;
  for (const auto& e : pred.edges) {
    if (!e.binding || !matched.count(e.target)) continue;
    if (!e.from_start() && !matched.count(e.source)) continue;
    auto src = e.from_start() ? kStartLabel : pred.find_node(e.source)->function.id;
    keys.emplace(src, pred.find_node(e.target)->function.id, e.binding->target_param);
  }
  return keys;
}

std::size_t multiset_overlap(const std::multiset<EdgeKey>& a, const std::multiset<EdgeKey>& b) {
  std::vector<EdgeKey> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  return common.size();
}

}  // namespace

NodeMatching match_nodes(const WorkflowDAG& pred, const WorkflowDAG& truth) {
  auto pred_order = topological_order(pred);
  std::set<std::string> taken;
  NodeMatching matching;
  for (const auto& t : topological_order(truth)) {
    const auto& fn = truth.find_node(t)->function.id;
    for (const auto& p : pred_order) {
      if (taken.count(p) || pred.find_node(p)->function.id != fn) continue;
      taken.insert(p);
      matching.emplace(t, p);
      break;
    }
  }
  return matching;
}

double score_function_selection(const WorkflowDAG& pred, const WorkflowDAG& truth, MetricMode mode) {
  auto hits = match_nodes(pred, truth).size();
  if (mode == MetricMode::F1) return f1(hits, truth.nodes.size(), pred.nodes.size());
  return std::min(1.0, ratio_or_one(hits, truth.nodes.size()));
}

double score_topological_order(const WorkflowDAG& pred, const WorkflowDAG& truth) {
  auto matching = match_nodes(pred, truth);
  auto truth_reach = reachability(truth);
  auto pred_reach = reachability(pred);
  std::map<std::string, std::size_t> position;
  for (const auto& id : topological_order(pred)) position.emplace(id, position.size());

  std::size_t pairs = 0, kept = 0;
  for (const auto& [a, reachable] : truth_reach)
    for (const auto& b : reachable) {
      ++pairs;
      auto pa = matching.find(a), pb = matching.find(b);
      if (pa == matching.end() || pb == matching.end()) continue;
      const auto& x = pa->second;
      const auto& y = pb->second;
      if (pred_reach[x].count(y)) ++kept;
      else if (!pred_reach[y].count(x) && position[x] < position[y]) ++kept;
    }
  return ratio_or_one(kept, pairs);
}

double score_data_dependency(const WorkflowDAG& pred, const WorkflowDAG& truth, MetricMode mode) {
  auto truth_keys = truth_edge_keys(truth);
  auto pred_keys = matched_pred_edge_keys(pred, match_nodes(pred, truth));
  auto hits = multiset_overlap(truth_keys, pred_keys);
  if (mode == MetricMode::F1) {
    std::size_t pred_total = 0;
    for (const auto& e : pred.edges) pred_total += e.binding.has_value();
    return f1(hits, truth_keys.size(), pred_total);
  }
  return ratio_or_one(hits, truth_keys.size());
}

Scores combine(double selection, double ordering, double dependency, const Weights& weights) {
  double total = weights.selection + weights.ordering + weights.dependency;
  Scores s{selection, ordering, dependency, 0.0};
  if (weights.selection == weights.ordering && weights.ordering == weights.dependency)
    s.overall = (selection + ordering + dependency) / 3;
  else
    s.overall = (weights.selection * selection + weights.ordering * ordering + weights.dependency * dependency) / total;
  return s;
}

Scores score_all(const WorkflowDAG& pred, const WorkflowDAG& truth, MetricMode mode, const Weights& weights) {
  return combine(score_function_selection(pred, truth, mode), score_topological_order(pred, truth),
                 score_data_dependency(pred, truth, mode), weights);
}

}  // namespace faasflow::eval
