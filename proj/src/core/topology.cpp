#include "faasflow/core/topology.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace faasflow {

namespace {

struct Adjacency {
  std::map<std::string, std::set<std::string>> successors;
  std::map<std::string, std::size_t> in_degree;
};

// Node-to-node adjacency; start-node edges and dangling edges are dropped.
Adjacency build_adjacency(const WorkflowDAG& dag) {
  Adjacency adj;
  for (const auto& node : dag.nodes) {
    adj.successors[node.node_id];
    adj.in_degree[node.node_id];
  }
  for (const auto& edge : dag.edges) {
    if (edge.from_start()) continue;
    if (!adj.successors.contains(edge.source) || !adj.successors.contains(edge.target))
      continue;
    if (adj.successors[edge.source].insert(edge.target).second) ++adj.in_degree[edge.target];
  }
  return adj;
}

std::string join(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += " -> ";
    out += id;
  }
  return out;
}

}  // namespace

CycleError::CycleError(std::vector<std::string> cycle)
    : Error("cycle detected: " + join(cycle)), cycle_(std::move(cycle)) {}

std::vector<std::string> find_cycle(const WorkflowDAG& dag) {
  auto adj = build_adjacency(dag);
  enum class Mark { White, Grey, Black };
  std::map<std::string, Mark> mark;
  std::vector<std::string> stack;
  std::vector<std::string> cycle;

  auto visit = [&](auto&& self, const std::string& id) -> bool {
    mark[id] = Mark::Grey;
    stack.push_back(id);
    for (const auto& next : adj.successors[id]) {
      if (mark[next] == Mark::Grey) {
        auto it = std::find(stack.begin(), stack.end(), next);
        cycle.assign(it, stack.end());
        cycle.push_back(next);
        return true;
      }
      if (mark[next] == Mark::White && self(self, next)) return true;
    }
    stack.pop_back();
    mark[id] = Mark::Black;
    return false;
  };

  for (const auto& [id, _] : adj.successors) {
    if (mark[id] == Mark::White && visit(visit, id)) return cycle;
  }
  return {};
}

std::vector<std::string> topological_order(const WorkflowDAG& dag) {
  auto adj = build_adjacency(dag);
  std::set<std::string> ready;
  for (const auto& [id, degree] : adj.in_degree) {
    if (degree == 0) ready.insert(id);
  }
  std::vector<std::string> order;
  order.reserve(adj.in_degree.size());
  while (!ready.empty()) {
    auto id = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(id);
    for (const auto& next : adj.successors[id]) {
      if (--adj.in_degree[next] == 0) ready.insert(next);
    }
  }
  if (order.size() != adj.in_degree.size()) throw CycleError(find_cycle(dag));
  return order;
}

std::vector<std::vector<std::string>> topological_levels(const WorkflowDAG& dag) {
  auto order = topological_order(dag);
  auto adj = build_adjacency(dag);
  std::map<std::string, std::size_t> level;
  std::size_t depth = 0;
  for (const auto& id : order) {
    auto& mine = level[id];
    mine = std::max<std::size_t>(mine, 1);
    depth = std::max(depth, mine);
    for (const auto& next : adj.successors[id]) level[next] = std::max(level[next], mine + 1);
  }
  std::vector<std::vector<std::string>> levels(depth);
  for (const auto& [id, l] : level) levels[l - 1].push_back(id);
  return levels;
}

}  // namespace faasflow
