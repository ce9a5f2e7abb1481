#pragma once

#include <string>
#include <vector>

#include "faasflow/core/error.hpp"
#include "faasflow/core/model.hpp"

namespace faasflow {

class CycleError : public Error {
 public:
  explicit CycleError(std::vector<std::string> cycle);
  /// Node ids along one cycle, first node repeated at the end.
  const std::vector<std::string>& cycle() const { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

/// Node ids (start node excluded) such that every edge source precedes its
/// target. Among ready nodes the smallest node_id goes first.
/// Throws CycleError.
std::vector<std::string> topological_order(const WorkflowDAG& dag);

/// Groups nodes by longest edge distance from the start node; level i holds
/// nodes whose longest incoming path has length i+1. Ids sorted within a level.
/// Throws CycleError.
std::vector<std::vector<std::string>> topological_levels(const WorkflowDAG& dag);

/// One directed cycle among the non-start nodes, or empty when acyclic.
std::vector<std::string> find_cycle(const WorkflowDAG& dag);

}  // namespace faasflow
