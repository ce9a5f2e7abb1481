#pragma once

#include <string>
#include <vector>

#include "faasflow/core/error.hpp"
#include "faasflow/core/model.hpp"

namespace faasflow {

enum class ViolationKind {
  EmptyNodeId,
  DuplicateNodeId,
  ReservedNodeId,
  InvalidFunction,
  EmptySubtaskText,
  SubtaskIndexGap,
  InvalidUserInput,
  UnknownEdgeEndpoint,
  SelfLoop,
  Cycle,
  Unreachable,
  UnknownTargetParam,
  UnknownSourceParam,
  UnknownUserInput,
  MalformedBinding,
  DuplicateBinding,
  UnboundParameter,
  // Compiled documents.
  DocumentParse,
  DocumentSchema,
  DanglingReference,
  // Warnings only.
  TypeMismatch,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::string locus;    // node id, edge "a->b:param", or user input name
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  std::vector<Violation> violations;
  /// Non-fatal findings (e.g. a string output routed into a number input).
  std::vector<Violation> warnings;

  bool ok() const { return violations.empty(); }
  bool empty() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
  std::string to_string() const;
};

/// Checks every WorkflowDAG invariant. Never throws; violations are data.
ValidationReport validate_dag(const WorkflowDAG& dag);

class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, ValidationReport report)
      : Error(what + ": " + report.to_string()), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

}  // namespace faasflow
