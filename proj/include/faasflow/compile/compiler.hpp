#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "faasflow/core/error.hpp"
#include "faasflow/core/model.hpp"
#include "faasflow/core/validate.hpp"

namespace faasflow {

enum class CompileTarget { ArgoYaml, LocalJson };

std::string_view to_string(CompileTarget target);
/// Accepts "argo", "argo-yaml", "local" and "local-json".
std::optional<CompileTarget> parse_compile_target(std::string_view text);

struct CompiledWorkflow {
  CompileTarget target = CompileTarget::ArgoYaml;
  std::string document;
  std::string dag_id;
  std::vector<std::string> entry_params;  // user-input names
};

class CompileError : public Error {
 public:
  using Error::Error;
};

/// Argo Workflow manifest: a "main" dag template whose tasks mirror the
/// nodes (sorted by name) plus one HTTP template per distinct function.
/// Throws ValidationError for an invalid DAG.
CompiledWorkflow compile_argo(const WorkflowDAG& dag);

/// Document executed by the built-in orchestrator; see LocalPlan.
/// Throws ValidationError for an invalid DAG.
CompiledWorkflow compile_local(const WorkflowDAG& dag);

CompiledWorkflow compile(const WorkflowDAG& dag, CompileTarget target);

/// Empty iff the document parses and every reference inside it resolves.
/// Never throws.
ValidationReport verify_compiled(const CompiledWorkflow& compiled);

/// Argo template name for a function id: "fn-" plus the id lower-cased with
/// '_' and '.' mapped to '-'.
std::string argo_template_name(std::string_view function_id);

/// Annotation carrying the original function id on each HTTP template.
inline constexpr std::string_view kFunctionIdAnnotation = "faasflow.io/function-id";

}  // namespace faasflow
