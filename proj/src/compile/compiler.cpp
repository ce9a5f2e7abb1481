#include "faasflow/compile/compiler.hpp"

#include "detail.hpp"

namespace faasflow {

std::string_view to_string(CompileTarget target) {
  return target == CompileTarget::ArgoYaml ? "argo-yaml" : "local-json";
}

std::optional<CompileTarget> parse_compile_target(std::string_view text) {
  if (text == "argo" || text == "argo-yaml") return CompileTarget::ArgoYaml;
  if (text == "local" || text == "local-json") return CompileTarget::LocalJson;
  return std::nullopt;
}

CompiledWorkflow compile(const WorkflowDAG& dag, CompileTarget target) {
  return target == CompileTarget::ArgoYaml ? compile_argo(dag) : compile_local(dag);
}

ValidationReport verify_compiled(const CompiledWorkflow& compiled) {
  return compiled.target == CompileTarget::ArgoYaml ? verify_argo(compiled.document)
                                                    : verify_local(compiled.document);
}

}  // namespace faasflow
