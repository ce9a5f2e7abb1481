#pragma once

#include <string_view>
#include <vector>

#include "faasflow/core/model.hpp"

namespace faasflow {

/// Reads an Argo Workflow manifest back into a WorkflowDAG so that generated
/// manifests can be scored against ground truth. Each task becomes a node
/// named after the task; its function is looked up among `known` by the
/// template's function-id annotation, then by template name, then by URL.
/// Unknown templates yield a placeholder function named after the template.
/// Argument references become edges and bare dependencies ordering edges.
/// The result is not validated. Throws ParseError on unreadable YAML or a
/// manifest without a dag template.
WorkflowDAG import_argo(std::string_view document, const std::vector<FunctionSpec>& known);

}  // namespace faasflow
