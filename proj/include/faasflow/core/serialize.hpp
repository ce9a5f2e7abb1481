#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "faasflow/core/model.hpp"

namespace faasflow {

using Json = nlohmann::json;

/// Looks up a function by id when a document only names it.
using FunctionResolver = std::function<std::optional<FunctionSpec>(std::string_view id)>;

Json parameter_to_json(const ParameterSpec& param, bool with_required = true);
ParameterSpec parameter_from_json(const Json& doc, const std::string& path);

/// Function spec file entry: {id, name, description, endpoint, inputs, outputs}.
Json function_to_json(const FunctionSpec& spec);
/// Throws ParseError locating the offending field.
FunctionSpec function_from_json(const Json& doc, const std::string& path = "$");

/// Canonical document: sorted keys, two-space indentation, trailing newline,
/// nodes and edges in canonicalize() order. Throws ValidationError when the
/// DAG is invalid.
std::string canonical_serialize(const WorkflowDAG& dag);
Json dag_to_json(const WorkflowDAG& dag);

/// Parses a canonical document. Functions are resolved through `resolve`.
/// Throws ParseError on malformed syntax, unknown data types, unknown
/// functions and missing fields; DuplicateIdError on repeated node ids or
/// user input names.
WorkflowDAG parse_dag(std::string_view text, const FunctionResolver& resolve);
WorkflowDAG dag_from_json(const Json& doc, const FunctionResolver& resolve);

/// Serializes JSON with sorted keys and two-space indentation, newline-terminated.
std::string dump_pretty(const Json& doc);

/// Parses JSON text, converting syntax failures to ParseError with position.
Json parse_json(std::string_view text, const std::string& what);

}  // namespace faasflow
