#pragma once

#include <string_view>

#include "faasflow/core/validate.hpp"

namespace faasflow {

ValidationReport verify_argo(std::string_view document);
ValidationReport verify_local(std::string_view document);

}  // namespace faasflow
