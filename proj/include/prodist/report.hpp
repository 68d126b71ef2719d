#pragma once

#include <string>

namespace prodist {

// Walks `directory` recursively for manifests, checks every listed file
// against its hash and returns a text summary grouped by ambient dimension.
// Throws ValidationError when no manifest is found or one is corrupt.
std::string emit_report(const std::string& directory);

}  // namespace prodist
