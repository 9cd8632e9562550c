#pragma once

#include <string>
#include <string_view>

#include "umig/document.hpp"

namespace umig::doc {

/// Reads the `.docschema.json` format:
///
///   {"name": "...", "documents": [{"name": "...", "properties": [...]}]}
///
/// where each property is an object with `"kind"` one of field, reference or
/// embedded. Throws Error on malformed JSON, dangling targets and duplicates.
DocumentSchema parse_docschema(std::string_view json);

/// Writes the same format with 2-space indentation and a trailing newline.
std::string print_docschema(const DocumentSchema& schema);

}  // namespace umig::doc
