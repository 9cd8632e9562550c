#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "umig/document.hpp"
#include "umig/relational.hpp"
#include "umig/trace.hpp"
#include "umig/uschema.hpp"

namespace umig {

/// Datatype correspondences between the three metamodels.
namespace type_map {

us::DataType rel_to_us(const rel::SqlType& t);
doc::Primitive us_to_doc(const us::DataType& t);
us::DataType doc_to_us(doc::Primitive p);
rel::SqlType us_to_rel(const us::DataType& t);

}  // namespace type_map

/// Naive English plural: unchanged when ending in `s`, consonant+`y` -> `ies`,
/// otherwise append `s`.
std::string plural(std::string_view name);

/// Inverse of plural on its image: `ies` -> `y`, else drop one trailing `s`.
std::string singular(std::string_view name);

template <class Model>
struct TransformResult {
    Model target;
    TraceStore trace;
    std::vector<std::string> warnings;
};

/// Relational schema to pivot model. Tables become root entity types except
/// weak tables that nobody else references (embedded through an Aggregate in
/// their owner) and associative tables (relationship types). Throws Error on
/// invalid schemas and cyclic weak-table chains.
TransformResult<us::USchemaModel> rel_to_uschema(const rel::RelationalSchema& schema);

/// Pivot model to document schema: root entities and relationship types
/// become document types; aggregates become embedded objects.
TransformResult<doc::DocumentSchema> uschema_to_document(const us::USchemaModel& model);

/// Document schema back to a pivot model. Every document type becomes a root
/// entity; relationship types and non-identifier keys cannot be recovered.
TransformResult<us::USchemaModel> document_to_uschema(const doc::DocumentSchema& schema);

/// Pivot model back to a relational schema, rebuilding weak tables from
/// aggregates and associative tables from relationship types.
TransformResult<rel::RelationalSchema> uschema_to_relational(const us::USchemaModel& model);

}  // namespace umig
