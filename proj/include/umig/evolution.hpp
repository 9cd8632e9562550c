#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "umig/trace.hpp"
#include "umig/uschema.hpp"

/// Schema-only evolution scripts over the pivot model.
namespace umig::evo {

struct RenameEntity {
    std::string old_name;
    std::string new_name;
    bool operator==(const RenameEntity&) const = default;
};

struct RenameFeature {
    std::string entity;
    std::string old_name;
    std::string new_name;
    bool operator==(const RenameFeature&) const = default;
};

struct CastAttr {
    std::string entity;
    std::string attribute;
    us::DataType type;
    bool operator==(const CastAttr&) const = default;
};

/// Turns a reference into an aggregate of the referenced entity.
struct MorphRef {
    std::string entity;
    std::string reference;
    std::string new_name;
    bool operator==(const MorphRef&) const = default;
};

struct DeleteFeature {
    std::string entity;
    std::string feature;
    bool operator==(const DeleteFeature&) const = default;
};

using ChangeOp = std::variant<RenameEntity, RenameFeature, CastAttr, MorphRef, DeleteFeature>;

/// One statement per line, keywords case-insensitive, `//` comments:
///
///   RENAME ENTITY User TO AppUser
///   RENAME Song::duration TO length
///   CAST ATTR Song::length TO Integer
///   MORPH REF Song::styles TO styles
///   DELETE Listening::status
std::vector<ChangeOp> parse_orion(std::string_view text);

std::string to_string(const ChangeOp& op);

struct EvolutionResult {
    us::USchemaModel model;
    TraceStore trace;
};

/// Applies `ops` in order to copies of `model` and `trace`, keeping trace ids
/// in step with renames, morphs and deletions. Throws Error (leaving the
/// inputs as they were) when an operation does not apply.
EvolutionResult apply_changes(const us::USchemaModel& model, const std::vector<ChangeOp>& ops,
                              const TraceStore& trace);

}  // namespace umig::evo
