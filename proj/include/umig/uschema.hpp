#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "umig/error.hpp"

/// The pivot metamodel (union-schema flavor): entity types, relationship
/// types and their features.
namespace umig::us {

/// Upper bound meaning "any number".
inline constexpr int kUnbounded = -1;

struct DataType {
    enum class Kind { String, Integer, Boolean, Double, Decimal, Date };

    Kind kind = Kind::String;
    int precision = 0;  ///< Decimal only
    int scale = 0;      ///< Decimal only

    static DataType of(Kind k) { return DataType{k, 0, 0}; }
    static DataType decimal(int p, int s) { return DataType{Kind::Decimal, p, s}; }

    bool operator==(const DataType&) const = default;
};

/// Spelling used by the textual notation, e.g. "Decimal(4,2)".
std::string to_string(const DataType& t);

/// Inverse of to_string; throws Error on unknown names.
DataType parse_data_type(std::string_view text);

struct Attribute {
    std::string name;
    DataType type;
    bool optional = false;
    /// Name of the Reference (in the same owner) this attribute belongs to.
    std::optional<std::string> owned_by_reference;

    bool operator==(const Attribute&) const = default;
};

struct Key {
    std::string name;
    bool is_id = false;
    std::vector<std::string> attributes;

    bool operator==(const Key&) const = default;
};

struct Reference {
    std::string name;
    std::string refs_to;
    int lower_bound = 0;
    int upper_bound = 1;
    std::vector<std::string> attributes;
    std::optional<std::string> featured_by;

    bool operator==(const Reference&) const = default;
};

struct Aggregate {
    std::string name;
    std::string specified_by;
    int lower_bound = 0;
    int upper_bound = kUnbounded;

    bool operator==(const Aggregate&) const = default;
};

using Feature = std::variant<Attribute, Key, Reference, Aggregate>;

const std::string& feature_name(const Feature& f);
std::string& feature_name(Feature& f);

/// Common shape of entity and relationship types.
struct FeatureOwner {
    std::string name;
    std::vector<Feature> features;

    const Feature* find(std::string_view feature) const;
    Feature* find(std::string_view feature);

    template <class T>
    const T* find_as(std::string_view feature) const {
        const Feature* f = find(feature);
        return f ? std::get_if<T>(f) : nullptr;
    }
    template <class T>
    T* find_as(std::string_view feature) {
        Feature* f = find(feature);
        return f ? std::get_if<T>(f) : nullptr;
    }

    /// The Key with is_id set, if any.
    const Key* id_key() const;

    bool operator==(const FeatureOwner&) const = default;
};

struct EntityType : FeatureOwner {
    bool root = false;

    bool operator==(const EntityType&) const = default;
};

/// One side of a relationship: the Reference named `reference` in entity `entity`.
struct RelationshipRef {
    std::string entity;
    std::string reference;

    bool operator==(const RelationshipRef&) const = default;
};

struct RelationshipType : FeatureOwner {
    std::vector<RelationshipRef> references;

    bool operator==(const RelationshipType&) const = default;
};

struct USchemaModel {
    std::string name;
    int version = 1;
    std::vector<EntityType> entities;
    std::vector<RelationshipType> relationships;

    const EntityType* entity(std::string_view n) const;
    EntityType* entity(std::string_view n);
    const RelationshipType* relationship(std::string_view n) const;
    RelationshipType* relationship(std::string_view n);

    bool operator==(const USchemaModel&) const = default;
};

/// Checks every structural invariant. An empty result means the model is valid.
/// Aggregating a root entity is reported as a warning only.
std::vector<Diagnostic> validate_uschema(const USchemaModel& model);

}  // namespace umig::us
