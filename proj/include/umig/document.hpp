#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "umig/error.hpp"

namespace umig::doc {

enum class Primitive { Boolean, Integer, Double, String };

std::string to_string(Primitive p);
Primitive parse_primitive(std::string_view text);

/// A primitive, or an array of primitives.
struct DocType {
    Primitive kind = Primitive::String;
    bool is_array = false;

    bool operator==(const DocType&) const = default;
};

struct Field {
    std::string name;
    DocType type;
    bool is_key = false;

    bool operator==(const Field&) const = default;
};

struct DocReference {
    std::string name;
    std::string target;  ///< document type name
    DocType type;

    bool operator==(const DocReference&) const = default;
};

struct Property;

/// Nested document, single or many.
struct Embedded {
    std::string name;
    std::vector<Property> aggregates;
    bool is_many = false;

    const Property* find(std::string_view n) const;
};

struct Property {
    std::variant<Field, DocReference, Embedded> node;

    const std::string& name() const;
};

bool operator==(const Embedded& a, const Embedded& b);
bool operator==(const Property& a, const Property& b);

struct DocumentType {
    std::string name;
    std::vector<Property> properties;

    const Property* find(std::string_view n) const;
    /// The Field with is_key set, if any.
    const Field* key_field() const;

    bool operator==(const DocumentType&) const = default;
};

struct DocumentSchema {
    std::string name;
    std::vector<DocumentType> documents;

    const DocumentType* document(std::string_view n) const;

    bool operator==(const DocumentSchema&) const = default;
};

/// Structural checks. A reference whose primitive kind differs from the
/// target key's kind is a warning.
std::vector<Diagnostic> validate_docschema(const DocumentSchema& schema);

}  // namespace umig::doc
