#include "umig/document.hpp"

#include <set>

namespace umig::doc {

std::string to_string(Primitive p) {
    switch (p) {
        case Primitive::Boolean: return "BOOLEAN";
        case Primitive::Integer: return "INTEGER";
        case Primitive::Double: return "DOUBLE";
        case Primitive::String: return "STRING";
    }
    return "STRING";
}

Primitive parse_primitive(std::string_view text) {
    if (text == "BOOLEAN") return Primitive::Boolean;
    if (text == "INTEGER") return Primitive::Integer;
    if (text == "DOUBLE") return Primitive::Double;
    if (text == "STRING") return Primitive::String;
    throw Error("unknown document type '" + std::string(text) + "'");
}

const std::string& Property::name() const {
    return std::visit([](const auto& x) -> const std::string& { return x.name; }, node);
}

bool operator==(const Embedded& a, const Embedded& b) {
    return a.name == b.name && a.is_many == b.is_many && a.aggregates == b.aggregates;
}

bool operator==(const Property& a, const Property& b) { return a.node == b.node; }

const Property* Embedded::find(std::string_view n) const {
    for (const auto& p : aggregates)
        if (p.name() == n) return &p;
    return nullptr;
}

const Property* DocumentType::find(std::string_view n) const {
    for (const auto& p : properties)
        if (p.name() == n) return &p;
    return nullptr;
}

const Field* DocumentType::key_field() const {
    for (const auto& p : properties)
        if (const auto* f = std::get_if<Field>(&p.node); f && f->is_key) return f;
    return nullptr;
}

const DocumentType* DocumentSchema::document(std::string_view n) const {
    for (const auto& d : documents)
        if (d.name == n) return &d;
    return nullptr;
}

namespace {

struct Checker {
    const DocumentSchema& schema;
    std::vector<Diagnostic> out;

    void add(Diagnostic::Severity s, std::string code, std::string path, std::string msg) {
        out.push_back({s, std::move(code), std::move(path), std::move(msg)});
    }

    void properties(const std::vector<Property>& props, const std::string& path, bool top_level) {
        std::set<std::string> names;
        int keys = 0;
        for (const auto& p : props) {
            const std::string here = path + "." + p.name();
            if (!names.insert(p.name()).second)
                add(Diagnostic::Severity::Error, "duplicate property", here, "property name is not unique");
            if (const auto* f = std::get_if<Field>(&p.node)) {
                if (f->is_key) {
                    ++keys;
                    if (f->type.is_array)
                        add(Diagnostic::Severity::Error, "array key", here, "key field must be primitive");
                }
            } else if (const auto* r = std::get_if<DocReference>(&p.node)) {
                const DocumentType* target = schema.document(r->target);
                if (!target) {
                    add(Diagnostic::Severity::Error, "dangling reference", here,
                        "target document type '" + r->target + "' is not declared");
                } else if (const Field* k = target->key_field(); k && k->type.kind != r->type.kind) {
                    add(Diagnostic::Severity::Warning, "reference kind", here,
                        "stored identifier kind differs from the key of " + target->name);
                }
            } else if (const auto* e = std::get_if<Embedded>(&p.node)) {
                properties(e->aggregates, path + "." + e->name, false);
            }
        }
        if (keys > 1)
            add(Diagnostic::Severity::Error, "multiple keys", path,
                top_level ? "more than one key field" : "more than one key field in embedded object");
    }

    void run() {
        std::set<std::string> names;
        for (const auto& d : schema.documents) {
            if (!names.insert(d.name).second)
                add(Diagnostic::Severity::Error, "duplicate document type", d.name, "name is not unique");
            properties(d.properties, d.name, true);
        }
    }
};

}  // namespace

std::vector<Diagnostic> validate_docschema(const DocumentSchema& schema) {
    Checker c{schema, {}};
    c.run();
    return std::move(c.out);
}

}  // namespace umig::doc
