#include "umig/uschema.hpp"

#include <map>
#include <set>

namespace umig::us {

std::string to_string(const DataType& t) {
    switch (t.kind) {
        case DataType::Kind::String: return "String";
        case DataType::Kind::Integer: return "Integer";
        case DataType::Kind::Boolean: return "Boolean";
        case DataType::Kind::Double: return "Double";
        case DataType::Kind::Date: return "Date";
        case DataType::Kind::Decimal:
            return "Decimal(" + std::to_string(t.precision) + "," + std::to_string(t.scale) + ")";
    }
    return "String";
}

DataType parse_data_type(std::string_view text) {
    using K = DataType::Kind;
    if (text == "String") return DataType::of(K::String);
    if (text == "Integer") return DataType::of(K::Integer);
    if (text == "Boolean") return DataType::of(K::Boolean);
    if (text == "Double") return DataType::of(K::Double);
    if (text == "Date") return DataType::of(K::Date);
    if (text.substr(0, 8) == "Decimal(" && text.back() == ')') {
        auto inner = std::string(text.substr(8, text.size() - 9));
        auto comma = inner.find(',');
        if (comma != std::string::npos) {
            try {
                std::size_t used = 0;
                int p = std::stoi(inner.substr(0, comma), &used);
                if (used == comma) {
                    std::string rest = inner.substr(comma + 1);
                    int s = std::stoi(rest, &used);
                    if (used == rest.size() && p >= s && s >= 0) return DataType::decimal(p, s);
                }
            } catch (const std::exception&) {
            }
        }
    }
    throw Error("unknown data type '" + std::string(text) + "'");
}

const std::string& feature_name(const Feature& f) {
    return std::visit([](const auto& x) -> const std::string& { return x.name; }, f);
}

std::string& feature_name(Feature& f) {
    return std::visit([](auto& x) -> std::string& { return x.name; }, f);
}

const Feature* FeatureOwner::find(std::string_view feature) const {
    for (const auto& f : features)
        if (feature_name(f) == feature) return &f;
    return nullptr;
}

Feature* FeatureOwner::find(std::string_view feature) {
    for (auto& f : features)
        if (feature_name(f) == feature) return &f;
    return nullptr;
}

const Key* FeatureOwner::id_key() const {
    for (const auto& f : features)
        if (const auto* k = std::get_if<Key>(&f); k && k->is_id) return k;
    return nullptr;
}

const EntityType* USchemaModel::entity(std::string_view n) const {
    for (const auto& e : entities)
        if (e.name == n) return &e;
    return nullptr;
}

EntityType* USchemaModel::entity(std::string_view n) {
    for (auto& e : entities)
        if (e.name == n) return &e;
    return nullptr;
}

const RelationshipType* USchemaModel::relationship(std::string_view n) const {
    for (const auto& r : relationships)
        if (r.name == n) return &r;
    return nullptr;
}

RelationshipType* USchemaModel::relationship(std::string_view n) {
    for (auto& r : relationships)
        if (r.name == n) return &r;
    return nullptr;
}

namespace {

struct Checker {
    const USchemaModel& model;
    std::vector<Diagnostic> out;

    void error(std::string code, std::string path, std::string message) {
        out.push_back({Diagnostic::Severity::Error, std::move(code), std::move(path), std::move(message)});
    }
    void warning(std::string code, std::string path, std::string message) {
        out.push_back({Diagnostic::Severity::Warning, std::move(code), std::move(path), std::move(message)});
    }

    static bool bounds_ok(int lo, int hi) {
        if (lo < 0) return false;
        if (hi == kUnbounded) return true;
        return hi >= 1 && lo <= hi;
    }

    void check_owner(const FeatureOwner& owner, bool is_relationship) {
        std::set<std::string> names;
        int ids = 0;
        for (const auto& f : owner.features) {
            const std::string path = owner.name + "." + feature_name(f);
            if (feature_name(f).empty()) error("empty-name", owner.name, "feature with empty name");
            if (!names.insert(feature_name(f)).second)
                error("duplicate feature", path, "feature name is not unique within " + owner.name);

            if (const auto* a = std::get_if<Attribute>(&f)) {
                if (a->type.kind == DataType::Kind::Decimal &&
                    !(a->type.precision >= a->type.scale && a->type.scale >= 0))
                    error("decimal precision", path, "Decimal requires p >= s >= 0");
                if (a->owned_by_reference) {
                    const auto* r = owner.find_as<Reference>(*a->owned_by_reference);
                    if (!r)
                        error("dangling owner reference", path,
                              "owning reference '" + *a->owned_by_reference + "' not found");
                }
            } else if (const auto* k = std::get_if<Key>(&f)) {
                if (k->is_id) ++ids;
                if (k->attributes.empty()) error("empty key", path, "key lists no attributes");
                for (const auto& an : k->attributes)
                    if (!owner.find_as<Attribute>(an))
                        error("foreign key attribute", path,
                              "key attribute '" + an + "' is not an attribute of " + owner.name);
            } else if (const auto* r = std::get_if<Reference>(&f)) {
                if (!model.entity(r->refs_to))
                    error("dangling refsTo", path, "referenced entity '" + r->refs_to + "' is not declared");
                if (!bounds_ok(r->lower_bound, r->upper_bound))
                    error("bounds", path, "invalid reference bounds");
                for (const auto& an : r->attributes)
                    if (!owner.find_as<Attribute>(an))
                        error("reference attribute", path,
                              "reference attribute '" + an + "' is not a feature of " + owner.name);
                if (r->featured_by) {
                    const auto* rt = model.relationship(*r->featured_by);
                    if (!rt) {
                        error("dangling isFeaturedBy", path,
                              "relationship '" + *r->featured_by + "' is not declared");
                    } else {
                        RelationshipRef me{owner.name, r->name};
                        bool listed = false;
                        for (const auto& side : rt->references) listed = listed || side == me;
                        if (!listed)
                            error("unlisted side", path,
                                  "reference is not listed by relationship " + rt->name);
                    }
                }
            } else if (const auto* g = std::get_if<Aggregate>(&f)) {
                const auto* target = model.entity(g->specified_by);
                if (!target)
                    error("dangling specifiedBy", path,
                          "aggregated entity '" + g->specified_by + "' is not declared");
                else if (target->root)
                    warning("aggregate of root", path, "aggregated entity " + target->name + " is a root entity");
                if (!bounds_ok(g->lower_bound, g->upper_bound))
                    error("bounds", path, "invalid aggregate bounds");
                if (is_relationship) error("aggregate in relationship", path, "relationships cannot aggregate");
            }
        }
        if (ids > 1) error("multiple identifiers", owner.name, "more than one key is marked as identifier");
    }

    void run() {
        std::set<std::string> type_names;
        for (const auto& e : model.entities)
            if (!type_names.insert(e.name).second)
                error("duplicate type", e.name, "schema type name is not unique");
        for (const auto& r : model.relationships)
            if (!type_names.insert(r.name).second)
                error("duplicate type", r.name, "schema type name is not unique");

        for (const auto& e : model.entities) check_owner(e, false);
        for (const auto& rt : model.relationships) {
            check_owner(rt, true);
            if (rt.references.size() < 2)
                error("relationship arity", rt.name, "relationship needs at least two references");
            std::set<std::pair<std::string, std::string>> seen;
            for (const auto& side : rt.references) {
                const std::string path = rt.name + "->" + side.entity + "." + side.reference;
                if (!seen.insert({side.entity, side.reference}).second)
                    error("duplicate side", path, "reference listed twice");
                const auto* e = model.entity(side.entity);
                const Reference* r = e ? e->find_as<Reference>(side.reference) : nullptr;
                if (!r) {
                    error("dangling side", path, "listed reference is not a feature of any entity");
                    continue;
                }
                if (r->featured_by != rt.name)
                    error("side isFeaturedBy", path, "listed reference is not featured by " + rt.name);
            }
        }
    }
};

}  // namespace

std::vector<Diagnostic> validate_uschema(const USchemaModel& model) {
    Checker c{model, {}};
    c.run();
    return std::move(c.out);
}

}  // namespace umig::us
