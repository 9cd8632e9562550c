#include "umig/model_json.hpp"

#include <json.hpp>

#include "umig/athena.hpp"
#include "umig/ddl.hpp"
#include "umig/docschema_json.hpp"
#include "umig/io.hpp"

namespace umig {

namespace {

using json = nlohmann::ordered_json;

json parse_json(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("invalid ") + what + " JSON: " + e.what());
    }
}

template <class T>
T get(const json& j, const char* key, const char* ctx) {
    if (!j.is_object() || !j.contains(key)) throw Error(std::string(ctx) + ": missing \"" + key + "\"");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(std::string(ctx) + ": bad \"" + key + "\"");
    }
}

const json& array_at(const json& j, const char* key, const char* ctx) {
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_array())
        throw Error(std::string(ctx) + ": \"" + key + "\" must be an array");
    return j.at(key);
}

void expect_kind(const json& j, const char* kind) {
    if (get<std::string>(j, "kind", "model") != kind)
        throw Error(std::string("expected a model of kind \"") + kind + "\"");
}

json bound(int b) { return b == us::kUnbounded ? json("*") : json(b); }

int parse_bound(const json& j, const char* key, const char* ctx) {
    if (!j.contains(key)) throw Error(std::string(ctx) + ": missing \"" + key + "\"");
    const json& v = j.at(key);
    if (v.is_string() && v.get<std::string>() == "*") return us::kUnbounded;
    if (v.is_number_integer()) return v.get<int>();
    throw Error(std::string(ctx) + ": bad \"" + key + "\"");
}

json features_json(const us::FeatureOwner& o) {
    json arr = json::array();
    for (const auto& f : o.features) {
        json j;
        if (const auto* a = std::get_if<us::Attribute>(&f)) {
            j = {{"kind", "attribute"}, {"name", a->name}, {"type", us::to_string(a->type)}, {"optional", a->optional}};
            if (a->owned_by_reference) j["ownedBy"] = *a->owned_by_reference;
        } else if (const auto* k = std::get_if<us::Key>(&f)) {
            j = {{"kind", "key"}, {"name", k->name}, {"isId", k->is_id}, {"attributes", k->attributes}};
        } else if (const auto* r = std::get_if<us::Reference>(&f)) {
            j = {{"kind", "reference"},
                 {"name", r->name},
                 {"refsTo", r->refs_to},
                 {"lower", r->lower_bound},
                 {"upper", bound(r->upper_bound)},
                 {"attributes", r->attributes}};
            if (r->featured_by) j["featuredBy"] = *r->featured_by;
        } else {
            const auto& g = std::get<us::Aggregate>(f);
            j = {{"kind", "aggregate"},
                 {"name", g.name},
                 {"specifiedBy", g.specified_by},
                 {"lower", g.lower_bound},
                 {"upper", bound(g.upper_bound)}};
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

void parse_features(const json& arr, us::FeatureOwner& o) {
    for (const auto& j : arr) {
        const auto kind = get<std::string>(j, "kind", "feature");
        const auto name = get<std::string>(j, "name", "feature");
        const std::string ctx = o.name + "." + name;
        if (kind == "attribute") {
            us::Attribute a{name, us::parse_data_type(get<std::string>(j, "type", ctx.c_str())),
                            get<bool>(j, "optional", ctx.c_str()), std::nullopt};
            if (j.contains("ownedBy")) a.owned_by_reference = get<std::string>(j, "ownedBy", ctx.c_str());
            o.features.emplace_back(std::move(a));
        } else if (kind == "key") {
            o.features.emplace_back(us::Key{name, get<bool>(j, "isId", ctx.c_str()),
                                            get<std::vector<std::string>>(j, "attributes", ctx.c_str())});
        } else if (kind == "reference") {
            us::Reference r{name,
                            get<std::string>(j, "refsTo", ctx.c_str()),
                            parse_bound(j, "lower", ctx.c_str()),
                            parse_bound(j, "upper", ctx.c_str()),
                            get<std::vector<std::string>>(j, "attributes", ctx.c_str()),
                            std::nullopt};
            if (j.contains("featuredBy")) r.featured_by = get<std::string>(j, "featuredBy", ctx.c_str());
            o.features.emplace_back(std::move(r));
        } else if (kind == "aggregate") {
            o.features.emplace_back(us::Aggregate{name, get<std::string>(j, "specifiedBy", ctx.c_str()),
                                                  parse_bound(j, "lower", ctx.c_str()),
                                                  parse_bound(j, "upper", ctx.c_str())});
        } else {
            throw Error(ctx + ": unknown feature kind \"" + kind + "\"");
        }
    }
}

}  // namespace

std::string print_relational_json(const rel::RelationalSchema& s) {
    json j;
    j["kind"] = "relational";
    j["name"] = s.name;
    j["tables"] = json::array();
    for (const auto& t : s.tables) {
        json tj;
        tj["name"] = t.name;
        tj["columns"] = json::array();
        for (const auto& c : t.columns) {
            json cj = {{"name", c.name}, {"type", rel::to_string(c.type)}, {"nullable", c.nullable}};
            if (c.default_value) cj["default"] = *c.default_value;
            tj["columns"].push_back(std::move(cj));
        }
        tj["keys"] = json::array();
        for (const auto& k : t.keys)
            tj["keys"].push_back({{"name", k.constraint_name}, {"primary", k.is_pk}, {"columns", k.columns}});
        tj["foreignKeys"] = json::array();
        for (const auto& f : t.fkeys)
            tj["foreignKeys"].push_back({{"name", f.constraint_name},
                                         {"columns", f.columns},
                                         {"refTable", f.ref_table},
                                         {"refKey", f.ref_key},
                                         {"onDelete", rel::to_string(f.on_delete)},
                                         {"onUpdate", rel::to_string(f.on_update)}});
        j["tables"].push_back(std::move(tj));
    }
    return j.dump(2) + "\n";
}

rel::RelationalSchema parse_relational_json(std::string_view text) {
    const json j = parse_json(text, "relational model");
    expect_kind(j, "relational");
    rel::RelationalSchema s;
    s.name = get<std::string>(j, "name", "schema");
    for (const auto& tj : array_at(j, "tables", "schema")) {
        rel::Table t;
        t.name = get<std::string>(tj, "name", "table");
        const char* ctx = t.name.c_str();
        for (const auto& cj : array_at(tj, "columns", ctx)) {
            rel::Column c;
            c.name = get<std::string>(cj, "name", ctx);
            c.type = rel::parse_sql_type(get<std::string>(cj, "type", ctx));
            c.nullable = get<bool>(cj, "nullable", ctx);
            if (cj.contains("default")) c.default_value = get<std::string>(cj, "default", ctx);
            t.columns.push_back(std::move(c));
        }
        for (const auto& kj : array_at(tj, "keys", ctx))
            t.keys.push_back({get<std::string>(kj, "name", ctx), get<bool>(kj, "primary", ctx),
                              get<std::vector<std::string>>(kj, "columns", ctx)});
        for (const auto& fj : array_at(tj, "foreignKeys", ctx)) {
            rel::FKey f;
            f.constraint_name = get<std::string>(fj, "name", ctx);
            f.columns = get<std::vector<std::string>>(fj, "columns", ctx);
            f.ref_table = get<std::string>(fj, "refTable", ctx);
            f.ref_key = get<std::string>(fj, "refKey", ctx);
            f.on_delete = rel::parse_referential_action(get<std::string>(fj, "onDelete", ctx));
            f.on_update = rel::parse_referential_action(get<std::string>(fj, "onUpdate", ctx));
            t.fkeys.push_back(std::move(f));
        }
        s.tables.push_back(std::move(t));
    }
    throw_if_errors(rel::validate_relational(s), "relational model");
    return s;
}

std::string print_uschema_json(const us::USchemaModel& m) {
    json j;
    j["kind"] = "uschema";
    j["name"] = m.name;
    j["version"] = m.version;
    j["entities"] = json::array();
    for (const auto& e : m.entities)
        j["entities"].push_back({{"name", e.name}, {"root", e.root}, {"features", features_json(e)}});
    j["relationships"] = json::array();
    for (const auto& r : m.relationships) {
        json sides = json::array();
        for (const auto& s : r.references) sides.push_back({{"entity", s.entity}, {"reference", s.reference}});
        j["relationships"].push_back({{"name", r.name}, {"features", features_json(r)}, {"sides", std::move(sides)}});
    }
    return j.dump(2) + "\n";
}

us::USchemaModel parse_uschema_json(std::string_view text) {
    const json j = parse_json(text, "U-Schema model");
    expect_kind(j, "uschema");
    us::USchemaModel m;
    m.name = get<std::string>(j, "name", "model");
    m.version = get<int>(j, "version", "model");
    for (const auto& ej : array_at(j, "entities", "model")) {
        us::EntityType e;
        e.name = get<std::string>(ej, "name", "entity");
        e.root = get<bool>(ej, "root", e.name.c_str());
        parse_features(array_at(ej, "features", e.name.c_str()), e);
        m.entities.push_back(std::move(e));
    }
    for (const auto& rj : array_at(j, "relationships", "model")) {
        us::RelationshipType r;
        r.name = get<std::string>(rj, "name", "relationship");
        parse_features(array_at(rj, "features", r.name.c_str()), r);
        for (const auto& sj : array_at(rj, "sides", r.name.c_str()))
            r.references.push_back({get<std::string>(sj, "entity", r.name.c_str()),
                                    get<std::string>(sj, "reference", r.name.c_str())});
        m.relationships.push_back(std::move(r));
    }
    throw_if_errors(us::validate_uschema(m), "U-Schema model");
    return m;
}

AnyModel parse_model(std::string_view text, std::string_view ext) {
    if (ext == ".sql" || ext == ".ddl") return rel::parse_ddl(text);
    if (ext == ".athena") return us::parse_athena(text);
    const json j = parse_json(text, "model");
    if (j.is_object() && j.contains("kind") && j["kind"].is_string()) {
        const auto kind = j["kind"].get<std::string>();
        if (kind == "relational") return parse_relational_json(text);
        if (kind == "uschema") return parse_uschema_json(text);
    }
    if (j.is_object() && j.contains("documents")) return doc::parse_docschema(text);
    throw Error("unrecognised model file format");
}

AnyModel load_model(const std::filesystem::path& p) {
    const std::string text = io::read_file(p);
    try {
        return parse_model(text, p.extension().string());
    } catch (const ParseError& e) {
        throw Error(p.string() + ":" + e.what());
    } catch (const Error& e) {
        throw Error(p.string() + ": " + e.what());
    }
}

std::string print_model(const AnyModel& m, ModelFormat f) {
    if (const auto* r = std::get_if<rel::RelationalSchema>(&m)) {
        if (f == ModelFormat::Athena) throw Error("Athena output needs a U-Schema model");
        return f == ModelFormat::Ddl ? rel::print_ddl(*r) : print_relational_json(*r);
    }
    if (const auto* u = std::get_if<us::USchemaModel>(&m)) {
        if (f == ModelFormat::Ddl) throw Error("DDL output needs a relational model");
        return f == ModelFormat::Athena ? us::print_athena(*u) : print_uschema_json(*u);
    }
    if (f != ModelFormat::Json) throw Error("document schemas are written as JSON");
    return doc::print_docschema(std::get<doc::DocumentSchema>(m));
}

ModelFormat format_for(const std::filesystem::path& p) {
    const auto ext = p.extension().string();
    if (ext == ".sql" || ext == ".ddl") return ModelFormat::Ddl;
    if (ext == ".athena") return ModelFormat::Athena;
    return ModelFormat::Json;
}

}  // namespace umig
