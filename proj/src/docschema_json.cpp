#include "umig/docschema_json.hpp"

#include <json.hpp>

namespace umig::doc {

using Json = nlohmann::ordered_json;

namespace {

const Json& member(const Json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw Error(where + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw Error(where + ": missing \"" + key + "\"");
    return *it;
}

std::string text(const Json& obj, const char* key, const std::string& where) {
    const Json& v = member(obj, key, where);
    if (!v.is_string()) throw Error(where + ": \"" + key + "\" must be a string");
    return v.get<std::string>();
}

bool boolean(const Json& obj, const char* key, const std::string& where, bool fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_boolean()) throw Error(where + ": \"" + key + "\" must be a boolean");
    return it->get<bool>();
}

DocType read_type(const Json& obj, const std::string& where) {
    DocType t;
    t.kind = parse_primitive(text(obj, "type", where));
    auto it = obj.find("cardinality");
    if (it != obj.end()) {
        if (*it == "many") {
            t.is_array = true;
        } else if (*it != "one") {
            throw Error(where + ": cardinality must be \"one\" or \"many\"");
        }
    }
    return t;
}

std::vector<Property> read_properties(const Json& arr, const std::string& where) {
    if (!arr.is_array()) throw Error(where + ": properties must be an array");
    std::vector<Property> out;
    for (const auto& p : arr) {
        const std::string name = text(p, "name", where);
        const std::string here = where + "." + name;
        const std::string kind = text(p, "kind", here);
        if (kind == "field") {
            out.push_back({Field{name, read_type(p, here), boolean(p, "isKey", here, false)}});
        } else if (kind == "reference") {
            out.push_back({DocReference{name, text(p, "target", here), read_type(p, here)}});
        } else if (kind == "embedded") {
            Embedded e;
            e.name = name;
            e.is_many = boolean(p, "isMany", here, false);
            e.aggregates = read_properties(member(p, "aggregates", here), here);
            out.push_back({std::move(e)});
        } else {
            throw Error(here + ": unknown property kind '" + kind + "'");
        }
    }
    return out;
}

Json write_type(Json j, const DocType& t) {
    j["type"] = to_string(t.kind);
    j["cardinality"] = t.is_array ? "many" : "one";
    return j;
}

Json write_properties(const std::vector<Property>& props) {
    Json arr = Json::array();
    for (const auto& p : props) {
        Json j;
        if (const auto* f = std::get_if<Field>(&p.node)) {
            j["kind"] = "field";
            j["name"] = f->name;
            j = write_type(std::move(j), f->type);
            j["isKey"] = f->is_key;
        } else if (const auto* r = std::get_if<DocReference>(&p.node)) {
            j["kind"] = "reference";
            j["name"] = r->name;
            j["target"] = r->target;
            j = write_type(std::move(j), r->type);
        } else {
            const auto& e = std::get<Embedded>(p.node);
            j["kind"] = "embedded";
            j["name"] = e.name;
            j["isMany"] = e.is_many;
            j["aggregates"] = write_properties(e.aggregates);
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

}  // namespace

DocumentSchema parse_docschema(std::string_view json) {
    Json root;
    try {
        root = Json::parse(json);
    } catch (const Json::parse_error& e) {
        throw Error(std::string("malformed document schema JSON: ") + e.what());
    }
    DocumentSchema s;
    s.name = text(root, "name", "schema");
    const Json& docs = member(root, "documents", "schema");
    if (!docs.is_array()) throw Error("schema: documents must be an array");
    for (const auto& d : docs) {
        DocumentType t;
        t.name = text(d, "name", "document");
        t.properties = read_properties(member(d, "properties", t.name), t.name);
        s.documents.push_back(std::move(t));
    }
    throw_if_errors(validate_docschema(s), "document schema");
    return s;
}

std::string print_docschema(const DocumentSchema& schema) {
    Json root;
    root["name"] = schema.name;
    root["documents"] = Json::array();
    for (const auto& d : schema.documents) {
        Json j;
        j["name"] = d.name;
        j["properties"] = write_properties(d.properties);
        root["documents"].push_back(std::move(j));
    }
    return root.dump(2) + "\n";
}

}  // namespace umig::doc
