#include "umig/element_id.hpp"

#include "umig/error.hpp"

namespace umig {

std::string_view prefix(SchemaKind k) {
    switch (k) {
        case SchemaKind::Relational: return "rel";
        case SchemaKind::USchema: return "us";
        case SchemaKind::Document: return "doc";
    }
    return "rel";
}

namespace {

bool parse_kind(std::string_view p, SchemaKind& out) {
    for (SchemaKind k : {SchemaKind::Relational, SchemaKind::USchema, SchemaKind::Document}) {
        if (prefix(k) == p) {
            out = k;
            return true;
        }
    }
    return false;
}

}  // namespace

bool is_valid_element_id(std::string_view text) {
    auto colon = text.find(':');
    SchemaKind k;
    if (colon == std::string_view::npos || !parse_kind(text.substr(0, colon), k)) return false;
    std::string_view path = text.substr(colon + 1);
    if (path.empty()) return false;
    if (path.front() == '@') return path.size() > 1;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= path.size(); ++i) {
        if (i == path.size() || path[i] == '.' || path[i] == '/') {
            if (i == start) return false;
            start = i + 1;
        }
    }
    return true;
}

ElementId::ElementId(std::string text) : text_(std::move(text)), kind_(SchemaKind::Relational) {
    if (!is_valid_element_id(text_)) throw Error("malformed element id '" + text_ + "'");
    parse_kind(std::string_view(text_).substr(0, text_.find(':')), kind_);
}

std::string_view ElementId::path() const noexcept {
    return std::string_view(text_).substr(text_.find(':') + 1);
}

namespace ids {

namespace {

std::string join(SchemaKind k, std::string_view a, std::string_view b = {}) {
    std::string s(prefix(k));
    s += ':';
    s += a;
    if (!b.empty()) {
        s += '.';
        s += b;
    }
    return s;
}

}  // namespace

ElementId schema(SchemaKind k, std::string_view name) { return ElementId(join(k, "@" + std::string(name))); }

ElementId rel_table(std::string_view table) { return ElementId(join(SchemaKind::Relational, table)); }
ElementId rel_member(std::string_view table, std::string_view member) {
    return ElementId(join(SchemaKind::Relational, table, member));
}

ElementId us_type(std::string_view type) { return ElementId(join(SchemaKind::USchema, type)); }
ElementId us_feature(std::string_view type, std::string_view feature) {
    return ElementId(join(SchemaKind::USchema, type, feature));
}

ElementId doc_type(std::string_view type) { return ElementId(join(SchemaKind::Document, type)); }

ElementId doc_property(std::string_view type, const std::vector<std::string>& chain, std::string_view name,
                       bool is_embedded) {
    std::string path;
    for (const auto& c : chain) path += (path.empty() ? "" : "/") + c;
    if (path.empty()) {
        path = std::string(name);
    } else {
        path += (is_embedded ? "/" : ".") + std::string(name);
    }
    return ElementId(join(SchemaKind::Document, type, path));
}

}  // namespace ids

}  // namespace umig
