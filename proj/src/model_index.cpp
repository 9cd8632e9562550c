#include "umig/model_index.hpp"

namespace umig {

void ModelIndex::add(ElementId id, ElementHandle h) {
    if (!map_.emplace(id.str(), h).second) throw Error("ambiguous element id '" + id.str() + "'");
    order_.push_back(std::move(id));
}

ModelIndex::ModelIndex(const rel::RelationalSchema& m) : kind_(SchemaKind::Relational) {
    add(ids::schema(kind_, m.name), &m);
    for (const auto& t : m.tables) {
        add(ids::rel_table(t.name), &t);
        for (const auto& c : t.columns) add(ids::rel_member(t.name, c.name), &c);
        for (const auto& k : t.keys) add(ids::rel_member(t.name, k.constraint_name), &k);
        for (const auto& f : t.fkeys) add(ids::rel_member(t.name, f.constraint_name), &f);
    }
}

ModelIndex::ModelIndex(const us::USchemaModel& m) : kind_(SchemaKind::USchema) {
    add(ids::schema(kind_, m.name), &m);
    for (const auto& e : m.entities) {
        add(ids::us_type(e.name), &e);
        for (const auto& f : e.features) add(ids::us_feature(e.name, us::feature_name(f)), &f);
    }
    for (const auto& r : m.relationships) {
        add(ids::us_type(r.name), &r);
        for (const auto& f : r.features) add(ids::us_feature(r.name, us::feature_name(f)), &f);
    }
}

ModelIndex::ModelIndex(const doc::DocumentSchema& m) : kind_(SchemaKind::Document) {
    add(ids::schema(kind_, m.name), &m);
    for (const auto& d : m.documents) {
        add(ids::doc_type(d.name), &d);
        std::vector<std::string> chain;
        add_properties(d, d.properties, chain);
    }
}

void ModelIndex::add_properties(const doc::DocumentType& d, const std::vector<doc::Property>& props,
                                std::vector<std::string>& chain) {
    for (const auto& p : props) {
        const auto* e = std::get_if<doc::Embedded>(&p.node);
        add(ids::doc_property(d.name, chain, p.name(), e != nullptr), &p);
        if (e) {
            chain.push_back(e->name);
            add_properties(d, e->aggregates, chain);
            chain.pop_back();
        }
    }
}

const ElementHandle* ModelIndex::find(const ElementId& id) const {
    auto it = map_.find(id.str());
    return it == map_.end() ? nullptr : &it->second;
}

}  // namespace umig
