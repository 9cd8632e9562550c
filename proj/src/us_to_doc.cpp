#include <functional>
#include <map>
#include <set>

#include "naming.hpp"
#include "umig/transform.hpp"

namespace umig {

namespace {

using doc::DocType;
using doc::Property;

class UsToDoc {
public:
    explicit UsToDoc(const us::USchemaModel& m) : m_(m) {}

    TransformResult<doc::DocumentSchema> run() {
        throw_if_errors(us::validate_uschema(m_), "U-Schema model " + m_.name);
        check_acyclic();
        out_.target.name = m_.name;
        record({ids::schema(SchemaKind::USchema, m_.name)}, {ids::schema(SchemaKind::Document, m_.name)}, "R1");

        for (const auto& e : m_.entities) {
            if (!e.root) continue;
            doc::DocumentType d;
            d.name = e.name;
            record({ids::us_type(e.name)}, {ids::doc_type(e.name)}, "R2");
            std::vector<std::string> chain;
            d.properties = map_owner(e, d.name, chain, "_id");
            out_.target.documents.push_back(std::move(d));
        }
        for (const auto& rt : m_.relationships) map_relationship(rt);
        return std::move(out_);
    }

private:
    void record(std::vector<ElementId> src, std::vector<ElementId> dst, std::string rule,
                std::optional<TraceRole> role = std::nullopt) {
        out_.trace.record(std::move(src), std::move(dst), std::move(rule), role);
    }

    void check_acyclic() {
        enum class Mark { None, Active, Done };
        std::map<std::string, Mark> mark;
        std::function<void(const us::EntityType&)> visit = [&](const us::EntityType& e) {
            mark[e.name] = Mark::Active;
            for (const auto& f : e.features) {
                const auto* g = std::get_if<us::Aggregate>(&f);
                if (!g) continue;
                Mark mk = mark[g->specified_by];
                if (mk == Mark::Active) throw Error("cyclic aggregation through entity " + g->specified_by);
                if (mk == Mark::None) visit(*m_.entity(g->specified_by));
            }
            mark[e.name] = Mark::Done;
        };
        for (const auto& e : m_.entities)
            if (mark[e.name] == Mark::None) visit(e);
    }

    /// Primitive kind stored by references to `target`.
    doc::Primitive key_kind(const std::string& target) const {
        const us::EntityType* e = m_.entity(target);
        const us::Key* k = e ? e->id_key() : nullptr;
        if (!k || k->attributes.size() != 1) return doc::Primitive::String;
        return type_map::us_to_doc(e->find_as<us::Attribute>(k->attributes.front())->type);
    }

    static bool taken(const std::vector<Property>& props, const std::string& n) {
        for (const auto& p : props)
            if (p.name() == n) return true;
        return false;
    }

    std::string fresh(const std::vector<Property>& props, const us::FeatureOwner& o, const std::string& base,
                      const std::string& where) {
        return detail::unique_name(
            base, [&](const std::string& n) { return taken(props, n) || o.find(n) != nullptr; }, out_.warnings,
            where);
    }

    ElementId pid(const std::string& docname, const std::vector<std::string>& chain, const std::string& name,
                  bool embedded = false) const {
        return ids::doc_property(docname, chain, name, embedded);
    }

    ElementId container(const std::string& docname, const std::vector<std::string>& chain) const {
        if (chain.empty()) return ids::doc_type(docname);
        std::vector<std::string> up(chain.begin(), chain.end() - 1);
        return ids::doc_property(docname, up, chain.back(), true);
    }

    /// Properties for the features of `o`. `composite_key` names the derived
    /// key field used when the identifier spans several attributes.
    std::vector<Property> map_owner(const us::FeatureOwner& o, const std::string& docname,
                                    std::vector<std::string>& chain, const std::string& composite_key) {
        std::vector<Property> props;
        const us::Key* id = o.id_key();
        const bool single = id && id->attributes.size() == 1;
        if (id && !single) {
            doc::Field k{fresh(props, o, composite_key, docname), DocType{doc::Primitive::String, false}, true};
            record({ids::us_feature(o.name, id->name)}, {pid(docname, chain, k.name)}, "R4", TraceRole::KeyComponent);
            props.push_back({std::move(k)});
        }

        for (const auto& f : o.features) {
            const ElementId src = ids::us_feature(o.name, us::feature_name(f));
            if (const auto* a = std::get_if<us::Attribute>(&f)) {
                if (a->owned_by_reference) {
                    record({src}, {container(docname, chain)}, "SKIP-REF-ATTR");
                    continue;
                }
                const bool is_key = single && id->attributes.front() == a->name;
                doc::Field fd{a->name, DocType{type_map::us_to_doc(a->type), false}, is_key};
                record({src}, {pid(docname, chain, fd.name)}, "R3", TraceRole::Attribute);
                if (is_key)
                    record({ids::us_feature(o.name, id->name)}, {pid(docname, chain, fd.name)}, "R4",
                           TraceRole::KeyComponent);
                props.push_back({std::move(fd)});
            } else if (const auto* k = std::get_if<us::Key>(&f)) {
                if (!k->is_id) record({src}, {container(docname, chain)}, "SKIP-KEY");
            } else if (const auto* r = std::get_if<us::Reference>(&f)) {
                if (r->featured_by) continue;  // emitted with the relationship
                const us::EntityType* target = m_.entity(r->refs_to);
                if (!target->root) {
                    out_.warnings.push_back(o.name + "." + r->name + ": reference to non-root entity " + target->name +
                                            " has no document collection, dropped");
                    record({src}, {container(docname, chain)}, "SKIP-REF");
                    continue;
                }
                doc::DocReference dr{r->name, r->refs_to, DocType{key_kind(r->refs_to), r->upper_bound != 1}};
                record({src}, {pid(docname, chain, dr.name)}, "R5",
                       r->upper_bound == 1 ? TraceRole::RefForward : TraceRole::RefReverse);
                props.push_back({std::move(dr)});
            } else if (const auto* g = std::get_if<us::Aggregate>(&f)) {
                const us::EntityType& child = *m_.entity(g->specified_by);
                doc::Embedded em;
                em.name = g->name;
                em.is_many = g->upper_bound != 1;
                record({src, ids::us_type(child.name)}, {pid(docname, chain, em.name, true)}, "R6",
                       TraceRole::AggregateChild);
                chain.push_back(g->name);
                em.aggregates = map_owner(child, docname, chain, "_id");
                chain.pop_back();
                props.push_back({std::move(em)});
            }
        }
        return props;
    }

    void map_relationship(const us::RelationshipType& rt) {
        doc::DocumentType d;
        d.name = rt.name;
        record({ids::us_type(rt.name)}, {ids::doc_type(rt.name)}, "R7");
        std::vector<std::string> chain;
        const std::string key = rt.name + "_id";
        if (!rt.id_key()) {
            doc::Field k{detail::unique_name(
                             key, [&](const std::string& n) { return rt.find(n) != nullptr; }, out_.warnings,
                             rt.name),
                         DocType{doc::Primitive::String, false}, true};
            record({ids::us_type(rt.name)}, {ids::doc_property(rt.name, chain, k.name, false)}, "R7",
                   TraceRole::KeyComponent);
            d.properties.push_back({std::move(k)});
        }
        for (auto& p : map_owner(rt, d.name, chain, key)) d.properties.push_back(std::move(p));

        for (const auto& side : rt.references) {
            const us::Reference& r = *m_.entity(side.entity)->find_as<us::Reference>(side.reference);
            const us::EntityType* target = m_.entity(r.refs_to);
            const ElementId src = ids::us_feature(side.entity, side.reference);
            if (!target->root) {
                out_.warnings.push_back(rt.name + ": side " + r.name + " targets non-root entity " + target->name +
                                        ", dropped");
                record({src}, {ids::doc_type(rt.name)}, "SKIP-REF");
                continue;
            }
            doc::DocReference dr{fresh(d.properties, us::FeatureOwner{}, r.name, rt.name), r.refs_to,
                                 DocType{key_kind(r.refs_to), false}};
            record({src}, {ids::doc_property(rt.name, chain, dr.name, false)}, "R7", TraceRole::RelTypeSide);
            d.properties.push_back({std::move(dr)});
        }
        out_.target.documents.push_back(std::move(d));
    }

    const us::USchemaModel& m_;
    TransformResult<doc::DocumentSchema> out_;
};

}  // namespace

TransformResult<doc::DocumentSchema> uschema_to_document(const us::USchemaModel& model) {
    return UsToDoc(model).run();
}

}  // namespace umig
