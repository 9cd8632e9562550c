#include <set>

#include "naming.hpp"
#include "umig/transform.hpp"

namespace umig {

namespace {

class DocToUs {
public:
    explicit DocToUs(const doc::DocumentSchema& s) : s_(s) {}

    TransformResult<us::USchemaModel> run() {
        throw_if_errors(doc::validate_docschema(s_), "document schema " + s_.name);
        out_.target.name = s_.name;
        record({ids::schema(SchemaKind::Document, s_.name)}, {ids::schema(SchemaKind::USchema, s_.name)}, "INV-R1");
        for (const auto& d : s_.documents) type_names_.insert(d.name);

        for (const auto& d : s_.documents) {
            pending_.clear();
            us::EntityType e;
            e.name = d.name;
            e.root = true;
            record({ids::doc_type(d.name)}, {ids::us_type(d.name)}, "INV-R2");
            std::vector<std::string> chain;
            map_properties(e, d.name, chain, d.properties);
            out_.target.entities.push_back(std::move(e));
            for (auto& p : pending_) out_.target.entities.push_back(std::move(p));
        }
        return std::move(out_);
    }

private:
    void record(std::vector<ElementId> src, std::vector<ElementId> dst, std::string rule,
                std::optional<TraceRole> role = std::nullopt) {
        out_.trace.record(std::move(src), std::move(dst), std::move(rule), role);
    }

    void map_properties(us::EntityType& e, const std::string& docname, std::vector<std::string>& chain,
                        const std::vector<doc::Property>& props) {
        std::optional<std::string> key_attr;
        for (const auto& p : props) {
            const bool embedded = std::holds_alternative<doc::Embedded>(p.node);
            const ElementId src = ids::doc_property(docname, chain, p.name(), embedded);
            if (const auto* f = std::get_if<doc::Field>(&p.node)) {
                if (f->type.is_array)
                    out_.warnings.push_back(e.name + "." + f->name + ": array field mapped to a scalar attribute");
                e.features.push_back(us::Attribute{f->name, type_map::doc_to_us(f->type.kind), !f->is_key, std::nullopt});
                record({src}, {ids::us_feature(e.name, f->name)}, "INV-R3", TraceRole::Attribute);
                if (f->is_key) key_attr = f->name;
            } else if (const auto* r = std::get_if<doc::DocReference>(&p.node)) {
                const bool many = r->type.is_array;
                e.features.push_back(us::Reference{r->name, r->target, 0, many ? us::kUnbounded : 1, {}, std::nullopt});
                record({src}, {ids::us_feature(e.name, r->name)}, "INV-R5",
                       many ? TraceRole::RefReverse : TraceRole::RefForward);
            } else {
                const auto& em = std::get<doc::Embedded>(p.node);
                us::EntityType child;
                child.name = detail::unique_name(
                    singular(em.name), [&](const std::string& n) { return type_names_.count(n) > 0; }, out_.warnings,
                    e.name + "." + em.name);
                child.root = false;
                type_names_.insert(child.name);
                e.features.push_back(
                    us::Aggregate{em.name, child.name, 0, em.is_many ? us::kUnbounded : 1});
                record({src}, {ids::us_feature(e.name, em.name), ids::us_type(child.name)}, "INV-R6",
                       TraceRole::AggregateChild);
                // Reserve the slot first so nested entities follow their parent.
                const std::size_t slot = pending_.size();
                pending_.emplace_back();
                chain.push_back(em.name);
                map_properties(child, docname, chain, em.aggregates);
                chain.pop_back();
                pending_[slot] = std::move(child);
            }
        }
        if (key_attr) {
            const std::string name = detail::unique_name(
                e.name + "_pk", [&](const std::string& n) { return e.find(n) != nullptr; }, out_.warnings, e.name);
            e.features.push_back(us::Key{name, true, {*key_attr}});
            record({ids::doc_property(docname, chain, *key_attr, false)}, {ids::us_feature(e.name, name)}, "INV-R4",
                   TraceRole::KeyComponent);
        }
    }

    const doc::DocumentSchema& s_;
    TransformResult<us::USchemaModel> out_;
    std::set<std::string> type_names_;
    std::vector<us::EntityType> pending_;
};

}  // namespace

TransformResult<us::USchemaModel> document_to_uschema(const doc::DocumentSchema& schema) {
    return DocToUs(schema).run();
}

}  // namespace umig
