#include <algorithm>
#include <map>
#include <set>

#include "naming.hpp"
#include "umig/transform.hpp"

namespace umig {

namespace {

using rel::Column;
using rel::FKey;
using rel::RKey;
using rel::Table;

class UsToRel {
public:
    explicit UsToRel(const us::USchemaModel& m) : m_(m) {}

    TransformResult<rel::RelationalSchema> run() {
        throw_if_errors(us::validate_uschema(m_), "U-Schema model " + m_.name);
        out_.target.name = m_.name;
        record({ids::schema(SchemaKind::USchema, m_.name)}, {ids::schema(SchemaKind::Relational, m_.name)}, "INV-R1");

        for (const auto& e : m_.entities) owner_table(e);
        for (const auto& rt : m_.relationships) owner_table(rt);

        for (const auto& e : m_.entities)
            for (const auto& f : e.features)
                if (const auto* g = std::get_if<us::Aggregate>(&f); g && !m_.entity(g->specified_by)->root)
                    parent_.emplace(g->specified_by, std::make_pair(e.name, g->name));

        for (const auto& e : m_.entities) ensure_pk(e.name);
        for (const auto& rt : m_.relationships) map_sides(rt);
        for (const auto& e : m_.entities) map_references(e);
        for (const auto& rt : m_.relationships) map_references(rt);
        for (const auto& e : m_.entities) map_unique_keys(e);
        return std::move(out_);
    }

private:
    void record(std::vector<ElementId> src, std::vector<ElementId> dst, std::string rule,
                std::optional<TraceRole> role = std::nullopt) {
        out_.trace.record(std::move(src), std::move(dst), std::move(rule), role);
    }

    Table& table(const std::string& n) { return *out_.target.table(n); }

    std::string fresh(const Table& t, const std::string& base) {
        return detail::unique_name(
            base,
            [&](const std::string& n) {
                return t.column(n) || t.key(n) || t.fkey(n);
            },
            out_.warnings, t.name);
    }

    static bool virtual_attribute(const us::FeatureOwner& o, const us::Attribute& a) {
        if (!a.owned_by_reference) return false;
        const auto* r = o.find_as<us::Reference>(*a.owned_by_reference);
        return r && r->upper_bound != 1;
    }

    void owner_table(const us::FeatureOwner& o) {
        Table t;
        t.name = o.name;
        record({ids::us_type(o.name)}, {ids::rel_table(o.name)}, "INV-R2");
        for (const auto& f : o.features) {
            const auto* a = std::get_if<us::Attribute>(&f);
            if (!a) continue;
            if (virtual_attribute(o, *a)) {
                record({ids::us_feature(o.name, a->name)}, {ids::rel_table(o.name)}, "SKIP-REF-ATTR");
                continue;
            }
            t.columns.push_back(Column{a->name, type_map::us_to_rel(a->type), a->optional, std::nullopt});
            record({ids::us_feature(o.name, a->name)}, {ids::rel_member(o.name, a->name)}, "INV-R3",
                   TraceRole::Attribute);
        }
        out_.target.tables.push_back(std::move(t));
    }

    /// Primary key columns of entity `name`, building the key on first use.
    std::vector<std::string> ensure_pk(const std::string& name) {
        if (auto it = pk_.find(name); it != pk_.end()) return it->second;
        if (!in_progress_.insert(name).second) throw Error("cyclic aggregation through entity " + name);
        const us::EntityType& e = *m_.entity(name);
        const us::Key* id = e.id_key();
        std::vector<std::string> cols;
        std::vector<std::string> local = id ? id->attributes : std::vector<std::string>{};

        auto parent = parent_.find(name);
        if (!e.root && parent == parent_.end())
            out_.warnings.push_back(name + ": non-root entity is not aggregated by any entity, mapped as a table");

        if (!e.root && parent != parent_.end()) {
            const auto& [pname, agg] = parent->second;
            const std::vector<std::string> pcols = ensure_pk(pname);
            Table& w = table(name);
            const Table& p = table(pname);
            FKey fk;
            std::vector<Column> inherited;
            for (const auto& pc : pcols) {
                Column c = *p.column(pc);
                c.name = fresh(w, pc);
                c.nullable = false;
                c.default_value.reset();
                inherited.push_back(c);
                w.columns.insert(w.columns.begin() + static_cast<long>(fk.columns.size()), c);
                fk.columns.push_back(c.name);
            }
            fk.constraint_name = fresh(w, name + "_" + pname + "_fk");
            fk.ref_table = pname;
            fk.ref_key = p.primary_key()->constraint_name;
            fk.on_delete = rel::ReferentialAction::Cascade;
            cols = fk.columns;
            std::vector<ElementId> dst{ids::rel_member(name, fk.constraint_name)};
            for (const auto& c : fk.columns) dst.push_back(ids::rel_member(name, c));
            w.fkeys.push_back(std::move(fk));
            cols.insert(cols.end(), local.begin(), local.end());
            RKey pk{fresh(w, id ? id->name : name + "_pk"), true, cols};
            if (id) {
                record({ids::us_feature(name, id->name)}, {ids::rel_member(name, pk.constraint_name)}, "INV-R4",
                       TraceRole::KeyComponent);
            } else {
                dst.push_back(ids::rel_member(name, pk.constraint_name));
            }
            record({ids::us_feature(pname, agg), ids::us_type(name)}, std::move(dst), "INV-R5",
                   TraceRole::AggregateChild);
            w.keys.insert(w.keys.begin(), std::move(pk));
        } else if (id) {
            Table& t = table(name);
            cols = local;
            RKey pk{fresh(t, id->name), true, cols};
            record({ids::us_feature(name, id->name)}, {ids::rel_member(name, pk.constraint_name)}, "INV-R4",
                   TraceRole::KeyComponent);
            t.keys.insert(t.keys.begin(), std::move(pk));
        } else {
            Table& t = table(name);
            Column c{fresh(t, name + "_id"), rel::SqlType::of(rel::SqlType::Base::Varchar, 255), false, std::nullopt};
            t.columns.insert(t.columns.begin(), c);
            RKey pk{fresh(t, name + "_pk"), true, {c.name}};
            out_.warnings.push_back(name + ": no identifier, added surrogate column " + c.name);
            record({ids::us_type(name)}, {ids::rel_member(name, c.name), ids::rel_member(name, pk.constraint_name)},
                   "INV-SURROGATE", TraceRole::KeyComponent);
            cols = {c.name};
            t.keys.insert(t.keys.begin(), std::move(pk));
        }
        Table& t = table(name);
        for (auto& c : t.columns)
            if (std::find(cols.begin(), cols.end(), c.name) != cols.end()) c.nullable = false;
        in_progress_.erase(name);
        pk_[name] = cols;
        return cols;
    }

    /// Adds columns named after `target`'s key to `t` and returns their names.
    std::vector<std::string> key_columns(Table& t, const std::string& target, bool nullable) {
        const std::vector<std::string> tcols = ensure_pk(target);
        const Table& tt = table(target);
        std::vector<std::string> out;
        for (const auto& tc : tcols) {
            Column c = *tt.column(tc);
            c.name = fresh(t, tc);
            c.nullable = nullable;
            c.default_value.reset();
            t.columns.push_back(c);
            out.push_back(c.name);
        }
        return out;
    }

    void map_sides(const us::RelationshipType& rt) {
        std::vector<std::string> pk_cols;
        for (const auto& side : rt.references) {
            const us::Reference& r = *m_.entity(side.entity)->find_as<us::Reference>(side.reference);
            Table& t = table(rt.name);
            FKey fk;
            fk.columns = key_columns(t, r.refs_to, false);
            fk.constraint_name = fresh(t, r.name);
            fk.ref_table = r.refs_to;
            fk.ref_key = table(r.refs_to).primary_key()->constraint_name;
            std::vector<ElementId> dst{ids::rel_member(rt.name, fk.constraint_name)};
            for (const auto& c : fk.columns) dst.push_back(ids::rel_member(rt.name, c));
            record({ids::us_feature(side.entity, side.reference)}, std::move(dst), "INV-R6", TraceRole::RelTypeSide);
            pk_cols.insert(pk_cols.end(), fk.columns.begin(), fk.columns.end());
            t.fkeys.push_back(std::move(fk));
        }
        Table& t = table(rt.name);
        RKey pk{fresh(t, rt.name + "_pk"), true, pk_cols};
        record({ids::us_type(rt.name)}, {ids::rel_member(rt.name, pk.constraint_name)}, "INV-R6",
               TraceRole::KeyComponent);
        t.keys.insert(t.keys.begin(), std::move(pk));
        pk_[rt.name] = pk_cols;
    }

    void map_references(const us::FeatureOwner& o) {
        for (const auto& f : o.features) {
            const ElementId src = ids::us_feature(o.name, us::feature_name(f));
            if (const auto* r = std::get_if<us::Reference>(&f)) {
                if (r->featured_by) continue;
                if (r->upper_bound == 1) {
                    forward(o, *r, src);
                } else {
                    reverse(o.name, r->refs_to, r->name, src, "INV-R7", TraceRole::RefReverse);
                }
            } else if (const auto* g = std::get_if<us::Aggregate>(&f)) {
                if (m_.entity(g->specified_by)->root)
                    reverse(o.name, g->specified_by, g->name, src, "INV-R5", TraceRole::AggregateChild);
            }
        }
    }

    void forward(const us::FeatureOwner& o, const us::Reference& r, const ElementId& src) {
        const std::vector<std::string> tcols = ensure_pk(r.refs_to);
        Table& t = table(o.name);
        FKey fk;
        std::vector<ElementId> dst;
        if (!r.attributes.empty() && r.attributes.size() == tcols.size()) {
            fk.columns = r.attributes;
        } else {
            fk.columns = key_columns(t, r.refs_to, r.lower_bound == 0);
            for (const auto& c : fk.columns) dst.push_back(ids::rel_member(o.name, c));
        }
        fk.constraint_name = fresh(t, r.name);
        fk.ref_table = r.refs_to;
        fk.ref_key = table(r.refs_to).primary_key()->constraint_name;
        dst.insert(dst.begin(), ids::rel_member(o.name, fk.constraint_name));
        record({src}, std::move(dst), "INV-R7", TraceRole::RefForward);
        t.fkeys.push_back(std::move(fk));
    }

    /// Foreign key in `target` pointing back to `owner`.
    void reverse(const std::string& owner, const std::string& target, const std::string& name, const ElementId& src,
                 const char* rule, TraceRole role) {
        const std::vector<std::string> ocols = pk_.count(owner) ? pk_[owner] : ensure_pk(owner);
        Table& t = table(target);
        const Table& ot = table(owner);
        FKey fk;
        for (const auto& oc : ocols) {
            Column c = *ot.column(oc);
            c.name = fresh(t, oc);
            c.nullable = true;
            c.default_value.reset();
            t.columns.push_back(c);
            fk.columns.push_back(c.name);
        }
        fk.constraint_name = fresh(t, name);
        fk.ref_table = owner;
        fk.ref_key = ot.primary_key()->constraint_name;
        std::vector<ElementId> dst{ids::rel_member(target, fk.constraint_name)};
        for (const auto& c : fk.columns) dst.push_back(ids::rel_member(target, c));
        record({src}, std::move(dst), rule, role);
        t.fkeys.push_back(std::move(fk));
    }

    void map_unique_keys(const us::EntityType& e) {
        Table& t = table(e.name);
        for (const auto& f : e.features) {
            const auto* k = std::get_if<us::Key>(&f);
            if (!k || k->is_id) continue;
            bool ok = true;
            for (const auto& a : k->attributes) ok = ok && t.column(a);
            if (!ok) {
                out_.warnings.push_back(e.name + "." + k->name + ": key over virtual attributes, dropped");
                record({ids::us_feature(e.name, k->name)}, {ids::rel_table(e.name)}, "SKIP-KEY");
                continue;
            }
            RKey uk{fresh(t, k->name), false, k->attributes};
            record({ids::us_feature(e.name, k->name)}, {ids::rel_member(e.name, uk.constraint_name)}, "INV-R4",
                   TraceRole::KeyComponent);
            t.keys.push_back(std::move(uk));
        }
    }

    const us::USchemaModel& m_;
    TransformResult<rel::RelationalSchema> out_;
    std::map<std::string, std::pair<std::string, std::string>> parent_;
    std::map<std::string, std::vector<std::string>> pk_;
    std::set<std::string> in_progress_;
};

}  // namespace

TransformResult<rel::RelationalSchema> uschema_to_relational(const us::USchemaModel& model) {
    return UsToRel(model).run();
}

}  // namespace umig
