#include <algorithm>
#include <map>
#include <set>

#include "naming.hpp"
#include "umig/transform.hpp"

namespace umig {

namespace {

using rel::FKey;
using rel::RelationalSchema;
using rel::Table;

bool contains(const std::vector<std::string>& v, const std::string& x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

bool same_set(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    return a.size() == b.size() && std::is_permutation(a.begin(), a.end(), b.begin());
}

/// Weak tables embedded into their owner: weak, not owned by an associative
/// table, and referenced by nobody except through the identifying foreign key
/// of another embedded table.
std::set<std::string> embedded_tables(const RelationalSchema& s) {
    std::set<std::string> cand;
    for (const auto& t : s.tables)
        if (rel::is_weak(t)) cand.insert(t.name);

    for (bool changed = true; changed;) {
        changed = false;
        for (auto it = cand.begin(); it != cand.end();) {
            const Table& w = *s.table(*it);
            const FKey* own = rel::identifying_fkeys(w).front();
            bool keep = !rel::is_mn(*s.table(own->ref_table));
            for (const auto& x : s.tables) {
                if (!keep) break;
                for (const auto& f : x.fkeys) {
                    if (f.ref_table != w.name) continue;
                    const bool identifying_child =
                        cand.count(x.name) && rel::identifying_fkeys(x).front()->constraint_name == f.constraint_name;
                    if (!identifying_child) keep = false;
                }
            }
            if (keep) {
                ++it;
            } else {
                it = cand.erase(it);
                changed = true;
            }
        }
    }

    for (const auto& name : cand) {
        std::set<std::string> chain{name};
        std::string cur = name;
        while (cand.count(cur)) {
            cur = rel::identifying_fkeys(*s.table(cur)).front()->ref_table;
            if (!chain.insert(cur).second) throw Error("weak-table chain forms a cycle through table " + cur);
        }
    }
    return cand;
}

class RelToUs {
public:
    explicit RelToUs(const RelationalSchema& s) : s_(s) {}

    TransformResult<us::USchemaModel> run() {
        throw_if_errors(rel::validate_relational(s_), "relational schema " + s_.name);
        embedded_ = embedded_tables(s_);
        out_.target.name = s_.name;
        record({ids::schema(SchemaKind::Relational, s_.name)}, {ids::schema(SchemaKind::USchema, s_.name)}, "R1");

        for (const auto& t : s_.tables) map_table(t);
        for (const auto& t : s_.tables)
            if (!rel::is_mn(t)) map_keys(t);
        for (const auto& t : s_.tables)
            if (embedded_.count(t.name)) map_weak(t);
        for (const auto& t : s_.tables)
            if (rel::is_mn(t)) map_mn(t);
        for (const auto& t : s_.tables) map_plain_fkeys(t);
        finish_keys();
        return std::move(out_);
    }

private:
    void record(std::vector<ElementId> src, std::vector<ElementId> dst, std::string rule,
                std::optional<TraceRole> role = std::nullopt) {
        out_.trace.record(std::move(src), std::move(dst), std::move(rule), role);
    }

    us::FeatureOwner& owner(const std::string& table) {
        if (auto* e = out_.target.entity(table)) return *e;
        return *out_.target.relationship(table);
    }

    std::string fresh(us::FeatureOwner& o, const std::string& base) {
        return detail::unique_name(
            base, [&](const std::string& n) { return o.find(n) != nullptr; }, out_.warnings, o.name);
    }

    void map_table(const Table& t) {
        us::FeatureOwner* o;
        if (rel::is_mn(t)) {
            out_.target.relationships.push_back({});
            o = &out_.target.relationships.back();
        } else {
            us::EntityType e;
            e.root = !embedded_.count(t.name);
            out_.target.entities.push_back(std::move(e));
            o = &out_.target.entities.back();
        }
        o->name = t.name;
        record({ids::rel_table(t.name)}, {ids::us_type(t.name)}, "R2");
        for (const auto& c : t.columns) {
            if (t.is_fk_column(c.name)) {
                record({ids::rel_member(t.name, c.name)}, {ids::us_type(t.name)}, "SKIP-FK-COL");
                continue;
            }
            o->features.push_back(us::Attribute{c.name, type_map::rel_to_us(c.type), c.nullable, std::nullopt});
            mapped_[t.name].insert(c.name);
            record({ids::rel_member(t.name, c.name)}, {ids::us_feature(t.name, c.name)}, "R3", TraceRole::Attribute);
        }
    }

    void map_keys(const Table& t) {
        auto& o = owner(t.name);
        for (const auto& k : t.keys) {
            us::Key key{fresh(o, k.constraint_name), k.is_pk, {}};
            for (const auto& c : k.columns)
                if (mapped_[t.name].count(c)) key.attributes.push_back(c);
            key_source_[t.name + "." + key.name] = k.constraint_name;
            o.features.push_back(std::move(key));
        }
    }

    void map_weak(const Table& w) {
        const FKey* own = rel::identifying_fkeys(w).front();
        auto& parent = owner(own->ref_table);
        us::Aggregate g{fresh(parent, plural(w.name)), w.name, 0, us::kUnbounded};
        record({ids::rel_table(w.name), ids::rel_member(w.name, own->constraint_name)},
               {ids::us_type(w.name), ids::us_feature(parent.name, g.name)}, "R5", TraceRole::AggregateChild);
        parent.features.push_back(std::move(g));
        consumed_.insert(w.name + "." + own->constraint_name);
    }

    void map_mn(const Table& m) {
        auto fks = rel::identifying_fkeys(m);
        auto& rt = *out_.target.relationship(m.name);
        for (const auto* f : fks)
            if (rel::is_mn(*s_.table(f->ref_table)))
                throw Error("associative table " + m.name + " references associative table " + f->ref_table);
        for (std::size_t i = 0; i < fks.size(); ++i) {
            const FKey* here = fks[i];
            const FKey* side = fks[(i + 1) % fks.size()];
            auto& holder = *out_.target.entity(side->ref_table);
            us::Reference r{fresh(holder, here->constraint_name), here->ref_table, 1, us::kUnbounded, {}, m.name};
            rt.references.push_back({holder.name, r.name});
            record({ids::rel_table(m.name), ids::rel_member(m.name, here->constraint_name),
                    ids::rel_member(m.name, side->constraint_name)},
                   {ids::us_feature(holder.name, r.name)}, "R6", TraceRole::RelTypeSide);
            holder.features.push_back(std::move(r));
            consumed_.insert(m.name + "." + here->constraint_name);
        }
        for (const auto& k : m.keys)
            record({ids::rel_member(m.name, k.constraint_name)}, {ids::us_type(m.name)}, "SKIP-KEY");
    }

    void map_plain_fkeys(const Table& t) {
        for (const auto& f : t.fkeys) {
            if (consumed_.count(t.name + "." + f.constraint_name)) continue;
            const Table& target = *s_.table(f.ref_table);
            bool unique = false;
            for (const auto& k : t.keys) unique = unique || same_set(k.columns, f.columns);
            const bool forward = unique || rel::is_weak(t) || rel::is_mn(t);
            if (forward && !rel::is_mn(target)) {
                forward_reference(t, f, target);
            } else if (!rel::is_mn(t)) {
                reverse_reference(t, f, target);
            } else {
                out_.warnings.push_back(t.name + "." + f.constraint_name +
                                        ": reference between associative tables is not representable, skipped");
                record({ids::rel_member(t.name, f.constraint_name)}, {ids::us_type(t.name)}, "SKIP-FK");
            }
        }
    }

    // R7.1: 0..1 reference in the owner, attributes named after the target key.
    void forward_reference(const Table& t, const FKey& f, const Table& target) {
        auto& o = owner(t.name);
        const rel::RKey& tk = *target.key(f.ref_key);
        us::Reference r{fresh(o, target.name), target.name, 0, 1, {}, std::nullopt};
        std::vector<std::pair<std::string, std::string>> column_attr;
        for (std::size_t i = 0; i < f.columns.size(); ++i) {
            const rel::Column& local = *t.column(f.columns[i]);
            const rel::Column& remote = *target.column(tk.columns[i]);
            us::Attribute a{fresh(o, remote.name), type_map::rel_to_us(remote.type), local.nullable, r.name};
            r.attributes.push_back(a.name);
            column_attr.push_back({local.name, a.name});
            o.features.push_back(std::move(a));
        }
        const std::string ref_name = r.name;
        o.features.push_back(std::move(r));
        record({ids::rel_member(t.name, f.constraint_name)}, {ids::us_feature(t.name, ref_name)}, "R7.1",
               TraceRole::RefForward);
        for (const auto& [col, attr] : column_attr) {
            record({ids::rel_member(t.name, f.constraint_name)}, {ids::us_feature(t.name, attr)}, "R7.1",
                   TraceRole::Attribute);
            // Keys over this foreign key's columns now cover the reference attributes.
            for (const auto& k : t.keys) {
                if (!contains(k.columns, col)) continue;
                for (auto& feat : o.features) {
                    auto* key = std::get_if<us::Key>(&feat);
                    if (key && key_source_[t.name + "." + key->name] == k.constraint_name)
                        key->attributes.push_back(attr);
                }
            }
        }
    }

    // R7.2: 0..n reference placed in the referenced entity.
    void reverse_reference(const Table& t, const FKey& f, const Table& target) {
        auto& holder = owner(target.name);
        us::Reference r{fresh(holder, plural(t.name)), t.name, 0, us::kUnbounded, {}, std::nullopt};
        std::vector<std::string> attrs;
        if (const rel::RKey* pk = t.primary_key()) {
            for (const auto& c : pk->columns) {
                us::Attribute a{fresh(holder, c + "_" + t.name), type_map::rel_to_us(t.column(c)->type), true, r.name};
                r.attributes.push_back(a.name);
                attrs.push_back(a.name);
                holder.features.push_back(std::move(a));
            }
        }
        const std::string ref_name = r.name;
        holder.features.push_back(std::move(r));
        record({ids::rel_member(t.name, f.constraint_name)}, {ids::us_feature(holder.name, ref_name)}, "R7.2",
               TraceRole::RefReverse);
        for (const auto& a : attrs)
            record({ids::rel_member(t.name, f.constraint_name)}, {ids::us_feature(holder.name, a)}, "R7.2",
                   TraceRole::Attribute);
    }

    // Keys left without attributes (all columns inherited) are dropped.
    void finish_keys() {
        for (auto& e : out_.target.entities) {
            std::vector<us::Feature> kept;
            for (auto& f : e.features) {
                auto* k = std::get_if<us::Key>(&f);
                if (!k) {
                    kept.push_back(std::move(f));
                    continue;
                }
                const std::string src = key_source_[e.name + "." + k->name];
                if (k->attributes.empty()) {
                    record({ids::rel_member(e.name, src)}, {ids::us_type(e.name)}, "SKIP-KEY");
                    continue;
                }
                record({ids::rel_member(e.name, src)}, {ids::us_feature(e.name, k->name)}, "R4",
                       TraceRole::KeyComponent);
                kept.push_back(std::move(f));
            }
            e.features = std::move(kept);
        }
    }

    const RelationalSchema& s_;
    TransformResult<us::USchemaModel> out_;
    std::set<std::string> embedded_;
    std::map<std::string, std::set<std::string>> mapped_;
    std::map<std::string, std::string> key_source_;
    std::set<std::string> consumed_;
};

}  // namespace

TransformResult<us::USchemaModel> rel_to_uschema(const rel::RelationalSchema& schema) { return RelToUs(schema).run(); }

}  // namespace umig
