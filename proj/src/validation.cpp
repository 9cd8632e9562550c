#include "umig/validation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include <json.hpp>

#include "umig/assignment.hpp"

namespace umig::validation {

std::string_view to_string(Category c) {
    switch (c) {
        case Category::Entities: return "Entities";
        case Category::Attributes: return "Attributes";
        case Category::PrimaryKeys: return "PrimaryKeys";
        case Category::ForeignKeys: return "ForeignKeys";
        case Category::Constraints: return "Constraints";
        case Category::DataTypes: return "DataTypes";
    }
    return "?";
}

double Score::precision() const { return tp + fp == 0 ? 1.0 : double(tp) / double(tp + fp); }
double Score::recall() const { return tp + fn == 0 ? 1.0 : double(tp) / double(tp + fn); }
double Score::f1() const {
    const double p = precision(), r = recall();
    return p + r == 0 ? 0.0 : 2 * p * r / (p + r);
}

namespace {

using rel::SqlType;

enum class TypeClass { String, Integer, Numeric, Boolean, Temporal };

TypeClass type_class(const SqlType& t) {
    using B = SqlType::Base;
    switch (t.base) {
        case B::Char:
        case B::Varchar:
        case B::Text: return TypeClass::String;
        case B::Int:
        case B::Bigint:
        case B::Smallint: return TypeClass::Integer;
        case B::Boolean: return TypeClass::Boolean;
        case B::Date:
        case B::Timestamp: return TypeClass::Temporal;
        default: return TypeClass::Numeric;
    }
}

struct ColumnPairing {
    std::vector<int> a_to_b;  // -1 when unpaired
    std::size_t by_name = 0;
    std::size_t by_type = 0;
    std::size_t pairs() const { return by_name + by_type; }
};

ColumnPairing pair_columns(const rel::Table& a, const rel::Table& b) {
    ColumnPairing p;
    p.a_to_b.assign(a.columns.size(), -1);
    std::vector<bool> taken(b.columns.size(), false);
    for (std::size_t i = 0; i < a.columns.size(); ++i)
        for (std::size_t j = 0; j < b.columns.size(); ++j)
            if (!taken[j] && a.columns[i].name == b.columns[j].name) {
                p.a_to_b[i] = static_cast<int>(j);
                taken[j] = true;
                ++p.by_name;
                break;
            }
    for (std::size_t i = 0; i < a.columns.size(); ++i) {
        if (p.a_to_b[i] >= 0) continue;
        for (std::size_t j = 0; j < b.columns.size(); ++j)
            if (!taken[j] && type_class(a.columns[i].type) == type_class(b.columns[j].type)) {
                p.a_to_b[i] = static_cast<int>(j);
                taken[j] = true;
                ++p.by_type;
                break;
            }
    }
    return p;
}

double similarity(const rel::Table& a, const rel::Table& b, const ColumnPairing& p) {
    const double uni = double(a.columns.size() + b.columns.size() - p.pairs());
    if (uni == 0) return 1.0;
    return double(2 * p.by_name + p.by_type) / (2 * uni);
}

int column_index(const rel::Table& t, const std::string& name) {
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        if (t.columns[i].name == name) return static_cast<int>(i);
    return -1;
}

/// Column names of `b` paired with the named columns of `a`; nullopt when one
/// of them has no partner.
std::optional<std::set<std::string>> mapped(const rel::Table& a, const rel::Table& b, const ColumnPairing& p,
                                            const std::vector<std::string>& cols) {
    std::set<std::string> out;
    for (const auto& c : cols) {
        int i = column_index(a, c);
        if (i < 0 || p.a_to_b[static_cast<std::size_t>(i)] < 0) return std::nullopt;
        out.insert(b.columns[static_cast<std::size_t>(p.a_to_b[static_cast<std::size_t>(i)])].name);
    }
    return out;
}

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

std::size_t constraint_count(const rel::Table& t) {
    std::size_t n = 0;
    for (const auto& c : t.columns) n += !c.nullable;
    for (const auto& k : t.keys) n += !k.is_pk;
    return n;
}

}  // namespace

MatchReport compare_schemas(const rel::RelationalSchema& ra, const rel::RelationalSchema& rb) {
    MatchReport rep;
    const auto& A = ra.tables;
    const auto& B = rb.tables;
    std::vector<std::vector<ColumnPairing>> pairing(A.size());
    std::vector<std::vector<double>> w(A.size(), std::vector<double>(B.size(), 0));
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < B.size(); ++j) {
            pairing[i].push_back(pair_columns(A[i], B[j]));
            w[i][j] = similarity(A[i], B[j], pairing[i][j]);
        }
    const std::vector<int> match = max_weight_assignment(w);
    std::vector<int> back(B.size(), -1);
    for (std::size_t i = 0; i < A.size(); ++i)
        if (match[i] >= 0) back[static_cast<std::size_t>(match[i])] = static_cast<int>(i);

    Score& ent = rep[Category::Entities];
    Score& att = rep[Category::Attributes];
    Score& pk = rep[Category::PrimaryKeys];
    Score& fk = rep[Category::ForeignKeys];
    Score& con = rep[Category::Constraints];
    Score& dt = rep[Category::DataTypes];

    for (std::size_t i = 0; i < A.size(); ++i) {
        const rel::Table& a = A[i];
        if (match[i] < 0) {
            ++ent.fn;
            att.fn += a.columns.size();
            pk.fn += a.primary_key() != nullptr;
            con.fn += constraint_count(a);
            continue;
        }
        const std::size_t j = static_cast<std::size_t>(match[i]);
        const rel::Table& b = B[j];
        const ColumnPairing& p = pairing[i][j];
        rep.tables.push_back({a.name, b.name, w[i][j]});
        ++ent.tp;
        att.tp += p.pairs();
        att.fn += a.columns.size() - p.pairs();
        att.fp += b.columns.size() - p.pairs();

        for (std::size_t c = 0; c < a.columns.size(); ++c) {
            if (p.a_to_b[c] < 0) continue;
            if (a.columns[c].type == b.columns[static_cast<std::size_t>(p.a_to_b[c])].type) {
                ++dt.tp;
            } else {
                ++dt.fn;
                ++dt.fp;
            }
        }

        const rel::RKey* ka = a.primary_key();
        const rel::RKey* kb = b.primary_key();
        if (ka && kb) {
            auto m = mapped(a, b, p, ka->columns);
            if (m && *m == as_set(kb->columns)) {
                ++pk.tp;
            } else {
                ++pk.fn;
                ++pk.fp;
            }
        } else {
            pk.fn += ka != nullptr;
            pk.fp += kb != nullptr;
        }

        // NOT NULL columns, then UNIQUE keys.
        std::vector<bool> hit_col(b.columns.size(), false);
        for (std::size_t c = 0; c < a.columns.size(); ++c) {
            if (a.columns[c].nullable) continue;
            const int m = p.a_to_b[c];
            if (m >= 0 && !b.columns[static_cast<std::size_t>(m)].nullable) {
                ++con.tp;
                hit_col[static_cast<std::size_t>(m)] = true;
            } else {
                ++con.fn;
            }
        }
        for (std::size_t c = 0; c < b.columns.size(); ++c)
            if (!b.columns[c].nullable && !hit_col[c]) ++con.fp;
        std::vector<bool> hit_key(b.keys.size(), false);
        for (const auto& k : a.keys) {
            if (k.is_pk) continue;
            auto m = mapped(a, b, p, k.columns);
            bool found = false;
            for (std::size_t x = 0; m && x < b.keys.size() && !found; ++x)
                if (!b.keys[x].is_pk && !hit_key[x] && as_set(b.keys[x].columns) == *m) found = hit_key[x] = true;
            if (found)
                ++con.tp;
            else
                ++con.fn;
        }
        for (std::size_t x = 0; x < b.keys.size(); ++x)
            if (!b.keys[x].is_pk && !hit_key[x]) ++con.fp;
    }
    for (std::size_t j = 0; j < B.size(); ++j) {
        if (back[j] >= 0) continue;
        ++ent.fp;
        att.fp += B[j].columns.size();
        pk.fp += B[j].primary_key() != nullptr;
        con.fp += constraint_count(B[j]);
    }

    std::multiset<std::pair<std::string, std::string>> fa, fb;
    std::map<std::string, std::string> to_b;
    for (std::size_t i = 0; i < A.size(); ++i)
        if (match[i] >= 0) to_b[A[i].name] = B[static_cast<std::size_t>(match[i])].name;
    std::size_t total_a = 0;
    for (const auto& t : A)
        for (const auto& f : t.fkeys) {
            ++total_a;
            auto s = to_b.find(t.name);
            auto d = to_b.find(f.ref_table);
            if (s != to_b.end() && d != to_b.end()) fa.emplace(s->second, d->second);
        }
    for (const auto& t : B)
        for (const auto& f : t.fkeys) fb.emplace(t.name, f.ref_table);
    std::size_t common = 0;
    for (auto it = fa.begin(); it != fa.end(); it = fa.upper_bound(*it))
        common += std::min(fa.count(*it), fb.count(*it));
    fk.tp = common;
    fk.fn = total_a - common;
    fk.fp = fb.size() - common;
    return rep;
}

RoundTrip run_roundtrip(const rel::RelationalSchema& schema) {
    RoundTrip rt;
    rt.original = schema;
    rt.pivot = rel_to_uschema(rt.original);
    rt.document = uschema_to_document(rt.pivot.target);
    rt.pivot_back = document_to_uschema(rt.document.target);
    rt.reconstructed = uschema_to_relational(rt.pivot_back.target);
    rt.report = compare_schemas(rt.original, rt.reconstructed.target);
    return rt;
}

namespace {

std::string fixed2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string report_markdown(const MatchReport& r, std::string_view title) {
    std::string out = "## Schema preservation: " + std::string(title) + "\n\n";
    out += "| Category | TP | FP | FN | P | R | F1 |\n";
    out += "|---|---:|---:|---:|---:|---:|---:|\n";
    for (Category c : kCategories) {
        const Score& s = r[c];
        out += "| " + std::string(to_string(c)) + " | " + std::to_string(s.tp) + " | " + std::to_string(s.fp) + " | " +
               std::to_string(s.fn) + " | " + fixed2(s.precision()) + " | " + fixed2(s.recall()) + " | " +
               fixed2(s.f1()) + " |\n";
    }
    out += "\n| Original table | Reconstructed table | Similarity |\n|---|---|---:|\n";
    for (const auto& t : r.tables) out += "| " + t.original + " | " + t.reconstructed + " | " + fixed2(t.similarity) + " |\n";
    return out;
}

std::string report_json(const MatchReport& r, std::string_view title) {
    nlohmann::ordered_json j;
    j["schema"] = std::string(title);
    j["categories"] = nlohmann::ordered_json::array();
    for (Category c : kCategories) {
        const Score& s = r[c];
        j["categories"].push_back({{"category", std::string(to_string(c))},
                                   {"tp", s.tp},
                                   {"fp", s.fp},
                                   {"fn", s.fn},
                                   {"precision", s.precision()},
                                   {"recall", s.recall()},
                                   {"f1", s.f1()}});
    }
    j["tables"] = nlohmann::ordered_json::array();
    for (const auto& t : r.tables)
        j["tables"].push_back({{"original", t.original}, {"reconstructed", t.reconstructed}, {"similarity", t.similarity}});
    return j.dump(2) + "\n";
}

std::string_view to_string(Difference::Kind k) {
    switch (k) {
        case Difference::Kind::Added: return "added";
        case Difference::Kind::Removed: return "removed";
        case Difference::Kind::Changed: return "changed";
        case Difference::Kind::Renamed: return "changed name";
    }
    return "?";
}

namespace {

struct Node {
    std::string name;
    std::string sig;
    std::vector<Node> children;

    std::string deep() const {
        std::string s = sig + "{";
        for (const auto& c : children) s += c.name + ":" + c.deep() + ";";
        return s + "}";
    }
};

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
}

Node flatten(const rel::RelationalSchema& m) {
    Node root{m.name, "relational schema", {}};
    for (const auto& t : m.tables) {
        Node n{t.name, "table", {}};
        for (const auto& c : t.columns)
            n.children.push_back({c.name, "column " + rel::to_string(c.type) + (c.nullable ? "" : " NOT NULL") +
                                              (c.default_value ? " DEFAULT " + *c.default_value : ""),
                                  {}});
        for (const auto& k : t.keys)
            n.children.push_back({k.constraint_name, (k.is_pk ? "PRIMARY KEY (" : "UNIQUE (") + join(k.columns) + ")", {}});
        for (const auto& f : t.fkeys) {
            const rel::RKey* k = m.target_key(f);
            n.children.push_back({f.constraint_name,
                                  "FOREIGN KEY (" + join(f.columns) + ") REFERENCES " + f.ref_table + " (" +
                                      (k ? join(k->columns) : f.ref_key) + ") ON DELETE " + rel::to_string(f.on_delete) +
                                      " ON UPDATE " + rel::to_string(f.on_update),
                                  {}});
        }
        root.children.push_back(std::move(n));
    }
    return root;
}

std::string bounds(int lo, int hi) {
    return std::to_string(lo) + ".." + (hi == us::kUnbounded ? std::string("*") : std::to_string(hi));
}

void add_features(Node& n, const us::FeatureOwner& o) {
    struct V {
        std::string operator()(const us::Attribute& a) const {
            return "attribute " + us::to_string(a.type) + (a.optional ? " optional" : "") +
                   (a.owned_by_reference ? " owned by " + *a.owned_by_reference : "");
        }
        std::string operator()(const us::Key& k) const {
            return std::string(k.is_id ? "identifier (" : "key (") + join(k.attributes) + ")";
        }
        std::string operator()(const us::Reference& r) const {
            return "reference " + r.refs_to + " " + bounds(r.lower_bound, r.upper_bound) + " [" + join(r.attributes) +
                   "]" + (r.featured_by ? " featured by " + *r.featured_by : "");
        }
        std::string operator()(const us::Aggregate& g) const {
            return "aggregate " + g.specified_by + " " + bounds(g.lower_bound, g.upper_bound);
        }
    };
    for (const auto& f : o.features) n.children.push_back({us::feature_name(f), std::visit(V{}, f), {}});
}

Node flatten(const us::USchemaModel& m) {
    Node root{m.name, "U-Schema model version " + std::to_string(m.version), {}};
    for (const auto& e : m.entities) {
        Node n{e.name, e.root ? "root entity" : "entity", {}};
        add_features(n, e);
        root.children.push_back(std::move(n));
    }
    for (const auto& r : m.relationships) {
        std::vector<std::string> sides;
        for (const auto& s : r.references) sides.push_back(s.entity + "." + s.reference);
        Node n{r.name, "relationship (" + join(sides) + ")", {}};
        add_features(n, r);
        root.children.push_back(std::move(n));
    }
    return root;
}

void add_properties(Node& n, const std::vector<doc::Property>& props) {
    for (const auto& p : props) {
        if (const auto* f = std::get_if<doc::Field>(&p.node)) {
            n.children.push_back({f->name,
                                  "field " + std::string(doc::to_string(f->type.kind)) + (f->type.is_array ? "[]" : "") +
                                      (f->is_key ? " key" : ""),
                                  {}});
        } else if (const auto* r = std::get_if<doc::DocReference>(&p.node)) {
            n.children.push_back({r->name,
                                  "reference " + r->target + " " + std::string(doc::to_string(r->type.kind)) +
                                      (r->type.is_array ? "[]" : ""),
                                  {}});
        } else {
            const auto& e = std::get<doc::Embedded>(p.node);
            Node c{e.name, e.is_many ? "embedded many" : "embedded one", {}};
            add_properties(c, e.aggregates);
            n.children.push_back(std::move(c));
        }
    }
}

Node flatten(const doc::DocumentSchema& m) {
    Node root{m.name, "document schema", {}};
    for (const auto& d : m.documents) {
        Node n{d.name, "document", {}};
        add_properties(n, d.properties);
        root.children.push_back(std::move(n));
    }
    return root;
}

std::string child_path(const std::string& parent, const std::string& name) {
    if (parent.empty()) return name;
    return parent + (parent.find('.') == std::string::npos ? "." : "/") + name;
}

void diff_nodes(const Node& a, const Node& b, const std::string& path, std::vector<Difference>& out) {
    auto find = [](const Node& n, const std::string& name) -> const Node* {
        for (const auto& c : n.children)
            if (c.name == name) return &c;
        return nullptr;
    };
    std::vector<const Node*> removed, added;
    std::vector<std::size_t> removed_at;
    std::vector<Difference> local;
    for (const auto& c : a.children) {
        const Node* o = find(b, c.name);
        if (!o) {
            removed.push_back(&c);
            continue;
        }
        const std::string p = child_path(path, c.name);
        if (c.sig != o->sig) local.push_back({Difference::Kind::Changed, p, c.sig, o->sig});
        diff_nodes(c, *o, p, local);
    }
    for (const auto& c : b.children)
        if (!find(a, c.name)) added.push_back(&c);
    std::vector<bool> used(added.size(), false);
    for (const Node* r : removed) {
        const std::string p = child_path(path, r->name);
        bool renamed = false;
        const std::string deep = r->deep();
        for (std::size_t i = 0; i < added.size() && !renamed; ++i)
            if (!used[i] && added[i]->deep() == deep) {
                used[i] = true;
                renamed = true;
                local.push_back({Difference::Kind::Renamed, p, r->name, added[i]->name});
            }
        if (!renamed) local.push_back({Difference::Kind::Removed, p, r->sig, ""});
    }
    for (std::size_t i = 0; i < added.size(); ++i)
        if (!used[i]) local.push_back({Difference::Kind::Added, child_path(path, added[i]->name), "", added[i]->sig});
    out.insert(out.end(), local.begin(), local.end());
}

}  // namespace

std::vector<Difference> diff_models(const AnyModel& a, const AnyModel& b) {
    if (a.index() != b.index()) throw Error("cannot diff models of different kinds");
    const Node na = std::visit([](const auto& m) { return flatten(m); }, a);
    const Node nb = std::visit([](const auto& m) { return flatten(m); }, b);
    std::vector<Difference> out;
    if (na.name != nb.name) out.push_back({Difference::Kind::Renamed, "@" + na.name, na.name, nb.name});
    if (na.sig != nb.sig) out.push_back({Difference::Kind::Changed, "@" + na.name, na.sig, nb.sig});
    diff_nodes(na, nb, "", out);
    return out;
}

std::string diff_json(const std::vector<Difference>& diffs) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& d : diffs)
        j.push_back({{"kind", std::string(to_string(d.kind))}, {"path", d.path}, {"before", d.before}, {"after", d.after}});
    return j.dump(2) + "\n";
}

}  // namespace umig::validation
