#include "umig/evolution.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace umig::evo {

namespace {

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

struct Word {
    std::string text;
    int column;
};

std::vector<Word> split_line(std::string_view line, int lineno) {
    std::vector<Word> out;
    std::size_t i = 0;
    while (i < line.size()) {
        const unsigned char c = static_cast<unsigned char>(line[i]);
        if (std::isspace(c) || c == ';') {
            ++i;
        } else if (line.compare(i, 2, "//") == 0) {
            break;
        } else if (line.compare(i, 2, "::") == 0) {
            out.push_back({"::", static_cast<int>(i) + 1});
            i += 2;
        } else if (std::isalnum(c) || c == '_' || c >= 0x80) {
            std::size_t start = i;
            while (i < line.size()) {
                const unsigned char d = static_cast<unsigned char>(line[i]);
                if (!(std::isalnum(d) || d == '_' || d >= 0x80)) break;
                ++i;
            }
            // Decimal(p,s) is kept as one word.
            if (i < line.size() && line[i] == '(') {
                auto close = line.find(')', i);
                if (close == std::string_view::npos) throw ParseError("unterminated type parameters", lineno, int(i) + 1);
                std::string w;
                for (std::size_t k = start; k <= close; ++k)
                    if (!std::isspace(static_cast<unsigned char>(line[k]))) w += line[k];
                out.push_back({w, static_cast<int>(start) + 1});
                i = close + 1;
                continue;
            }
            out.push_back({std::string(line.substr(start, i - start)), static_cast<int>(start) + 1});
        } else {
            throw ParseError(std::string("unexpected character '") + line[i] + "'", lineno, int(i) + 1);
        }
    }
    return out;
}

class Statement {
public:
    Statement(std::vector<Word> words, int line) : w_(std::move(words)), line_(line) {}

    bool keyword(std::size_t i, const char* kw) const { return i < w_.size() && upper(w_[i].text) == kw; }

    void expect(const char* kw) {
        if (!keyword(pos_, kw)) fail(std::string("expected ") + kw);
        ++pos_;
    }

    std::string ident() {
        if (pos_ >= w_.size() || w_[pos_].text == "::") fail("expected an identifier");
        return w_[pos_++].text;
    }

    std::pair<std::string, std::string> path() {
        std::string e = ident();
        if (pos_ >= w_.size() || w_[pos_].text != "::") fail("expected '::'");
        ++pos_;
        return {e, ident()};
    }

    void done() const {
        if (pos_ < w_.size()) fail("unexpected '" + w_[pos_].text + "'");
    }

    void skip(std::size_t n) { pos_ += n; }

    [[noreturn]] void fail(const std::string& what) const {
        const int col = pos_ < w_.size() ? w_[pos_].column : (w_.empty() ? 1 : w_.back().column);
        throw ParseError(what, line_, col);
    }

    int line() const { return line_; }
    int column_at(std::size_t i) const { return i < w_.size() ? w_[i].column : 1; }

private:
    std::vector<Word> w_;
    std::size_t pos_ = 0;
    int line_;
};

}  // namespace

std::vector<ChangeOp> parse_orion(std::string_view text) {
    std::vector<ChangeOp> ops;
    int lineno = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++lineno;
        auto words = split_line(text.substr(start, end - start), lineno);
        start = end + 1;
        if (words.empty()) continue;
        Statement st(std::move(words), lineno);
        if (st.keyword(0, "RENAME") && st.keyword(1, "ENTITY")) {
            st.skip(2);
            RenameEntity op;
            op.old_name = st.ident();
            st.expect("TO");
            op.new_name = st.ident();
            st.done();
            ops.emplace_back(std::move(op));
        } else if (st.keyword(0, "RENAME")) {
            st.skip(1);
            RenameFeature op;
            std::tie(op.entity, op.old_name) = st.path();
            st.expect("TO");
            op.new_name = st.ident();
            st.done();
            ops.emplace_back(std::move(op));
        } else if (st.keyword(0, "CAST") && st.keyword(1, "ATTR")) {
            st.skip(2);
            CastAttr op;
            std::tie(op.entity, op.attribute) = st.path();
            st.expect("TO");
            const int col = st.column_at(5);
            std::string type = st.ident();
            try {
                op.type = us::parse_data_type(type);
            } catch (const Error&) {
                throw ParseError("unknown type '" + type + "'", st.line(), col);
            }
            st.done();
            ops.emplace_back(std::move(op));
        } else if (st.keyword(0, "MORPH") && st.keyword(1, "REF")) {
            st.skip(2);
            MorphRef op;
            std::tie(op.entity, op.reference) = st.path();
            st.expect("TO");
            op.new_name = st.ident();
            st.done();
            ops.emplace_back(std::move(op));
        } else if (st.keyword(0, "DELETE")) {
            st.skip(1);
            DeleteFeature op;
            std::tie(op.entity, op.feature) = st.path();
            st.done();
            ops.emplace_back(std::move(op));
        } else {
            throw ParseError("unknown statement", lineno, st.column_at(0));
        }
    }
    return ops;
}

std::string to_string(const ChangeOp& op) {
    struct V {
        std::string operator()(const RenameEntity& o) const { return "RENAME ENTITY " + o.old_name + " TO " + o.new_name; }
        std::string operator()(const RenameFeature& o) const {
            return "RENAME " + o.entity + "::" + o.old_name + " TO " + o.new_name;
        }
        std::string operator()(const CastAttr& o) const {
            return "CAST ATTR " + o.entity + "::" + o.attribute + " TO " + us::to_string(o.type);
        }
        std::string operator()(const MorphRef& o) const {
            return "MORPH REF " + o.entity + "::" + o.reference + " TO " + o.new_name;
        }
        std::string operator()(const DeleteFeature& o) const { return "DELETE " + o.entity + "::" + o.feature; }
    };
    return std::visit(V{}, op);
}

namespace {

using IdMap = std::function<std::optional<ElementId>(const ElementId&)>;

/// Rebuilds the trace with every id passed through `f`; ids mapped to nullopt
/// are dropped, as are links left without sources or targets. Sources of
/// rename audit links are historical and left alone.
TraceStore rewrite(const TraceStore& t, const IdMap& f,
                   const std::function<void(TraceLink&)>& adjust = nullptr) {
    std::vector<TraceLink> out;
    for (const auto& l : t.links()) {
        TraceLink n;
        n.rule = l.rule;
        n.role = l.role;
        for (const auto& s : l.sources) {
            if (l.rule == kRenameRule) {
                n.sources.push_back(s);
            } else if (auto m = f(s)) {
                n.sources.push_back(*m);
            }
        }
        for (const auto& d : l.targets)
            if (auto m = f(d)) n.targets.push_back(*m);
        if (n.sources.empty() || n.targets.empty()) continue;
        if (adjust) adjust(n);
        out.push_back(std::move(n));
    }
    return TraceStore(std::move(out));
}

class Engine {
public:
    Engine(us::USchemaModel m, TraceStore t) : m_(std::move(m)), t_(std::move(t)) {}

    void apply(const ChangeOp& op) {
        std::visit([this](const auto& o) { this->run(o); }, op);
    }

    EvolutionResult finish() {
        throw_if_errors(us::validate_uschema(m_), "evolved model");
        return {std::move(m_), std::move(t_)};
    }

private:
    [[noreturn]] static void fail(const ChangeOp& op, const std::string& why) {
        throw Error(to_string(op) + ": " + why);
    }

    us::FeatureOwner* owner(const std::string& name) {
        if (auto* e = m_.entity(name)) return e;
        if (auto* r = m_.relationship(name)) return r;
        return nullptr;
    }

    us::FeatureOwner& owner_or_fail(const ChangeOp& op, const std::string& name) {
        auto* o = owner(name);
        if (!o) fail(op, "unknown entity '" + name + "'");
        return *o;
    }

    void run(const RenameEntity& op) {
        us::FeatureOwner& o = owner_or_fail(op, op.old_name);
        if (op.new_name != op.old_name) {
            if (owner(op.new_name)) fail(op, "entity '" + op.new_name + "' already exists");
            o.name = op.new_name;
            // Keep the conventional identifier name in step.
            const std::string old_pk = op.old_name + "_pk";
            const std::string new_pk = op.new_name + "_pk";
            bool pk_renamed = false;
            if (auto* k = o.find_as<us::Key>(old_pk); k && !o.find(new_pk)) {
                k->name = new_pk;
                pk_renamed = true;
            }
            for (auto& e : m_.entities) {
                for (auto& f : e.features) {
                    if (auto* r = std::get_if<us::Reference>(&f)) {
                        if (r->refs_to == op.old_name) r->refs_to = op.new_name;
                        if (r->featured_by == op.old_name) r->featured_by = op.new_name;
                    } else if (auto* g = std::get_if<us::Aggregate>(&f)) {
                        if (g->specified_by == op.old_name) g->specified_by = op.new_name;
                    }
                }
            }
            for (auto& rt : m_.relationships) {
                for (auto& f : rt.features)
                    if (auto* r = std::get_if<us::Reference>(&f); r && r->refs_to == op.old_name)
                        r->refs_to = op.new_name;
                for (auto& side : rt.references)
                    if (side.entity == op.old_name) side.entity = op.new_name;
            }
            const std::string from = "us:" + op.old_name;
            const std::string to = "us:" + op.new_name;
            t_ = rewrite(t_, [&](const ElementId& id) -> std::optional<ElementId> {
                const std::string& s = id.str();
                if (s == from) return ElementId(to);
                if (pk_renamed && s == from + "." + old_pk) return ElementId(to + "." + new_pk);
                if (s.size() > from.size() && s.compare(0, from.size(), from) == 0 && s[from.size()] == '.')
                    return ElementId(to + s.substr(from.size()));
                return id;
            });
        }
        t_.record({ids::us_type(op.old_name)}, {ids::us_type(op.new_name)}, std::string(kRenameRule));
    }

    void run(const RenameFeature& op) {
        us::FeatureOwner& o = owner_or_fail(op, op.entity);
        us::Feature* f = o.find(op.old_name);
        if (!f) fail(op, "unknown feature '" + op.old_name + "'");
        if (op.new_name != op.old_name) {
            if (o.find(op.new_name)) fail(op, "feature '" + op.new_name + "' already exists");
            us::feature_name(*f) = op.new_name;
            auto ren = [&](std::string& s) {
                if (s == op.old_name) s = op.new_name;
            };
            for (auto& g : o.features) {
                if (auto* k = std::get_if<us::Key>(&g)) std::for_each(k->attributes.begin(), k->attributes.end(), ren);
                if (auto* r = std::get_if<us::Reference>(&g))
                    std::for_each(r->attributes.begin(), r->attributes.end(), ren);
                if (auto* a = std::get_if<us::Attribute>(&g); a && a->owned_by_reference) ren(*a->owned_by_reference);
            }
            for (auto& rt : m_.relationships)
                for (auto& side : rt.references)
                    if (side.entity == o.name) ren(side.reference);
            const ElementId from = ids::us_feature(o.name, op.old_name);
            const ElementId to = ids::us_feature(o.name, op.new_name);
            t_ = rewrite(t_, [&](const ElementId& id) -> std::optional<ElementId> { return id == from ? to : id; });
        }
        t_.record({ids::us_feature(o.name, op.old_name)}, {ids::us_feature(o.name, op.new_name)},
                  std::string(kRenameRule));
    }

    void run(const CastAttr& op) {
        us::FeatureOwner& o = owner_or_fail(op, op.entity);
        auto* a = o.find_as<us::Attribute>(op.attribute);
        if (!a) fail(op, "unknown attribute '" + op.attribute + "'");
        a->type = op.type;
    }

    void run(const MorphRef& op) {
        us::EntityType* e = m_.entity(op.entity);
        if (!e) fail(op, m_.relationship(op.entity) ? "relationship types cannot aggregate" : "unknown entity '" + op.entity + "'");
        auto* r = e->find_as<us::Reference>(op.reference);
        if (!r) fail(op, "unknown reference '" + op.reference + "'");
        if (r->featured_by) fail(op, "references featured by a relationship type cannot be morphed");
        if (op.new_name != op.reference && e->find(op.new_name)) fail(op, "feature '" + op.new_name + "' already exists");
        if (r->refs_to == e->name) fail(op, "morphing a self reference would create cyclic aggregation");

        const us::Reference ref = *r;
        const std::vector<std::string> owned = ref.attributes;
        std::vector<us::Feature> kept;
        for (auto& f : e->features) {
            const std::string& n = us::feature_name(f);
            if (std::find(owned.begin(), owned.end(), n) != owned.end()) continue;
            if (n == ref.name) {
                kept.emplace_back(us::Aggregate{op.new_name, ref.refs_to, ref.lower_bound, ref.upper_bound});
                continue;
            }
            if (auto* k = std::get_if<us::Key>(&f)) {
                auto& v = k->attributes;
                v.erase(std::remove_if(v.begin(), v.end(),
                                       [&](const std::string& a) {
                                           return std::find(owned.begin(), owned.end(), a) != owned.end();
                                       }),
                        v.end());
                if (v.empty()) {
                    removed_.push_back(ids::us_feature(e->name, k->name));
                    continue;
                }
            }
            kept.push_back(std::move(f));
        }
        e->features = std::move(kept);

        bool still_referenced = false;
        auto scan = [&](const us::FeatureOwner& o) {
            for (const auto& f : o.features)
                if (const auto* x = std::get_if<us::Reference>(&f); x && x->refs_to == ref.refs_to) still_referenced = true;
        };
        for (const auto& x : m_.entities) scan(x);
        for (const auto& x : m_.relationships) scan(x);
        m_.entity(ref.refs_to)->root = still_referenced;

        const ElementId from = ids::us_feature(e->name, ref.name);
        const ElementId to = ids::us_feature(e->name, op.new_name);
        std::vector<ElementId> gone = removed_;
        removed_.clear();
        for (const auto& a : owned) gone.push_back(ids::us_feature(e->name, a));
        t_ = rewrite(
            t_,
            [&](const ElementId& id) -> std::optional<ElementId> {
                if (id == from) return to;
                if (std::find(gone.begin(), gone.end(), id) != gone.end()) return std::nullopt;
                return id;
            },
            [&](TraceLink& l) {
                const bool hits = std::find(l.targets.begin(), l.targets.end(), to) != l.targets.end();
                if (hits && (l.role == TraceRole::RefForward || l.role == TraceRole::RefReverse))
                    l.role = TraceRole::AggregateChild;
            });
    }

    void run(const DeleteFeature& op) {
        us::FeatureOwner& o = owner_or_fail(op, op.entity);
        const us::Feature* f = o.find(op.feature);
        if (!f) fail(op, "unknown feature '" + op.feature + "'");
        std::vector<std::string> names{op.feature};
        if (const auto* r = std::get_if<us::Reference>(f)) {
            if (r->featured_by) fail(op, "reference is a side of relationship type " + *r->featured_by);
            names.insert(names.end(), r->attributes.begin(), r->attributes.end());
        }
        auto doomed = [&](const std::string& n) { return std::find(names.begin(), names.end(), n) != names.end(); };
        std::vector<us::Feature> kept;
        std::vector<ElementId> gone;
        for (auto& g : o.features) {
            const std::string n = us::feature_name(g);
            if (doomed(n)) {
                gone.push_back(ids::us_feature(o.name, n));
                continue;
            }
            if (auto* k = std::get_if<us::Key>(&g)) {
                auto& v = k->attributes;
                v.erase(std::remove_if(v.begin(), v.end(), doomed), v.end());
                if (v.empty()) {
                    gone.push_back(ids::us_feature(o.name, n));
                    continue;
                }
            } else if (auto* r = std::get_if<us::Reference>(&g)) {
                auto& v = r->attributes;
                v.erase(std::remove_if(v.begin(), v.end(), doomed), v.end());
            }
            kept.push_back(std::move(g));
        }
        o.features = std::move(kept);
        t_ = rewrite(t_, [&](const ElementId& id) -> std::optional<ElementId> {
            if (std::find(gone.begin(), gone.end(), id) != gone.end()) return std::nullopt;
            return id;
        });
    }

    us::USchemaModel m_;
    TraceStore t_;
    std::vector<ElementId> removed_;
};

}  // namespace

EvolutionResult apply_changes(const us::USchemaModel& model, const std::vector<ChangeOp>& ops,
                              const TraceStore& trace) {
    Engine engine(model, trace);
    for (const auto& op : ops) engine.apply(op);
    return engine.finish();
}

}  // namespace umig::evo
