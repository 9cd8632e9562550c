#include "umig/relational.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace umig::rel {

namespace {

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

struct BaseName {
    SqlType::Base base;
    const char* name;
};

constexpr BaseName kBases[] = {
    {SqlType::Base::Char, "CHAR"},           {SqlType::Base::Varchar, "VARCHAR"},
    {SqlType::Base::Text, "TEXT"},           {SqlType::Base::Int, "INT"},
    {SqlType::Base::Bigint, "BIGINT"},       {SqlType::Base::Smallint, "SMALLINT"},
    {SqlType::Base::Boolean, "BOOLEAN"},     {SqlType::Base::Date, "DATE"},
    {SqlType::Base::Timestamp, "TIMESTAMP"}, {SqlType::Base::Decimal, "DECIMAL"},
    {SqlType::Base::Numeric, "NUMERIC"},     {SqlType::Base::Double, "DOUBLE"},
    {SqlType::Base::Real, "REAL"},
};

}  // namespace

std::string to_string(const SqlType& t) {
    std::string s;
    for (const auto& b : kBases)
        if (b.base == t.base) s = b.name;
    if (t.length) {
        s += "(" + std::to_string(*t.length);
        if (t.scale) s += "," + std::to_string(*t.scale);
        s += ")";
    }
    return s;
}

SqlType parse_sql_type(std::string_view text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    std::string head = s.substr(0, s.find('('));
    std::optional<int> n, sc;
    if (head.size() < s.size()) {
        if (s.back() != ')') throw Error("malformed SQL type '" + std::string(text) + "'");
        std::string args = s.substr(head.size() + 1, s.size() - head.size() - 2);
        auto comma = args.find(',');
        try {
            n = std::stoi(args.substr(0, comma));
            if (comma != std::string::npos) sc = std::stoi(args.substr(comma + 1));
        } catch (const std::exception&) {
            throw Error("malformed SQL type '" + std::string(text) + "'");
        }
    }
    if (head == "INTEGER") head = "INT";
    if (head == "DOUBLEPRECISION") head = "DOUBLE";
    for (const auto& b : kBases) {
        if (head != b.name) continue;
        const bool sized = b.base == SqlType::Base::Char || b.base == SqlType::Base::Varchar;
        const bool numeric = b.base == SqlType::Base::Decimal || b.base == SqlType::Base::Numeric;
        if (!sized && !numeric && n) throw Error("type " + head + " takes no parameters");
        if (sized && sc) throw Error("type " + head + " takes one parameter");
        if ((n && *n <= 0) || (sc && *sc < 0) || (n && sc && *sc > *n))
            throw Error("invalid parameters for type " + head);
        return SqlType{b.base, n, sc};
    }
    throw Error("unknown SQL type '" + std::string(text) + "'");
}

std::string to_string(ReferentialAction a) {
    switch (a) {
        case ReferentialAction::Cascade: return "CASCADE";
        case ReferentialAction::SetNull: return "SET NULL";
        case ReferentialAction::NoAction: return "NO ACTION";
        case ReferentialAction::Restrict: return "RESTRICT";
        case ReferentialAction::SetDefault: return "SET DEFAULT";
    }
    return "NO ACTION";
}

ReferentialAction parse_referential_action(std::string_view text) {
    std::string u;
    for (char c : upper(text))
        if (c != '_' && c != ' ') u += c;
    if (u == "CASCADE") return ReferentialAction::Cascade;
    if (u == "SETNULL") return ReferentialAction::SetNull;
    if (u == "NOACTION") return ReferentialAction::NoAction;
    if (u == "RESTRICT") return ReferentialAction::Restrict;
    if (u == "SETDEFAULT") return ReferentialAction::SetDefault;
    throw Error("unknown referential action '" + std::string(text) + "'");
}

const Column* Table::column(std::string_view n) const {
    for (const auto& c : columns)
        if (c.name == n) return &c;
    return nullptr;
}

const RKey* Table::primary_key() const {
    for (const auto& k : keys)
        if (k.is_pk) return &k;
    return nullptr;
}

const RKey* Table::key(std::string_view constraint) const {
    for (const auto& k : keys)
        if (k.constraint_name == constraint) return &k;
    return nullptr;
}

const FKey* Table::fkey(std::string_view constraint) const {
    for (const auto& f : fkeys)
        if (f.constraint_name == constraint) return &f;
    return nullptr;
}

bool Table::is_fk_column(std::string_view c) const {
    for (const auto& f : fkeys)
        if (std::find(f.columns.begin(), f.columns.end(), c) != f.columns.end()) return true;
    return false;
}

const Table* RelationalSchema::table(std::string_view n) const {
    for (const auto& t : tables)
        if (t.name == n) return &t;
    return nullptr;
}

Table* RelationalSchema::table(std::string_view n) {
    for (auto& t : tables)
        if (t.name == n) return &t;
    return nullptr;
}

const RKey* RelationalSchema::target_key(const FKey& fk) const {
    const Table* t = table(fk.ref_table);
    return t ? t->key(fk.ref_key) : nullptr;
}

std::vector<Diagnostic> validate_relational(const RelationalSchema& schema) {
    std::vector<Diagnostic> out;
    auto error = [&](std::string code, std::string path, std::string msg) {
        out.push_back({Diagnostic::Severity::Error, std::move(code), std::move(path), std::move(msg)});
    };
    std::set<std::string> tables;
    for (const auto& t : schema.tables) {
        if (!tables.insert(t.name).second) error("duplicate table", t.name, "table name is not unique");
        std::set<std::string> cols;
        for (const auto& c : t.columns)
            if (!cols.insert(c.name).second) error("duplicate column", t.name + "." + c.name, "column name is not unique");
        std::set<std::string> constraints;
        int pks = 0;
        for (const auto& k : t.keys) {
            const std::string path = t.name + "." + k.constraint_name;
            if (!constraints.insert(k.constraint_name).second)
                error("duplicate constraint", path, "constraint name is not unique");
            if (k.is_pk) ++pks;
            if (k.columns.empty()) error("empty key", path, "key lists no columns");
            for (const auto& c : k.columns)
                if (!t.column(c)) error("unknown column", path, "key column '" + c + "' does not exist");
        }
        if (pks > 1) error("multiple primary keys", t.name, "more than one primary key");
        for (const auto& f : t.fkeys) {
            const std::string path = t.name + "." + f.constraint_name;
            if (!constraints.insert(f.constraint_name).second)
                error("duplicate constraint", path, "constraint name is not unique");
            for (const auto& c : f.columns)
                if (!t.column(c)) error("unknown column", path, "foreign key column '" + c + "' does not exist");
            const RKey* target = schema.target_key(f);
            if (!target)
                error("unresolved foreign key", path, "target key " + f.ref_table + "." + f.ref_key + " not found");
            else if (target->columns.size() != f.columns.size())
                error("foreign key arity", path, "column count differs from the referenced key");
        }
    }
    return out;
}

bool fk_in_pk(const Table& t, const FKey& fk) {
    if (std::find(t.fkeys.begin(), t.fkeys.end(), fk) == t.fkeys.end())
        throw Error("foreign key " + fk.constraint_name + " does not belong to table " + t.name);
    const RKey* pk = t.primary_key();
    if (!pk) return false;
    return std::all_of(fk.columns.begin(), fk.columns.end(), [&](const std::string& c) {
        return std::find(pk->columns.begin(), pk->columns.end(), c) != pk->columns.end();
    });
}

std::vector<const FKey*> identifying_fkeys(const Table& t) {
    std::vector<const FKey*> out;
    for (const auto& f : t.fkeys)
        if (fk_in_pk(t, f)) out.push_back(&f);
    return out;
}

bool is_weak(const Table& t) { return identifying_fkeys(t).size() == 1; }

bool is_mn(const Table& t) { return identifying_fkeys(t).size() >= 2; }

}  // namespace umig::rel
