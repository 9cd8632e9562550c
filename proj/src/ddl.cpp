#include "umig/ddl.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace umig::rel {

namespace {

struct Token {
    enum class Kind { Word, Quoted, Number, String, Punct, End };
    Kind kind = Kind::End;
    std::string text;  ///< words are lowercased
    int line = 1;
    int column = 1;
};

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip();
            Token t;
            t.line = line_;
            t.column = col_;
            if (pos_ >= text_.size()) {
                out.push_back(t);
                return out;
            }
            const unsigned char c = static_cast<unsigned char>(text_[pos_]);
            if (std::isalpha(c) || c == '_' || c >= 0x80) {
                std::size_t start = pos_;
                while (pos_ < text_.size()) {
                    const unsigned char d = static_cast<unsigned char>(text_[pos_]);
                    if (!(std::isalnum(d) || d == '_' || d == '$' || d >= 0x80)) break;
                    bump();
                }
                t.kind = Token::Kind::Word;
                t.text = lower(text_.substr(start, pos_ - start));
            } else if (std::isdigit(c) || (c == '-' && pos_ + 1 < text_.size() &&
                                            std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
                std::size_t start = pos_;
                bump();
                while (pos_ < text_.size() &&
                       (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
                    bump();
                t.kind = Token::Kind::Number;
                t.text = std::string(text_.substr(start, pos_ - start));
            } else if (c == '\'' || c == '"') {
                const char q = static_cast<char>(c);
                std::string value;
                bump();
                for (;;) {
                    if (pos_ >= text_.size()) throw ParseError("unterminated quoted text", t.line, t.column);
                    if (text_[pos_] == q) {
                        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == q) {
                            value += q;
                            bump();
                            bump();
                            continue;
                        }
                        bump();
                        break;
                    }
                    value += text_[pos_];
                    bump();
                }
                t.kind = q == '\'' ? Token::Kind::String : Token::Kind::Quoted;
                t.text = q == '\'' ? value : lower(value);
            } else if (std::string_view("(),;.").find(static_cast<char>(c)) != std::string_view::npos) {
                t.kind = Token::Kind::Punct;
                t.text = std::string(1, static_cast<char>(c));
                bump();
            } else {
                throw ParseError(std::string("unexpected character '") + static_cast<char>(c) + "'", t.line, t.column);
            }
            out.push_back(std::move(t));
        }
    }

private:
    void bump() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip() {
        while (pos_ < text_.size()) {
            if (text_.compare(pos_, 2, "--") == 0) {
                while (pos_ < text_.size() && text_[pos_] != '\n') bump();
            } else if (text_.compare(pos_, 2, "/*") == 0) {
                const int l = line_, c = col_;
                bump();
                bump();
                while (pos_ < text_.size() && text_.compare(pos_, 2, "*/") != 0) bump();
                if (pos_ >= text_.size()) throw ParseError("unterminated comment", l, c);
                bump();
                bump();
            } else if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
                bump();
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

struct PendingFk {
    std::string table;
    std::size_t index;
    std::vector<std::string> ref_columns;  ///< empty means "the primary key"
    Token where;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    RelationalSchema parse(std::string name) {
        RelationalSchema s;
        s.name = std::move(name);
        while (peek().kind != Token::Kind::End) {
            if (is_punct(";")) {
                advance();
                continue;
            }
            s.tables.push_back(parse_create(s));
        }
        resolve(s);
        return s;
    }

private:
    Table parse_create(const RelationalSchema& s) {
        expect_word("create");
        expect_word("table");
        if (is_word("if")) {
            advance();
            expect_word("not");
            expect_word("exists");
        }
        Token name_tok = peek();
        Table t;
        t.name = identifier("table name");
        if (s.table(t.name) || seen_tables_.count(t.name))
            throw ParseError("duplicate table '" + t.name + "'", name_tok.line, name_tok.column);
        seen_tables_.insert(t.name);
        expect_punct("(");

        std::vector<std::pair<RKey, bool>> keys;  // (key, synthesized name)
        std::vector<std::pair<FKey, bool>> fkeys;
        std::vector<PendingFk> pending;
        for (;;) {
            std::optional<std::string> cname;
            if (is_word("constraint")) {
                advance();
                cname = identifier("constraint name");
            }
            if (is_word("primary")) {
                Token where = peek();
                advance();
                expect_word("key");
                RKey k{cname.value_or(""), true, column_list()};
                add_key(keys, std::move(k), !cname.has_value(), where);
            } else if (is_word("unique")) {
                Token where = peek();
                advance();
                RKey k{cname.value_or(""), false, column_list()};
                add_key(keys, std::move(k), !cname.has_value(), where);
            } else if (is_word("foreign")) {
                Token where = peek();
                advance();
                expect_word("key");
                FKey f;
                f.constraint_name = cname.value_or("");
                f.columns = column_list();
                parse_references(t.name, f, fkeys.size(), pending, where);
                fkeys.push_back({std::move(f), !cname.has_value()});
            } else {
                if (cname) fail("expected a table constraint after CONSTRAINT name");
                parse_column(t, keys, fkeys, pending);
            }
            if (is_punct(",")) {
                advance();
                continue;
            }
            break;
        }
        expect_punct(")");
        if (!is_punct(";")) fail("expected ';'");
        advance();

        // Synthesized names must not collide with explicit ones.
        std::set<std::string> used;
        for (const auto& [k, synth] : keys)
            if (!synth) used.insert(k.constraint_name);
        for (const auto& [f, synth] : fkeys)
            if (!synth) used.insert(f.constraint_name);
        auto numbered = [&](const std::string& base, int& counter) {
            for (;;) {
                std::string n = base + std::to_string(++counter);
                if (used.insert(n).second) return n;
            }
        };
        int uk = 0, fk = 0, pkc = 0;
        for (auto& [k, synth] : keys) {
            if (synth) {
                if (!k.is_pk) {
                    k.constraint_name = numbered(t.name + "_uk", uk);
                } else if (used.insert(t.name + "_pk").second) {
                    k.constraint_name = t.name + "_pk";
                } else {
                    k.constraint_name = numbered(t.name + "_pk", pkc);
                }
            }
            t.keys.push_back(std::move(k));
        }
        for (auto& [f, synth] : fkeys) {
            if (synth) f.constraint_name = numbered(t.name + "_fk", fk);
            t.fkeys.push_back(std::move(f));
        }
        for (auto& p : pending) pending_.push_back(std::move(p));

        // Primary key columns are implicitly NOT NULL.
        if (const RKey* pk = t.primary_key())
            for (auto& c : t.columns)
                if (std::find(pk->columns.begin(), pk->columns.end(), c.name) != pk->columns.end()) c.nullable = false;

        for (const auto& k : t.keys)
            for (const auto& c : k.columns)
                if (!t.column(c)) fail_at(name_tok, "key column '" + c + "' is not a column of " + t.name);
        for (const auto& f : t.fkeys)
            for (const auto& c : f.columns)
                if (!t.column(c)) fail_at(name_tok, "foreign key column '" + c + "' is not a column of " + t.name);
        return t;
    }

    void add_key(std::vector<std::pair<RKey, bool>>& keys, RKey k, bool synth, const Token& where) {
        if (k.is_pk)
            for (const auto& [other, s] : keys)
                if (other.is_pk) fail_at(where, "multiple primary keys");
        keys.push_back({std::move(k), synth});
    }

    void parse_column(Table& t, std::vector<std::pair<RKey, bool>>& keys, std::vector<std::pair<FKey, bool>>& fkeys,
                      std::vector<PendingFk>& pending) {
        Token where = peek();
        Column c;
        c.name = identifier("column name");
        if (t.column(c.name)) fail_at(where, "duplicate column '" + c.name + "'");
        c.type = parse_type();
        for (;;) {
            if (is_word("not")) {
                advance();
                expect_word("null");
                c.nullable = false;
            } else if (is_word("null")) {
                advance();
            } else if (is_word("default")) {
                advance();
                c.default_value = literal();
            } else if (is_word("primary")) {
                Token w = peek();
                advance();
                expect_word("key");
                add_key(keys, RKey{"", true, {c.name}}, true, w);
            } else if (is_word("unique")) {
                Token w = peek();
                advance();
                add_key(keys, RKey{"", false, {c.name}}, true, w);
            } else if (is_word("references") || is_word("constraint")) {
                std::optional<std::string> cname;
                if (is_word("constraint")) {
                    advance();
                    cname = identifier("constraint name");
                }
                Token w = peek();
                FKey f;
                f.constraint_name = cname.value_or("");
                f.columns = {c.name};
                parse_references(t.name, f, fkeys.size(), pending, w);
                fkeys.push_back({std::move(f), !cname.has_value()});
            } else {
                break;
            }
        }
        t.columns.push_back(std::move(c));
    }

    void parse_references(const std::string& table, FKey& f, std::size_t index, std::vector<PendingFk>& pending,
                          const Token& where) {
        expect_word("references");
        f.ref_table = identifier("referenced table");
        PendingFk p{table, index, {}, where};
        if (is_punct("(")) p.ref_columns = column_list();
        while (is_word("on")) {
            advance();
            bool del = false;
            if (is_word("delete")) {
                del = true;
            } else if (!is_word("update")) {
                fail("expected DELETE or UPDATE");
            }
            advance();
            ReferentialAction a;
            if (is_word("cascade")) {
                advance();
                a = ReferentialAction::Cascade;
            } else if (is_word("restrict")) {
                advance();
                a = ReferentialAction::Restrict;
            } else if (is_word("no")) {
                advance();
                expect_word("action");
                a = ReferentialAction::NoAction;
            } else if (is_word("set")) {
                advance();
                if (is_word("null")) {
                    a = ReferentialAction::SetNull;
                } else if (is_word("default")) {
                    a = ReferentialAction::SetDefault;
                } else {
                    fail("expected NULL or DEFAULT");
                }
                advance();
            } else {
                fail("expected a referential action");
            }
            (del ? f.on_delete : f.on_update) = a;
        }
        pending.push_back(std::move(p));
    }

    SqlType parse_type() {
        Token where = peek();
        std::string head = identifier("type name");
        if (head == "double" && is_word("precision")) advance();
        std::string spelled = head;
        if (is_punct("(")) {
            advance();
            spelled += "(" + number();
            if (is_punct(",")) {
                advance();
                spelled += "," + number();
            }
            expect_punct(")");
            spelled += ")";
        }
        try {
            return parse_sql_type(spelled);
        } catch (const Error& e) {
            throw ParseError(e.what(), where.line, where.column);
        }
    }

    std::string literal() {
        const Token& t = peek();
        std::string out;
        if (t.kind == Token::Kind::String) {
            out = "'";
            for (char c : t.text) out += c == '\'' ? std::string("''") : std::string(1, c);
            out += "'";
            advance();
        } else if (t.kind == Token::Kind::Number || t.kind == Token::Kind::Word) {
            out = t.text;
            advance();
            if (is_punct("(")) {
                int depth = 0;
                do {
                    if (is_punct("(")) ++depth;
                    if (is_punct(")")) --depth;
                    if (peek().kind == Token::Kind::End) fail("unterminated default expression");
                    out += peek().text;
                    advance();
                } while (depth > 0);
            }
        } else {
            fail("expected a default literal");
        }
        return out;
    }

    std::vector<std::string> column_list() {
        expect_punct("(");
        std::vector<std::string> cols;
        for (;;) {
            cols.push_back(identifier("column name"));
            if (is_punct(",")) {
                advance();
                continue;
            }
            break;
        }
        expect_punct(")");
        return cols;
    }

    void resolve(RelationalSchema& s) {
        for (const auto& p : pending_) {
            Table* t = s.table(p.table);
            FKey& f = t->fkeys[p.index];
            const Table* target = s.table(f.ref_table);
            if (!target) fail_at(p.where, "foreign key references unknown table '" + f.ref_table + "'");
            std::vector<std::string> wanted = p.ref_columns;
            if (wanted.empty()) {
                const RKey* pk = target->primary_key();
                if (!pk) fail_at(p.where, "referenced table '" + target->name + "' has no primary key");
                wanted = pk->columns;
            }
            if (wanted.size() != f.columns.size())
                fail_at(p.where, "foreign key column count differs from the referenced column list");

            const RKey* match = nullptr;
            auto same_set = [&](const RKey& k) {
                if (k.columns.size() != wanted.size()) return false;
                return std::is_permutation(k.columns.begin(), k.columns.end(), wanted.begin());
            };
            if (const RKey* pk = target->primary_key(); pk && same_set(*pk)) match = pk;
            for (const auto& k : target->keys)
                if (!match && !k.is_pk && same_set(k)) match = &k;
            if (!match) fail_at(p.where, "no key of '" + target->name + "' matches the referenced columns");

            // Order the local columns after the referenced key's columns.
            std::vector<std::string> ordered;
            for (const auto& kc : match->columns) {
                auto at = std::find(wanted.begin(), wanted.end(), kc) - wanted.begin();
                ordered.push_back(f.columns[static_cast<std::size_t>(at)]);
            }
            f.columns = std::move(ordered);
            f.ref_key = match->constraint_name;
        }
    }

    const Token& peek() const { return toks_[pos_]; }
    void advance() {
        if (pos_ + 1 < toks_.size()) ++pos_;
    }
    bool is_word(const char* w) const { return peek().kind == Token::Kind::Word && peek().text == w; }
    bool is_punct(const char* p) const { return peek().kind == Token::Kind::Punct && peek().text == p; }

    [[noreturn]] void fail_at(const Token& t, const std::string& what) const {
        throw ParseError(what, t.line, t.column);
    }
    [[noreturn]] void fail(const std::string& what) const {
        const Token& t = peek();
        std::string found = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
        throw ParseError(what + ", found " + found, t.line, t.column);
    }

    void expect_word(const char* w) {
        if (!is_word(w)) fail(std::string("expected ") + w);
        advance();
    }
    void expect_punct(const char* p) {
        if (!is_punct(p)) fail(std::string("expected '") + p + "'");
        advance();
    }
    std::string identifier(const char* what) {
        const Token& t = peek();
        if (t.kind != Token::Kind::Word && t.kind != Token::Kind::Quoted) fail(std::string("expected ") + what);
        std::string s = t.text;
        advance();
        return s;
    }
    std::string number() {
        if (peek().kind != Token::Kind::Number) fail("expected a number");
        std::string s = peek().text;
        advance();
        return s;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::set<std::string> seen_tables_;
    std::vector<PendingFk> pending_;
};

std::optional<std::string> header_name(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    constexpr std::string_view tag = "-- schema:";
    if (text.compare(i, tag.size(), tag) != 0) return std::nullopt;
    i += tag.size();
    std::size_t end = text.find('\n', i);
    std::string n(text.substr(i, end == std::string_view::npos ? std::string_view::npos : end - i));
    n.erase(0, n.find_first_not_of(" \t\r"));
    n.erase(n.find_last_not_of(" \t\r") + 1);
    if (n.empty()) return std::nullopt;
    return n;
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
    return s;
}

}  // namespace

RelationalSchema parse_ddl(std::string_view text, std::optional<std::string> name) {
    std::string n = name ? *name : header_name(text).value_or("schema");
    Parser p(Lexer(text).run());
    return p.parse(std::move(n));
}

std::string print_ddl(const RelationalSchema& schema) {
    std::string out = "-- schema: " + schema.name + "\n";
    for (const auto& t : schema.tables) {
        out += "\nCREATE TABLE " + t.name + " (\n";
        std::vector<std::string> lines;
        for (const auto& c : t.columns) {
            std::string l = c.name + " " + to_string(c.type);
            if (!c.nullable) l += " NOT NULL";
            if (c.default_value) l += " DEFAULT " + *c.default_value;
            lines.push_back(std::move(l));
        }
        for (const auto& k : t.keys)
            lines.push_back("CONSTRAINT " + k.constraint_name + (k.is_pk ? " PRIMARY KEY (" : " UNIQUE (") +
                            join(k.columns) + ")");
        for (const auto& f : t.fkeys) {
            std::string l = "CONSTRAINT " + f.constraint_name + " FOREIGN KEY (" + join(f.columns) + ") REFERENCES " +
                            f.ref_table;
            const RKey* k = schema.target_key(f);
            if (k) l += " (" + join(k->columns) + ")";
            if (f.on_delete != ReferentialAction::NoAction) l += " ON DELETE " + to_string(f.on_delete);
            if (f.on_update != ReferentialAction::NoAction) l += " ON UPDATE " + to_string(f.on_update);
            lines.push_back(std::move(l));
        }
        for (std::size_t i = 0; i < lines.size(); ++i) out += "  " + lines[i] + (i + 1 < lines.size() ? ",\n" : "\n");
        out += ");\n";
    }
    return out;
}

}  // namespace umig::rel
