#include "umig/athena.hpp"

#include <cctype>
#include <set>

namespace umig::us {

namespace {

struct Token {
    enum class Kind { Ident, Int, Punct, End };
    Kind kind;
    std::string text;
    int line;
    int column;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        skip_space();
        if (pos_ >= text_.size()) return {Token::Kind::End, "", line_, col_};
        const int line = line_, col = col_;
        const char c = text_[pos_];
        auto is_ident_start = [](unsigned char ch) { return std::isalpha(ch) || ch == '_' || ch >= 0x80; };
        auto is_ident = [&](unsigned char ch) { return is_ident_start(ch) || std::isdigit(ch); };
        if (is_ident_start(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && is_ident(static_cast<unsigned char>(text_[pos_]))) bump();
            return {Token::Kind::Ident, std::string(text_.substr(start, pos_ - start)), line, col};
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) bump();
            return {Token::Kind::Int, std::string(text_.substr(start, pos_ - start)), line, col};
        }
        static const std::string punct = "{},:<>()+*";
        if (punct.find(c) != std::string::npos) {
            bump();
            return {Token::Kind::Punct, std::string(1, c), line, col};
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
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

    void skip_space() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') bump();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
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

class Parser {
public:
    explicit Parser(std::string_view text) : lex_(text) { advance(); }

    USchemaModel parse() {
        USchemaModel m;
        expect_word("Schema");
        m.name = expect_ident("schema name").text;
        expect_punct(":");
        Token v = tok_;
        if (v.kind != Token::Kind::Int) fail("expected schema version");
        m.version = std::stoi(v.text);
        advance();

        while (tok_.kind != Token::Kind::End) m.entities.push_back(parse_entity());

        for (const auto& [target, where] : targets_) {
            if (!m.entity(target))
                throw ParseError("unresolved type name '" + target + "'", where.line, where.column);
        }
        return m;
    }

private:
    EntityType parse_entity() {
        EntityType e;
        if (tok_.kind == Token::Kind::Ident && (tok_.text == "Root" || tok_.text == "root")) {
            e.root = true;
            advance();
        }
        if (!(tok_.kind == Token::Kind::Ident && (tok_.text == "entity" || tok_.text == "Entity")))
            fail("expected 'entity'");
        advance();
        Token name = expect_ident("entity name");
        e.name = name.text;
        if (!entity_names_.insert(e.name).second)
            throw ParseError("duplicate entity '" + e.name + "'", name.line, name.column);
        expect_punct("{");

        Key id{e.name + "_pk", true, {}};
        std::set<std::string> names;
        if (!is_punct("}")) {
            for (;;) {
                bool is_key = false;
                if (is_punct("+")) {
                    is_key = true;
                    advance();
                }
                Token fname = expect_ident("feature name");
                if (!names.insert(fname.text).second)
                    throw ParseError("duplicate feature '" + fname.text + "'", fname.line, fname.column);
                expect_punct(":");
                e.features.push_back(parse_feature(fname, is_key));
                if (is_key) id.attributes.push_back(fname.text);
                if (is_punct(",")) {
                    advance();
                    continue;
                }
                break;
            }
        }
        expect_punct("}");
        if (!id.attributes.empty()) {
            if (e.find(id.name)) fail("key name '" + id.name + "' collides with a feature");
            e.features.emplace_back(std::move(id));
        }
        return e;
    }

    Feature parse_feature(const Token& fname, bool is_key) {
        Token type = expect_ident("type name");
        if (type.text == "Ref" || type.text == "Aggr") {
            if (is_key) throw ParseError("'+' is only allowed on scalar attributes", fname.line, fname.column);
            expect_punct("<");
            Token target = expect_ident("entity name");
            expect_punct(">");
            targets_.push_back({target.text, target});
            const bool many = take_star();
            const int lo = many ? 0 : 1;
            const int hi = many ? kUnbounded : 1;
            if (type.text == "Ref") return Reference{fname.text, target.text, lo, hi, {}, std::nullopt};
            return Aggregate{fname.text, target.text, lo, hi};
        }
        DataType dt;
        if (type.text == "Decimal") {
            expect_punct("(");
            int p = expect_int();
            expect_punct(",");
            int s = expect_int();
            expect_punct(")");
            if (!(p >= s && s >= 0)) throw ParseError("Decimal requires p >= s >= 0", type.line, type.column);
            dt = DataType::decimal(p, s);
        } else {
            try {
                dt = parse_data_type(type.text);
            } catch (const Error&) {
                throw ParseError("unknown type '" + type.text + "'", type.line, type.column);
            }
        }
        if (take_star()) throw ParseError("multiplicity is not supported on scalar attributes", fname.line, fname.column);
        return Attribute{fname.text, dt, false, std::nullopt};
    }

    bool take_star() {
        if (is_punct("*")) {
            advance();
            return true;
        }
        return false;
    }

    void advance() { tok_ = lex_.next(); }
    bool is_punct(const char* p) const { return tok_.kind == Token::Kind::Punct && tok_.text == p; }

    [[noreturn]] void fail(const std::string& what) const {
        std::string found = tok_.kind == Token::Kind::End ? "end of input" : "'" + tok_.text + "'";
        throw ParseError(what + ", found " + found, tok_.line, tok_.column);
    }

    void expect_punct(const char* p) {
        if (!is_punct(p)) fail(std::string("expected '") + p + "'");
        advance();
    }

    void expect_word(const char* w) {
        if (!(tok_.kind == Token::Kind::Ident && tok_.text == w)) fail(std::string("expected '") + w + "'");
        advance();
    }

    Token expect_ident(const char* what) {
        if (tok_.kind != Token::Kind::Ident) fail(std::string("expected ") + what);
        Token t = tok_;
        advance();
        return t;
    }

    int expect_int() {
        if (tok_.kind != Token::Kind::Int) fail("expected integer");
        int v = std::stoi(tok_.text);
        advance();
        return v;
    }

    Lexer lex_;
    Token tok_{};
    std::set<std::string> entity_names_;
    std::vector<std::pair<std::string, Token>> targets_;
};

std::string multiplicity(int upper) { return upper == kUnbounded ? "*" : ""; }

std::string bounds_text(int lo, int hi) {
    return std::to_string(lo) + ".." + (hi == kUnbounded ? std::string("*") : std::to_string(hi));
}

}  // namespace

USchemaModel parse_athena(std::string_view text) { return Parser(text).parse(); }

std::string print_athena(const USchemaModel& model) {
    std::string out = "Schema " + model.name + ":" + std::to_string(model.version) + "\n";

    for (const auto& e : model.entities) {
        const Key* id = e.id_key();
        std::set<std::string> id_attrs;
        if (id) id_attrs.insert(id->attributes.begin(), id->attributes.end());

        std::vector<std::string> lines;
        std::vector<std::string> notes;
        for (const auto& f : e.features) {
            if (const auto* a = std::get_if<Attribute>(&f)) {
                lines.push_back((id_attrs.count(a->name) ? "+" : "") + a->name + ": " + to_string(a->type));
                if (a->owned_by_reference) notes.push_back(a->name + " belongs to reference " + *a->owned_by_reference);
            } else if (const auto* r = std::get_if<Reference>(&f)) {
                lines.push_back(r->name + ": Ref<" + r->refs_to + ">" + multiplicity(r->upper_bound));
                if (r->featured_by) notes.push_back(r->name + " is featured by " + *r->featured_by);
                if (r->lower_bound != (r->upper_bound == kUnbounded ? 0 : 1))
                    notes.push_back(r->name + " bounds " + bounds_text(r->lower_bound, r->upper_bound));
            } else if (const auto* g = std::get_if<Aggregate>(&f)) {
                lines.push_back(g->name + ": Aggr<" + g->specified_by + ">" + multiplicity(g->upper_bound));
                if (g->lower_bound != (g->upper_bound == kUnbounded ? 0 : 1))
                    notes.push_back(g->name + " bounds " + bounds_text(g->lower_bound, g->upper_bound));
            } else if (const auto* k = std::get_if<Key>(&f)) {
                if (k->is_id && k->name == e.name + "_pk") continue;
                std::string cols;
                for (const auto& c : k->attributes) cols += (cols.empty() ? "" : ", ") + c;
                notes.push_back(std::string(k->is_id ? "identifier" : "key") + " " + k->name + " (" + cols + ")");
            }
        }

        out += "\n";
        out += e.root ? "Root entity " : "Entity ";
        out += e.name + " {";
        if (lines.empty()) {
            out += " }\n";
        } else {
            out += "\n";
            for (std::size_t i = 0; i < lines.size(); ++i)
                out += "  " + lines[i] + (i + 1 < lines.size() ? ",\n" : "\n");
            out += "}\n";
        }
        for (const auto& n : notes) out += "// " + e.name + ": " + n + "\n";
    }

    for (const auto& rt : model.relationships) {
        out += "\n// Relationship " + rt.name + "\n";
        for (const auto& f : rt.features) {
            if (const auto* a = std::get_if<Attribute>(&f))
                out += "//   " + a->name + ": " + to_string(a->type) + "\n";
            else if (const auto* r = std::get_if<Reference>(&f))
                out += "//   " + r->name + ": Ref<" + r->refs_to + ">" + multiplicity(r->upper_bound) + "\n";
        }
        for (const auto& side : rt.references)
            out += "//   side " + side.entity + "." + side.reference + "\n";
    }
    return out;
}

}  // namespace umig::us
