#include "umig/transform.hpp"

#include <cctype>

namespace umig {

namespace type_map {

us::DataType rel_to_us(const rel::SqlType& t) {
    using B = rel::SqlType::Base;
    using K = us::DataType::Kind;
    switch (t.base) {
        case B::Char:
        case B::Varchar:
        case B::Text: return us::DataType::of(K::String);
        case B::Int:
        case B::Bigint:
        case B::Smallint: return us::DataType::of(K::Integer);
        case B::Boolean: return us::DataType::of(K::Boolean);
        case B::Date:
        case B::Timestamp: return us::DataType::of(K::Date);
        case B::Decimal:
        case B::Numeric: return us::DataType::decimal(t.length.value_or(38), t.scale.value_or(0));
        case B::Double:
        case B::Real: return us::DataType::of(K::Double);
    }
    throw Error("unknown SQL type");
}

doc::Primitive us_to_doc(const us::DataType& t) {
    using K = us::DataType::Kind;
    switch (t.kind) {
        case K::String:
        case K::Date: return doc::Primitive::String;
        case K::Integer: return doc::Primitive::Integer;
        case K::Boolean: return doc::Primitive::Boolean;
        case K::Double:
        case K::Decimal: return doc::Primitive::Double;
    }
    throw Error("unknown pivot type");
}

us::DataType doc_to_us(doc::Primitive p) {
    using K = us::DataType::Kind;
    switch (p) {
        case doc::Primitive::String: return us::DataType::of(K::String);
        case doc::Primitive::Integer: return us::DataType::of(K::Integer);
        case doc::Primitive::Boolean: return us::DataType::of(K::Boolean);
        case doc::Primitive::Double: return us::DataType::of(K::Double);
    }
    throw Error("unknown document type");
}

rel::SqlType us_to_rel(const us::DataType& t) {
    using B = rel::SqlType::Base;
    using K = us::DataType::Kind;
    switch (t.kind) {
        case K::String:
        case K::Date: return rel::SqlType::of(B::Varchar, 255);
        case K::Integer: return rel::SqlType::of(B::Int);
        case K::Boolean: return rel::SqlType::of(B::Boolean);
        case K::Double: return rel::SqlType::of(B::Numeric, 38);
        case K::Decimal: return rel::SqlType::of(B::Numeric, t.precision, t.scale);
    }
    throw Error("unknown pivot type");
}

}  // namespace type_map

namespace {

bool is_vowel(char c) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

}  // namespace

std::string plural(std::string_view name) {
    std::string s(name);
    if (s.empty() || s.back() == 's') return s;
    if (s.back() == 'y' && s.size() >= 2 && !is_vowel(s[s.size() - 2])) {
        s.pop_back();
        return s + "ies";
    }
    return s + "s";
}

std::string singular(std::string_view name) {
    std::string s(name);
    if (s.size() > 3 && s.compare(s.size() - 3, 3, "ies") == 0) return s.substr(0, s.size() - 3) + "y";
    if (s.size() > 1 && s.back() == 's') s.pop_back();
    return s;
}

}  // namespace umig
