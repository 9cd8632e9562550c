#include "umig/csv.hpp"

#include "umig/error.hpp"

namespace umig::csv {

std::size_t read_record(std::string_view data, std::size_t pos, std::vector<Field>& out, int& line) {
    out.clear();
    const int start_line = line;
    Field f;
    bool at_field_start = true;
    while (pos < data.size()) {
        const char c = data[pos];
        if (at_field_start && c == '"') {
            f.quoted = true;
            ++pos;
            for (;;) {
                if (pos >= data.size()) throw ParseError("unterminated quoted field", start_line, 1);
                const char q = data[pos++];
                if (q == '"') {
                    if (pos < data.size() && data[pos] == '"') {
                        f.text += '"';
                        ++pos;
                    } else {
                        break;
                    }
                } else {
                    if (q == '\n') ++line;
                    f.text += q;
                }
            }
            at_field_start = false;
            if (pos < data.size() && data[pos] != ',' && data[pos] != '\n' && data[pos] != '\r')
                throw ParseError("text after closing quote", line, 1);
            continue;
        }
        if (c == ',') {
            out.push_back(std::move(f));
            f = Field{};
            at_field_start = true;
            ++pos;
            continue;
        }
        if (c == '\r' || c == '\n') {
            pos += (c == '\r' && pos + 1 < data.size() && data[pos + 1] == '\n') ? 2 : 1;
            ++line;
            out.push_back(std::move(f));
            return pos;
        }
        if (c == '"') throw ParseError("quote inside unquoted field", line, 1);
        f.text += c;
        at_field_start = false;
        ++pos;
    }
    out.push_back(std::move(f));
    return pos;
}

std::string escape(std::string_view text, bool preserve_empty) {
    const bool needs = (preserve_empty && text.empty()) || text.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

}  // namespace umig::csv
