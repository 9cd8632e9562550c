#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace umig::csv {

struct Field {
    std::string text;
    bool quoted = false;

    /// Empty unquoted fields stand for NULL.
    bool is_null() const noexcept { return !quoted && text.empty(); }
};

/// Reads one RFC-4180 record starting at `pos` into `out`. Returns the offset
/// just past the record terminator. `line` is advanced by the newlines
/// consumed and used in ParseError messages.
std::size_t read_record(std::string_view data, std::size_t pos, std::vector<Field>& out, int& line);

/// Quotes a field when it contains a separator, quote, or line break, or when
/// it is empty and must not read back as NULL.
std::string escape(std::string_view text, bool preserve_empty = true);

}  // namespace umig::csv
