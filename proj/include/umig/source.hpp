#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "umig/relational.hpp"
#include "umig/trace.hpp"

/// Driver-cursor access to source instances, resolved through trace T1.
namespace umig::source {

using Value = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

inline bool is_null(const Value& v) { return std::holds_alternative<std::monostate>(v); }

/// Canonical text of a value: `true`/`false`, shortest round-trip numbers,
/// strings verbatim, empty for NULL.
std::string to_string(const Value& v);

/// Joins identifier components with `#`.
std::string join_key(const std::vector<Value>& parts);

struct SessionStats {
    /// Parsed records currently held by open cursors, and the maximum seen.
    std::size_t resident_records = 0;
    std::size_t peak_resident_records = 0;
    std::size_t rows_read = 0;
    std::size_t indexes_built = 0;
};

/// Streaming view over the instances of one entity or relationship type.
/// A fresh cursor sits before its first record; advance() moves to the next
/// one and reports whether it exists.
class SourceCursor {
public:
    virtual ~SourceCursor() = default;

    /// U-Schema entity or relationship type name.
    virtual const std::string& entity() const = 0;
    virtual bool has_data() const = 0;
    virtual bool advance() = 0;

    /// Value of an attribute of the entity; NULL when absent.
    virtual Value value(const std::string& attribute) const = 0;
    /// Component values of a key, in key order.
    virtual std::vector<Value> key(const std::string& key) const = 0;
    /// Identifier components: the ID key when there is one, else the primary
    /// key columns of the underlying table.
    virtual std::vector<Value> id() const = 0;

    /// Instances reached through a reference or aggregate of the entity. On a
    /// relationship-type cursor, `Holder.reference` names one side and
    /// yields the instance on the far end of that side.
    virtual std::unique_ptr<SourceCursor> related(const std::string& feature) = 0;

    virtual void close() = 0;
};

class SourceSession {
public:
    virtual ~SourceSession() = default;

    /// Cursor over every instance of an entity or relationship type, in
    /// storage order.
    virtual std::unique_ptr<SourceCursor> read_entity_all(const std::string& type) = 0;
    virtual std::size_t row_count(const std::string& table) const = 0;
    /// Table holding the instances of an entity or relationship type.
    virtual const rel::Table& table_of(const std::string& type) const = 0;
    virtual SessionStats stats() const = 0;
    virtual bool is_open() const = 0;
    /// Idempotent. Cursors of a closed session throw on access.
    virtual void close() = 0;
};

/// Opens a directory holding `schema.sql` and one `<table>.csv` per table of
/// `schema`. `t1` must be attached to the U-Schema model it maps to; both
/// must outlive the session.
std::unique_ptr<SourceSession> open_source(const std::filesystem::path& root, const rel::RelationalSchema& schema,
                                           const TraceStore& t1);

}  // namespace umig::source
