#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "umig/error.hpp"

namespace umig::rel {

struct SqlType {
    enum class Base { Char, Varchar, Text, Int, Bigint, Smallint, Boolean, Date, Timestamp, Decimal, Numeric, Double, Real };

    Base base = Base::Varchar;
    std::optional<int> length;  ///< CHAR/VARCHAR length or DECIMAL/NUMERIC precision
    std::optional<int> scale;   ///< DECIMAL/NUMERIC only

    static SqlType of(Base b, std::optional<int> n = std::nullopt, std::optional<int> s = std::nullopt) {
        return SqlType{b, n, s};
    }

    bool operator==(const SqlType&) const = default;
};

/// DDL spelling, e.g. "VARCHAR(80)", "NUMERIC(38)".
std::string to_string(const SqlType& t);

/// Parses a DDL type spelling (case-insensitive). Throws Error.
SqlType parse_sql_type(std::string_view text);

enum class ReferentialAction { Cascade, SetNull, NoAction, Restrict, SetDefault };

std::string to_string(ReferentialAction a);
ReferentialAction parse_referential_action(std::string_view text);

struct Column {
    std::string name;
    SqlType type;
    bool nullable = true;
    std::optional<std::string> default_value;  ///< literal text as written

    bool operator==(const Column&) const = default;
};

struct RKey {
    std::string constraint_name;
    bool is_pk = false;
    std::vector<std::string> columns;

    bool operator==(const RKey&) const = default;
};

struct FKey {
    std::string constraint_name;
    std::vector<std::string> columns;
    std::string ref_table;
    std::string ref_key;  ///< constraint name of the referenced key in ref_table
    ReferentialAction on_delete = ReferentialAction::NoAction;
    ReferentialAction on_update = ReferentialAction::NoAction;

    bool operator==(const FKey&) const = default;
};

struct Table {
    std::string name;
    std::vector<Column> columns;
    std::vector<RKey> keys;
    std::vector<FKey> fkeys;

    const Column* column(std::string_view n) const;
    const RKey* primary_key() const;
    const RKey* key(std::string_view constraint) const;
    const FKey* fkey(std::string_view constraint) const;
    /// True if `c` is a component of any foreign key.
    bool is_fk_column(std::string_view c) const;

    bool operator==(const Table&) const = default;
};

struct RelationalSchema {
    std::string name;
    std::vector<Table> tables;

    const Table* table(std::string_view n) const;
    Table* table(std::string_view n);
    /// The key an FKey points to; nullptr if unresolved.
    const RKey* target_key(const FKey& fk) const;

    bool operator==(const RelationalSchema&) const = default;
};

std::vector<Diagnostic> validate_relational(const RelationalSchema& schema);

/// True iff every column of `fk` is in t's primary key. Throws Error when
/// `fk` is not one of t's foreign keys.
bool fk_in_pk(const Table& t, const FKey& fk);

/// Exactly one foreign key of t lies inside its primary key.
bool is_weak(const Table& t);

/// At least two distinct foreign keys of t lie inside its primary key.
bool is_mn(const Table& t);

/// Foreign keys of t contained in its primary key, in declaration order.
std::vector<const FKey*> identifying_fkeys(const Table& t);

}  // namespace umig::rel
