#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "umig/relational.hpp"

namespace umig::rel {

/// Parses `CREATE TABLE` statements. Keywords are case-insensitive and
/// identifiers are stored lowercase. Unnamed constraints are named
/// `<table>_pk`, `<table>_fk<i>` and `<table>_uk<i>`.
///
/// The schema name is `name` when given, else the one recorded in a leading
/// `-- schema: <name>` comment, else "schema".
RelationalSchema parse_ddl(std::string_view text, std::optional<std::string> name = std::nullopt);

/// Prints tables and constraints in model order; every constraint is named
/// so the output parses back to an equal schema.
std::string print_ddl(const RelationalSchema& schema);

}  // namespace umig::rel
