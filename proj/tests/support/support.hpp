#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <memory>

#include "umig/relational.hpp"
#include "umig/source.hpp"
#include "umig/trace.hpp"
#include "umig/transform.hpp"
#include "umig/uschema.hpp"

namespace umig::test {

std::filesystem::path fixture(std::string_view relative);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(std::string_view name) const { return path_ / std::string(name); }

private:
    std::filesystem::path path_;
};

/// Copies the regular files of a directory.
void copy_dir(const std::filesystem::path& from, const std::filesystem::path& to);

/// R -> U -> D from a DDL file, with both traces attached to their models.
class Pipeline {
public:
    explicit Pipeline(const std::filesystem::path& schema_file);
    Pipeline(const Pipeline&) = delete;
    Pipeline& operator=(const Pipeline&) = delete;

    std::unique_ptr<source::SourceSession> open(const std::filesystem::path& dir) const;

    rel::RelationalSchema relational;
    TransformResult<us::USchemaModel> pivot;
    TransformResult<doc::DocumentSchema> document;
};

/// One link `rel:<p>` -> `us:<p>` per element of the model.
TraceStore identity_trace(const us::USchemaModel& model);

/// A CSV row keyed by header name; NULL fields are nullopt.
using CsvRow = std::map<std::string, std::optional<std::string>>;

/// Straightforward full read of a CSV file, kept apart from the library reader.
std::vector<CsvRow> read_csv_rows(const std::filesystem::path& file);

struct RandomSchemaOptions {
    int min_tables = 3;
    int max_tables = 8;
};

/// Valid schema mixing strong, weak and associative tables. Foreign keys only
/// point at earlier, non-associative tables, so weak chains never cycle.
rel::RelationalSchema random_schema(std::mt19937_64& rng, const RandomSchemaOptions& options = {});

/// Stand-alone table with a random primary key and random foreign keys over
/// its columns. Referenced tables are not part of any schema.
rel::Table random_table(std::mt19937_64& rng);

/// Ids of the tables among the sources of links targeting `target`.
std::vector<std::string> source_tables(const TraceStore& composed, const ElementId& target);

}  // namespace umig::test
