#pragma once

#include <array>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "umig/document.hpp"
#include "umig/relational.hpp"
#include "umig/transform.hpp"
#include "umig/uschema.hpp"

/// Round trips, structural schema matching and model diffs.
namespace umig::validation {

enum class Category { Entities, Attributes, PrimaryKeys, ForeignKeys, Constraints, DataTypes };

inline constexpr std::array<Category, 6> kCategories{Category::Entities,    Category::Attributes,
                                                     Category::PrimaryKeys, Category::ForeignKeys,
                                                     Category::Constraints, Category::DataTypes};

std::string_view to_string(Category c);

struct Score {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    /// 1.0 when nothing was predicted.
    double precision() const;
    /// 1.0 when nothing was expected.
    double recall() const;
    /// 0.0 when precision and recall are both zero.
    double f1() const;
};

struct TablePair {
    std::string original;
    std::string reconstructed;
    double similarity = 0;
};

struct MatchReport {
    std::array<Score, 6> scores{};
    std::vector<TablePair> tables;

    Score& operator[](Category c) { return scores[static_cast<std::size_t>(c)]; }
    const Score& operator[](Category c) const { return scores[static_cast<std::size_t>(c)]; }
};

/// Name-insensitive structural comparison of an original schema and its
/// reconstruction: tables are paired by maximum-weight matching on column
/// similarity, columns inside paired tables by name, then by type class.
MatchReport compare_schemas(const rel::RelationalSchema& original, const rel::RelationalSchema& reconstructed);

struct RoundTrip {
    rel::RelationalSchema original;
    TransformResult<us::USchemaModel> pivot;
    TransformResult<doc::DocumentSchema> document;
    TransformResult<us::USchemaModel> pivot_back;
    TransformResult<rel::RelationalSchema> reconstructed;
    MatchReport report;
};

/// R -> U -> D -> U' -> R' and the comparison of R with R'.
RoundTrip run_roundtrip(const rel::RelationalSchema& schema);

std::string report_markdown(const MatchReport& r, std::string_view title);
std::string report_json(const MatchReport& r, std::string_view title);

using AnyModel = std::variant<rel::RelationalSchema, us::USchemaModel, doc::DocumentSchema>;

struct Difference {
    enum class Kind { Added, Removed, Changed, Renamed };
    Kind kind;
    /// Path in the first model (Removed, Changed, Renamed) or the second (Added).
    std::string path;
    std::string before;
    std::string after;

    bool operator==(const Difference&) const = default;
};

std::string_view to_string(Difference::Kind k);

/// Element-wise structural differences, in first-model order followed by
/// additions in second-model order. A removed and an added element under the
/// same parent with identical content are reported as one rename. Throws
/// Error when the models are of different kinds.
std::vector<Difference> diff_models(const AnyModel& a, const AnyModel& b);

std::string diff_json(const std::vector<Difference>& diffs);

}  // namespace umig::validation
