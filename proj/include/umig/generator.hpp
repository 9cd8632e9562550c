#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

/// Deterministic synthetic music-streaming datasets.
namespace umig::gen {

enum class Scale { S, M, L };

Scale parse_scale(std::string_view s);
std::string_view to_string(Scale s);

struct ScaleSpec {
    Scale scale = Scale::S;
    std::uint64_t seed = 42;
};

using TableCounts = std::vector<std::pair<std::string, std::size_t>>;

/// DDL of the generated dataset, written as `schema.sql`.
std::string dataset_ddl();

/// Row counts the generator produces for a scale, in table order.
TableCounts counts_for(Scale s);

struct DatasetManifest {
    ScaleSpec spec;
    TableCounts tables;

    std::string to_json() const;
};

/// Writes `schema.sql`, one CSV per table and `manifest.json` into `dir`.
/// Identical specs give byte-identical files.
DatasetManifest generate_dataset(const ScaleSpec& spec, const std::filesystem::path& dir);

}  // namespace umig::gen
