#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "umig/relational.hpp"
#include "umig/uschema.hpp"
#include "umig/validation.hpp"

namespace umig {

/// `{"kind":"relational", ...}` model files.
std::string print_relational_json(const rel::RelationalSchema& schema);
rel::RelationalSchema parse_relational_json(std::string_view json);

/// `{"kind":"uschema", ...}` model files.
std::string print_uschema_json(const us::USchemaModel& model);
us::USchemaModel parse_uschema_json(std::string_view json);

using validation::AnyModel;

/// Reads a model, telling formats apart by extension (`.sql`, `.athena`)
/// and, for JSON, by content.
AnyModel load_model(const std::filesystem::path& p);
AnyModel parse_model(std::string_view text, std::string_view extension);

enum class ModelFormat { Ddl, Athena, Json };

/// Text of a model in `format`; DDL only for relational and Athena only for
/// U-Schema models.
std::string print_model(const AnyModel& m, ModelFormat format);

/// Format implied by an output path's extension; JSON otherwise.
ModelFormat format_for(const std::filesystem::path& p);

}  // namespace umig
