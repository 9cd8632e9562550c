#pragma once

#include <string>
#include <string_view>

#include "umig/uschema.hpp"

namespace umig::us {

/// Parses the textual notation:
///
///   Schema Name:1
///   Root entity User { +id: String, songs: Ref<Song>* }
///
/// `+` marks identifier attributes (collected into a Key named `<Entity>_pk`),
/// `*` makes a reference or aggregate 0..unbounded; unmarked ones are 1..1.
/// Throws ParseError on syntax errors and unresolved `Ref<>`/`Aggr<>` targets.
USchemaModel parse_athena(std::string_view text);

/// Prints a model in the textual notation. Constructs the notation cannot
/// express (relationship types, non-identifier keys, reference attributes)
/// are emitted as `//` comments.
std::string print_athena(const USchemaModel& model);

}  // namespace umig::us
