#pragma once

#include <compare>
#include <string>
#include <string_view>
#include <vector>

namespace umig {

enum class SchemaKind { Relational, USchema, Document };

std::string_view prefix(SchemaKind k);

/// Path naming one model element: `<kind>:<owner>[.<member>]`, e.g.
/// `rel:app_user.is_premium`. Nested embedded objects are joined with `/`:
/// `doc:app_user.playlists/playlist_songs.position_idx`. Schema roots are
/// written `rel:@name`.
class ElementId {
public:
    /// Throws Error when `text` is malformed.
    explicit ElementId(std::string text);

    const std::string& str() const noexcept { return text_; }
    SchemaKind kind() const noexcept { return kind_; }
    /// Text after the `<kind>:` prefix.
    std::string_view path() const noexcept;

    auto operator<=>(const ElementId& o) const { return text_ <=> o.text_; }
    bool operator==(const ElementId& o) const { return text_ == o.text_; }

private:
    std::string text_;
    SchemaKind kind_;
};

bool is_valid_element_id(std::string_view text);

namespace ids {

ElementId schema(SchemaKind k, std::string_view name);

ElementId rel_table(std::string_view table);
ElementId rel_member(std::string_view table, std::string_view member);

ElementId us_type(std::string_view type);
ElementId us_feature(std::string_view type, std::string_view feature);

ElementId doc_type(std::string_view type);
/// `chain` lists the enclosing embedded properties, outermost first.
ElementId doc_property(std::string_view type, const std::vector<std::string>& chain, std::string_view name,
                       bool is_embedded);

}  // namespace ids

}  // namespace umig
