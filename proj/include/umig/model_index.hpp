#pragma once

#include <map>
#include <variant>
#include <vector>

#include "umig/document.hpp"
#include "umig/element_id.hpp"
#include "umig/relational.hpp"
#include "umig/uschema.hpp"

namespace umig {

/// Non-owning pointer to one element of an attached model.
using ElementHandle =
    std::variant<const rel::RelationalSchema*, const rel::Table*, const rel::Column*, const rel::RKey*,
                 const rel::FKey*, const us::USchemaModel*, const us::EntityType*, const us::RelationshipType*,
                 const us::Feature*, const doc::DocumentSchema*, const doc::DocumentType*, const doc::Property*>;

/// Every addressable element of one model, keyed by its ElementId, in
/// model order. Holds pointers into the model, which must outlive the index.
class ModelIndex {
public:
    explicit ModelIndex(const rel::RelationalSchema& m);
    explicit ModelIndex(const us::USchemaModel& m);
    explicit ModelIndex(const doc::DocumentSchema& m);

    SchemaKind kind() const noexcept { return kind_; }
    const std::vector<ElementId>& ids() const noexcept { return order_; }
    const ElementHandle* find(const ElementId& id) const;
    bool contains(const ElementId& id) const { return find(id) != nullptr; }

private:
    void add(ElementId id, ElementHandle h);
    void add_properties(const doc::DocumentType& d, const std::vector<doc::Property>& props,
                        std::vector<std::string>& chain);

    SchemaKind kind_;
    std::vector<ElementId> order_;
    std::map<std::string, ElementHandle, std::less<>> map_;
};

}  // namespace umig
