#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "umig/element_id.hpp"
#include "umig/model_index.hpp"

namespace umig {

/// Tells the data migrator how to reach the instances behind a link.
enum class TraceRole { AggregateChild, RefForward, RefReverse, RelTypeSide, KeyComponent, Attribute };

std::string_view to_string(TraceRole r);
TraceRole parse_trace_role(std::string_view text);

/// Separator placed between rule tags of composed links.
inline constexpr std::string_view kComposeSeparator = "∘";

/// Rule tag of the audit link appended for each rename.
inline constexpr std::string_view kRenameRule = "EVOLVE-RENAME";

struct TraceLink {
    std::vector<ElementId> sources;
    std::vector<ElementId> targets;
    std::string rule;
    std::optional<TraceRole> role;

    bool operator==(const TraceLink&) const = default;
};

enum class Direction { Forward, Backward };

/// Ordered list of links with two indexes: a symbolic one from element id to
/// the links mentioning it on either side, and an object one from element id
/// to the element of an attached model.
class TraceStore {
public:
    TraceStore() = default;
    explicit TraceStore(std::vector<TraceLink> links);

    /// Appends a link. Throws Error when either side is empty.
    void record(TraceLink link);
    void record(std::vector<ElementId> sources, std::vector<ElementId> targets, std::string rule,
                std::optional<TraceRole> role = std::nullopt);

    const std::vector<TraceLink>& links() const noexcept { return links_; }
    std::size_t size() const noexcept { return links_.size(); }
    bool empty() const noexcept { return links_.empty(); }

    /// Links with `id` among their sources (Forward) or targets (Backward), in
    /// insertion order.
    std::vector<const TraceLink*> lookup(const ElementId& id, Direction d) const;
    /// Ids on the opposite side of the links returned by lookup, first-seen order.
    std::vector<ElementId> related_ids(const ElementId& id, Direction d) const;

    /// Binds every id of the model's kind to its element. Returns the ids of
    /// that kind which do not resolve; they stay out of the object index.
    /// Sources of rename audit links name former elements and are skipped.
    std::vector<ElementId> attach(const ModelIndex& index);
    const ElementHandle* object(const ElementId& id) const;

    /// Equality on links only; indexes derive from them.
    bool operator==(const TraceStore& o) const { return links_ == o.links_; }

private:
    void index(std::size_t i);

    std::vector<TraceLink> links_;
    std::unordered_map<std::string, std::vector<std::size_t>> forward_;
    std::unordered_map<std::string, std::vector<std::size_t>> backward_;
    std::unordered_map<std::string, ElementHandle> objects_;
};

/// Joins links of `first` and `second` sharing an intermediate id. Each
/// composed link takes its sources from the first link, its targets from the
/// second, the rule `r1∘r2`, and the second link's role (else the first's).
TraceStore compose(const TraceStore& first, const TraceStore& second);

/// Target-model ids that no link names as a target.
std::vector<ElementId> untraced_targets(const TraceStore& trace, const ModelIndex& target);

/// `.trace.json` persistence, one link per line.
std::string save_trace(const TraceStore& store);
TraceStore load_trace(std::string_view json);

}  // namespace umig
