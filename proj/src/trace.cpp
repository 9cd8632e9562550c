#include "umig/trace.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

namespace umig {

namespace {

constexpr std::pair<TraceRole, std::string_view> kRoles[] = {
    {TraceRole::AggregateChild, "AGGREGATE_CHILD"}, {TraceRole::RefForward, "REF_FORWARD"},
    {TraceRole::RefReverse, "REF_REVERSE"},         {TraceRole::RelTypeSide, "REL_TYPE_SIDE"},
    {TraceRole::KeyComponent, "KEY_COMPONENT"},     {TraceRole::Attribute, "ATTRIBUTE"},
};

}  // namespace

std::string_view to_string(TraceRole r) {
    for (const auto& [role, name] : kRoles)
        if (role == r) return name;
    return "ATTRIBUTE";
}

TraceRole parse_trace_role(std::string_view text) {
    for (const auto& [role, name] : kRoles)
        if (name == text) return role;
    throw Error("unknown trace role '" + std::string(text) + "'");
}

TraceStore::TraceStore(std::vector<TraceLink> links) {
    for (auto& l : links) record(std::move(l));
}

void TraceStore::record(TraceLink link) {
    if (link.sources.empty() || link.targets.empty()) throw Error("trace link needs at least one source and target");
    if (link.rule.empty()) throw Error("trace link needs a rule tag");
    links_.push_back(std::move(link));
    index(links_.size() - 1);
}

void TraceStore::record(std::vector<ElementId> sources, std::vector<ElementId> targets, std::string rule,
                        std::optional<TraceRole> role) {
    record(TraceLink{std::move(sources), std::move(targets), std::move(rule), role});
}

void TraceStore::index(std::size_t i) {
    const auto& l = links_[i];
    auto push = [i](std::vector<std::size_t>& v) {
        if (v.empty() || v.back() != i) v.push_back(i);
    };
    for (const auto& s : l.sources) push(forward_[s.str()]);
    for (const auto& t : l.targets) push(backward_[t.str()]);
}

std::vector<const TraceLink*> TraceStore::lookup(const ElementId& id, Direction d) const {
    const auto& m = d == Direction::Forward ? forward_ : backward_;
    std::vector<const TraceLink*> out;
    auto it = m.find(id.str());
    if (it != m.end())
        for (auto i : it->second) out.push_back(&links_[i]);
    return out;
}

std::vector<ElementId> TraceStore::related_ids(const ElementId& id, Direction d) const {
    std::vector<ElementId> out;
    std::set<std::string> seen;
    for (const auto* l : lookup(id, d)) {
        const auto& side = d == Direction::Forward ? l->targets : l->sources;
        for (const auto& x : side)
            if (seen.insert(x.str()).second) out.push_back(x);
    }
    return out;
}

std::vector<ElementId> TraceStore::attach(const ModelIndex& index) {
    std::vector<ElementId> unresolved;
    std::set<std::string> seen;
    auto bind = [&](const ElementId& id) {
        if (id.kind() != index.kind() || !seen.insert(id.str()).second) return;
        if (const ElementHandle* h = index.find(id)) {
            objects_.insert_or_assign(id.str(), *h);
        } else {
            objects_.erase(id.str());
            unresolved.push_back(id);
        }
    };
    for (const auto& l : links_) {
        if (l.rule != kRenameRule)
            for (const auto& s : l.sources) bind(s);
        for (const auto& t : l.targets) bind(t);
    }
    return unresolved;
}

const ElementHandle* TraceStore::object(const ElementId& id) const {
    auto it = objects_.find(id.str());
    return it == objects_.end() ? nullptr : &it->second;
}

TraceStore compose(const TraceStore& first, const TraceStore& second) {
    TraceStore out;
    for (const auto& l1 : first.links()) {
        // Links live in one vector, so address order is insertion order.
        std::set<const TraceLink*> hits;
        for (const auto& b : l1.targets)
            for (const auto* l2 : second.lookup(b, Direction::Forward)) hits.insert(l2);
        for (const auto* l2 : hits) {
            out.record(l1.sources, l2->targets, l1.rule + std::string(kComposeSeparator) + l2->rule,
                       l2->role ? l2->role : l1.role);
        }
    }
    return out;
}

std::vector<ElementId> untraced_targets(const TraceStore& trace, const ModelIndex& target) {
    std::vector<ElementId> out;
    for (const auto& id : target.ids())
        if (trace.lookup(id, Direction::Backward).empty()) out.push_back(id);
    return out;
}

using Json = nlohmann::ordered_json;

std::string save_trace(const TraceStore& store) {
    std::string out = "{\"version\":1,\"links\":[";
    bool first = true;
    for (const auto& l : store.links()) {
        Json j;
        j["sources"] = Json::array();
        for (const auto& s : l.sources) j["sources"].push_back(s.str());
        j["targets"] = Json::array();
        for (const auto& t : l.targets) j["targets"].push_back(t.str());
        j["rule"] = l.rule;
        if (l.role) j["role"] = std::string(to_string(*l.role));
        out += first ? "\n" : ",\n";
        out += j.dump();
        first = false;
    }
    out += first ? "]}\n" : "\n]}\n";
    return out;
}

TraceStore load_trace(std::string_view json) {
    Json root;
    try {
        root = Json::parse(json);
    } catch (const Json::parse_error& e) {
        throw Error(std::string("malformed trace file: ") + e.what());
    }
    if (!root.is_object() || !root.contains("version") || !root.contains("links"))
        throw Error("malformed trace file: expected version and links");
    if (root["version"] != 1) throw Error("unsupported trace version " + root["version"].dump());
    if (!root["links"].is_array()) throw Error("malformed trace file: links must be an array");
    TraceStore store;
    auto read_ids = [](const Json& arr) {
        if (!arr.is_array()) throw Error("malformed trace file: id list expected");
        std::vector<ElementId> v;
        for (const auto& x : arr) {
            if (!x.is_string()) throw Error("malformed trace file: ids must be strings");
            v.emplace_back(x.get<std::string>());
        }
        return v;
    };
    for (const auto& l : root["links"]) {
        if (!l.is_object() || !l.contains("sources") || !l.contains("targets") || !l.contains("rule") ||
            !l["rule"].is_string())
            throw Error("malformed trace file: link needs sources, targets and rule");
        std::optional<TraceRole> role;
        if (l.contains("role")) {
            if (!l["role"].is_string()) throw Error("malformed trace file: role must be a string");
            role = parse_trace_role(l["role"].get<std::string>());
        }
        store.record(read_ids(l["sources"]), read_ids(l["targets"]), l["rule"].get<std::string>(), role);
    }
    return store;
}

}  // namespace umig
