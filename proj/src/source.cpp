#include "umig/source.hpp"

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "umig/csv.hpp"
#include "umig/ddl.hpp"
#include "umig/transform.hpp"

namespace umig::source {

std::string to_string(const Value& v) {
    struct V {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const {
            char buf[64];
            auto r = std::to_chars(buf, buf + sizeof buf, d);
            return std::string(buf, r.ptr);
        }
        std::string operator()(const std::string& s) const { return s; }
    };
    return std::visit(V{}, v);
}

std::string join_key(const std::vector<Value>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += '#';
        out += to_string(parts[i]);
    }
    return out;
}

namespace {

namespace fs = std::filesystem;
using us::DataType;

class MappedFile {
public:
    explicit MappedFile(const fs::path& p) {
        fd_ = ::open(p.c_str(), O_RDONLY);
        if (fd_ < 0) throw Error("cannot open " + p.string());
        struct stat st {};
        if (::fstat(fd_, &st) != 0) {
            ::close(fd_);
            throw Error("cannot stat " + p.string());
        }
        size_ = static_cast<std::size_t>(st.st_size);
        if (size_ > 0) {
            void* a = ::mmap(nullptr, size_, PROT_READ, MAP_PRIVATE, fd_, 0);
            if (a == MAP_FAILED) {
                ::close(fd_);
                throw Error("cannot map " + p.string());
            }
            addr_ = static_cast<const char*>(a);
        }
    }
    MappedFile(const MappedFile&) = delete;
    MappedFile& operator=(const MappedFile&) = delete;
    ~MappedFile() {
        if (addr_) ::munmap(const_cast<char*>(addr_), size_);
        if (fd_ >= 0) ::close(fd_);
    }
    std::string_view data() const { return {addr_ ? addr_ : "", size_}; }

private:
    int fd_ = -1;
    const char* addr_ = nullptr;
    std::size_t size_ = 0;
};

Value parse_value(const csv::Field& f, const DataType& t, const std::string& where) {
    if (f.is_null()) return std::monostate{};
    const std::string& s = f.text;
    auto bad = [&]() -> Error { return Error(where + ": cannot read '" + s + "' as " + us::to_string(t)); };
    switch (t.kind) {
        case DataType::Kind::String:
        case DataType::Kind::Date:
            return s;
        case DataType::Kind::Boolean: {
            std::string l = s;
            for (auto& c : l) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (l == "true" || l == "t" || l == "1" || l == "yes") return true;
            if (l == "false" || l == "f" || l == "0" || l == "no") return false;
            throw bad();
        }
        case DataType::Kind::Integer: {
            std::int64_t i = 0;
            auto r = std::from_chars(s.data(), s.data() + s.size(), i);
            if (r.ec == std::errc{} && r.ptr == s.data() + s.size()) return i;
            // Values of a column cast to Integer may carry a fraction.
            double d = 0;
            auto rd = std::from_chars(s.data(), s.data() + s.size(), d);
            if (rd.ec == std::errc{} && rd.ptr == s.data() + s.size() && std::isfinite(d))
                return static_cast<std::int64_t>(std::llround(d));
            throw bad();
        }
        case DataType::Kind::Double:
        case DataType::Kind::Decimal: {
            double d = 0;
            auto r = std::from_chars(s.data(), s.data() + s.size(), d);
            if (r.ec == std::errc{} && r.ptr == s.data() + s.size()) return d;
            throw bad();
        }
    }
    throw bad();
}

std::optional<std::pair<std::string, std::string>> split_rel(const ElementId& id) {
    if (id.kind() != SchemaKind::Relational) return std::nullopt;
    std::string p(id.path());
    if (p.empty() || p[0] == '@') return std::nullopt;
    auto dot = p.find('.');
    if (dot == std::string::npos) return std::make_pair(p, std::string());
    return std::make_pair(p.substr(0, dot), p.substr(dot + 1));
}

struct TableData {
    const rel::Table* table = nullptr;
    std::unique_ptr<MappedFile> file;
    std::size_t data_start = 0;
    std::size_t rows = 0;

    std::string_view data() const { return file->data(); }
    int column(const std::string& name) const {
        for (std::size_t i = 0; i < table->columns.size(); ++i)
            if (table->columns[i].name == name) return static_cast<int>(i);
        return -1;
    }
};

struct AttrPlan {
    int column = -1;  // -1: no stored value
    DataType type;
};

struct RelPlan {
    bool forward = true;
    TableData* from = nullptr;
    TableData* to = nullptr;
    std::vector<int> local;   // columns of `from` supplying the lookup key
    std::vector<int> remote;  // matching columns of `to`
    bool sorted = false;
    std::string entity;      // type of the related instances
};

using Index = std::unordered_map<std::string, std::vector<std::size_t>>;

struct State {
    fs::path root;
    const rel::RelationalSchema* schema = nullptr;
    const TraceStore* t1 = nullptr;
    bool open = true;
    SessionStats stats;
    std::unordered_map<std::string, TableData> tables;
    std::unordered_map<std::string, TableData*> type_tables;
    std::unordered_map<std::string, AttrPlan> attr_plans;
    std::unordered_map<std::string, RelPlan> rel_plans;
    std::unordered_map<std::string, Index> indexes;

    void check_open() const {
        if (!open) throw Error("source session is closed");
    }

    const us::FeatureOwner& owner(const std::string& type) const {
        const ElementHandle* h = t1->object(ids::us_type(type));
        if (h) {
            if (auto* e = std::get_if<const us::EntityType*>(h)) return **e;
            if (auto* r = std::get_if<const us::RelationshipType*>(h)) return **r;
        }
        throw Error("type " + type + " is not part of the U-Schema model attached to the trace");
    }

    TableData& table_of(const std::string& type) {
        if (auto it = type_tables.find(type); it != type_tables.end()) return *it->second;
        owner(type);
        const ElementId id = ids::us_type(type);
        for (const TraceLink* l : t1->lookup(id, Direction::Backward)) {
            if (l->rule == kRenameRule) continue;
            for (const auto& s : l->sources) {
                auto parts = split_rel(s);
                if (!parts || !parts->second.empty()) continue;
                auto it = tables.find(parts->first);
                if (it == tables.end()) continue;
                type_tables[type] = &it->second;
                return it->second;
            }
        }
        throw Error("type " + type + " does not trace back to a source table");
    }

    std::vector<csv::Field> read_at(const TableData& t, std::size_t offset) const {
        std::vector<csv::Field> f;
        int line = 0;
        csv::read_record(t.data(), offset, f, line);
        return f;
    }

    Value typed(const TableData& t, const std::vector<csv::Field>& row, int col) const {
        const rel::Column& c = t.table->columns[static_cast<std::size_t>(col)];
        return parse_value(row[static_cast<std::size_t>(col)], type_map::rel_to_us(c.type), t.table->name + "." + c.name);
    }

    const AttrPlan& attr_plan(const std::string& type, const us::FeatureOwner& o, TableData& t, const std::string& attr) {
        const std::string k = type + "." + attr;
        if (auto it = attr_plans.find(k); it != attr_plans.end()) return it->second;
        const auto* a = o.find_as<us::Attribute>(attr);
        if (!a) throw Error(type + " has no attribute " + attr);
        AttrPlan plan;
        plan.type = a->type;
        bool traced = false;
        for (const TraceLink* l : t1->lookup(ids::us_feature(type, attr), Direction::Backward)) {
            if (l->role != TraceRole::Attribute) continue;
            for (const auto& s : l->sources) {
                auto parts = split_rel(s);
                if (!parts || parts->second.empty()) continue;
                traced = true;
                if (parts->first != t.table->name) continue;  // stored on the other side
                if (int c = t.column(parts->second); c >= 0) {
                    plan.column = c;
                } else if (const rel::FKey* fk = t.table->fkey(parts->second)) {
                    const us::Reference* r = a->owned_by_reference ? o.find_as<us::Reference>(*a->owned_by_reference) : nullptr;
                    if (!r) throw Error(k + ": reference owning the attribute not found");
                    auto pos = std::find(r->attributes.begin(), r->attributes.end(), attr) - r->attributes.begin();
                    if (static_cast<std::size_t>(pos) >= fk->columns.size())
                        throw Error(k + ": reference attribute has no counterpart in " + fk->constraint_name);
                    plan.column = t.column(fk->columns[static_cast<std::size_t>(pos)]);
                }
            }
            if (traced) break;
        }
        if (!traced) throw Error(k + ": no attribute trace link");
        return attr_plans.emplace(k, plan).first->second;
    }

    std::string index_name(const TableData& t, const std::vector<int>& cols, bool sorted) const {
        std::string n = t.table->name + ":";
        for (int c : cols) n += std::to_string(c) + ",";
        return n + (sorted ? "s" : "u");
    }

    std::string row_key(const std::vector<csv::Field>& row, const std::vector<int>& cols) const {
        std::string k;
        for (int c : cols) {
            const auto& f = row[static_cast<std::size_t>(c)];
            if (f.is_null()) return {};
            k += f.text;
            k += '\x1f';
        }
        return k;
    }

    /// Hash index from key columns to row offsets; when `sorted`, buckets
    /// are ordered by the remaining primary key columns.
    const Index& index(TableData& t, const std::vector<int>& cols, bool sorted) {
        const std::string name = index_name(t, cols, sorted);
        if (auto it = indexes.find(name); it != indexes.end()) return it->second;
        std::vector<int> rest;
        if (sorted)
            if (const rel::RKey* pk = t.table->primary_key())
                for (const auto& c : pk->columns) {
                    int i = t.column(c);
                    if (std::find(cols.begin(), cols.end(), i) == cols.end()) rest.push_back(i);
                }
        std::unordered_map<std::string, std::vector<std::pair<std::vector<Value>, std::size_t>>> tmp;
        std::string_view data = t.data();
        std::size_t pos = t.data_start;
        std::vector<csv::Field> row;
        int line = 2;
        while (pos < data.size()) {
            const std::size_t at = pos;
            pos = csv::read_record(data, pos, row, line);
            std::string k = row_key(row, cols);
            if (k.empty()) continue;
            std::vector<Value> order;
            for (int c : rest) order.push_back(typed(t, row, c));
            tmp[k].emplace_back(std::move(order), at);
        }
        Index idx;
        for (auto& [k, v] : tmp) {
            if (sorted)
                std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
            auto& out = idx[k];
            out.reserve(v.size());
            for (auto& e : v) out.push_back(e.second);
        }
        ++stats.indexes_built;
        return indexes.emplace(name, std::move(idx)).first->second;
    }

    static const rel::FKey* find_fk(const rel::RelationalSchema& s, const ElementId& id, const rel::Table** owner) {
        auto parts = split_rel(id);
        if (!parts || parts->second.empty()) return nullptr;
        const rel::Table* t = s.table(parts->first);
        if (!t) return nullptr;
        *owner = t;
        return t->fkey(parts->second);
    }

    std::vector<int> columns_of(const TableData& t, const std::vector<std::string>& names) const {
        std::vector<int> out;
        for (const auto& n : names) out.push_back(t.column(n));
        return out;
    }

    RelPlan make_forward(TableData& from, const rel::FKey& fk, const std::string& entity) {
        RelPlan p;
        p.forward = true;
        p.from = &from;
        p.to = &table_of(entity);
        if (p.to->table->name != fk.ref_table)
            throw Error(from.table->name + "." + fk.constraint_name + " does not reference the table of " + entity);
        const rel::RKey* k = schema->target_key(fk);
        if (!k) throw Error(fk.constraint_name + ": referenced key not found");
        p.local = columns_of(from, fk.columns);
        p.remote = columns_of(*p.to, k->columns);
        p.entity = entity;
        return p;
    }

    RelPlan make_reverse(TableData& from, const rel::Table& owner, const rel::FKey& fk, const std::string& entity,
                         bool sorted) {
        RelPlan p;
        p.forward = false;
        p.from = &from;
        p.to = &table_of(entity);
        if (p.to->table->name != owner.name || fk.ref_table != from.table->name)
            throw Error(owner.name + "." + fk.constraint_name + " does not link " + from.table->name + " to " + entity);
        const rel::RKey* k = schema->target_key(fk);
        if (!k) throw Error(fk.constraint_name + ": referenced key not found");
        p.local = columns_of(from, k->columns);
        p.remote = columns_of(*p.to, fk.columns);
        p.sorted = sorted;
        p.entity = entity;
        return p;
    }

    const RelPlan& rel_plan(const std::string& type, const us::FeatureOwner& o, TableData& t, const std::string& feature) {
        const std::string key = type + "/" + feature;
        if (auto it = rel_plans.find(key); it != rel_plans.end()) return it->second;
        RelPlan plan;
        auto dot = feature.find('.');
        if (dot != std::string::npos) {
            // A side of the relationship type this cursor iterates.
            const std::string holder = feature.substr(0, dot);
            const std::string ref = feature.substr(dot + 1);
            const auto* r = owner(holder).find_as<us::Reference>(ref);
            if (!r || r->featured_by != type) throw Error(type + " has no side " + feature);
            const TraceLink* link = side_link(ids::us_feature(holder, ref));
            const rel::Table* ot = nullptr;
            const rel::FKey* fk = find_fk(*schema, link->sources[1], &ot);
            if (!fk || ot != t.table) throw Error(feature + ": side link does not start at " + t.table->name);
            plan = make_forward(t, *fk, r->refs_to);
        } else {
            const us::Feature* f = o.find(feature);
            if (!f) throw Error(type + " has no feature " + feature);
            const auto* r = std::get_if<us::Reference>(f);
            const auto* g = std::get_if<us::Aggregate>(f);
            if (!r && !g) throw Error(type + "." + feature + " is neither a reference nor an aggregate");
            const ElementId fid = ids::us_feature(type, feature);
            if (r && r->featured_by) {
                const TraceLink* link = side_link(fid);
                const rel::Table* ot = nullptr;
                const rel::FKey* fk = find_fk(*schema, link->sources[2], &ot);
                if (!fk) throw Error(type + "." + feature + ": side link without a holder key");
                plan = make_reverse(t, *ot, *fk, *r->featured_by, false);
            } else {
                const TraceLink* link = nullptr;
                for (const TraceLink* l : t1->lookup(fid, Direction::Backward))
                    if (l->role && *l->role != TraceRole::Attribute && *l->role != TraceRole::KeyComponent) {
                        link = l;
                        break;
                    }
                if (!link) throw Error(type + "." + feature + ": trace link carries no access role");
                const rel::Table* ot = nullptr;
                const rel::FKey* fk = nullptr;
                for (const auto& s : link->sources)
                    if ((fk = find_fk(*schema, s, &ot))) break;
                if (!fk) throw Error(type + "." + feature + ": trace link names no foreign key");
                const std::string target = r ? r->refs_to : g->specified_by;
                const bool forward = link->role == TraceRole::RefForward ||
                                     (link->role != TraceRole::RefReverse && link->rule.rfind("R7.1", 0) == 0);
                if (forward)
                    plan = make_forward(t, *fk, target);
                else
                    plan = make_reverse(t, *ot, *fk, target, link->role == TraceRole::AggregateChild);
            }
        }
        return rel_plans.emplace(key, std::move(plan)).first->second;
    }

    const TraceLink* side_link(const ElementId& id) const {
        for (const TraceLink* l : t1->lookup(id, Direction::Backward))
            if (l->role == TraceRole::RelTypeSide && l->sources.size() >= 3) return l;
        throw Error(id.str() + ": no relationship side trace link");
    }

    void hold() {
        ++stats.resident_records;
        stats.peak_resident_records = std::max(stats.peak_resident_records, stats.resident_records);
    }
    void release() { --stats.resident_records; }
};

class CsvCursor final : public SourceCursor {
public:
    CsvCursor(std::shared_ptr<State> st, std::string type, TableData& t)
        : st_(std::move(st)), type_(std::move(type)), owner_(&st_->owner(type_)), table_(&t), pos_(t.data_start) {}

    CsvCursor(std::shared_ptr<State> st, std::string type, TableData& t, const std::vector<std::size_t>* list)
        : CsvCursor(std::move(st), std::move(type), t) {
        list_ = list;
    }

    ~CsvCursor() override { drop(); }

    const std::string& entity() const override { return type_; }
    bool has_data() const override { return has_; }

    bool advance() override {
        st_->check_open();
        if (closed_) throw Error("cursor is closed");
        std::size_t at = 0;
        if (list_) {
            if (next_ >= list_->size()) return finish();
            at = (*list_)[next_++];
        } else {
            if (pos_ >= table_->data().size()) return finish();
            at = pos_;
        }
        int line = 0;
        std::size_t end = csv::read_record(table_->data(), at, row_, line);
        if (!list_) pos_ = end;
        if (!has_) st_->hold();
        has_ = true;
        ++st_->stats.rows_read;
        return true;
    }

    Value value(const std::string& attribute) const override {
        require();
        const AttrPlan& p = st_->attr_plan(type_, *owner_, *table_, attribute);
        if (p.column < 0) return std::monostate{};
        return parse_value(row_[static_cast<std::size_t>(p.column)], p.type, type_ + "." + attribute);
    }

    std::vector<Value> key(const std::string& key) const override {
        require();
        const auto* k = owner_->find_as<us::Key>(key);
        if (!k) throw Error(type_ + " has no key " + key);
        std::vector<Value> out;
        for (const auto& a : k->attributes) out.push_back(value(a));
        return out;
    }

    std::vector<Value> id() const override {
        require();
        if (const us::Key* k = owner_->id_key()) return key(k->name);
        std::vector<Value> out;
        if (const rel::RKey* pk = table_->table->primary_key())
            for (const auto& c : pk->columns) out.push_back(st_->typed(*table_, row_, table_->column(c)));
        return out;
    }

    std::unique_ptr<SourceCursor> related(const std::string& feature) override {
        require();
        const RelPlan& p = st_->rel_plan(type_, *owner_, *table_, feature);
        const std::string k = st_->row_key(row_, p.local);
        const Index& idx = st_->index(*p.to, p.remote, p.sorted);
        static const std::vector<std::size_t> none;
        const std::vector<std::size_t>* list = &none;
        if (!k.empty())
            if (auto it = idx.find(k); it != idx.end()) list = &it->second;
        return std::make_unique<CsvCursor>(st_, p.entity, *p.to, list);
    }

    void close() override {
        drop();
        closed_ = true;
    }

private:
    bool finish() {
        drop();
        return false;
    }

    void drop() {
        if (has_) {
            has_ = false;
            st_->release();
        }
        row_.clear();
    }

    void require() const {
        st_->check_open();
        if (!has_) throw Error("cursor over " + type_ + " has no current record");
    }

    std::shared_ptr<State> st_;
    std::string type_;
    const us::FeatureOwner* owner_;
    TableData* table_;
    std::size_t pos_;
    const std::vector<std::size_t>* list_ = nullptr;
    std::size_t next_ = 0;
    std::vector<csv::Field> row_;
    bool has_ = false;
    bool closed_ = false;
};

class CsvSession final : public SourceSession {
public:
    explicit CsvSession(std::shared_ptr<State> st) : st_(std::move(st)) {}
    ~CsvSession() override { close(); }

    std::unique_ptr<SourceCursor> read_entity_all(const std::string& type) override {
        st_->check_open();
        return std::make_unique<CsvCursor>(st_, type, st_->table_of(type));
    }

    std::size_t row_count(const std::string& table) const override {
        st_->check_open();
        auto it = st_->tables.find(table);
        if (it == st_->tables.end()) throw Error("unknown table " + table);
        return it->second.rows;
    }

    const rel::Table& table_of(const std::string& type) const override {
        st_->check_open();
        return *st_->table_of(type).table;
    }

    SessionStats stats() const override { return st_->stats; }
    bool is_open() const override { return st_->open; }

    void close() override {
        if (!st_->open) return;
        st_->open = false;
        st_->indexes.clear();
    }

private:
    std::shared_ptr<State> st_;
};

void check_schema_file(const fs::path& root, const rel::RelationalSchema& schema) {
    const fs::path p = root / "schema.sql";
    std::ifstream in(p);
    if (!in) throw Error("missing " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const rel::RelationalSchema onfile = rel::parse_ddl(ss.str(), schema.name);
    for (const auto& t : schema.tables) {
        const rel::Table* o = onfile.table(t.name);
        if (!o) throw Error(p.string() + " does not define table " + t.name);
        if (o->columns.size() != t.columns.size())
            throw Error(p.string() + ": table " + t.name + " has different columns");
        for (std::size_t i = 0; i < t.columns.size(); ++i)
            if (o->columns[i].name != t.columns[i].name)
                throw Error(p.string() + ": table " + t.name + " has different columns");
    }
}

}  // namespace

std::unique_ptr<SourceSession> open_source(const std::filesystem::path& root, const rel::RelationalSchema& schema,
                                           const TraceStore& t1) {
    check_schema_file(root, schema);
    auto st = std::make_shared<State>();
    st->root = root;
    st->schema = &schema;
    st->t1 = &t1;
    for (const auto& t : schema.tables) {
        const fs::path p = root / (t.name + ".csv");
        if (!fs::exists(p)) throw Error("missing data file for table " + t.name + ": " + p.string());
        TableData td;
        td.table = &t;
        td.file = std::make_unique<MappedFile>(p);
        std::string_view data = td.file->data();
        if (data.empty()) throw Error(p.string() + ": missing header row");
        std::vector<csv::Field> row;
        int line = 1;
        try {
            td.data_start = csv::read_record(data, 0, row, line);
            if (row.size() != t.columns.size()) throw Error(p.string() + ": header does not match table columns");
            for (std::size_t i = 0; i < row.size(); ++i)
                if (row[i].text != t.columns[i].name)
                    throw Error(p.string() + ": header column '" + row[i].text + "' should be '" + t.columns[i].name +
                                "'");
            std::size_t pos = td.data_start;
            while (pos < data.size()) {
                const int at = line;
                pos = csv::read_record(data, pos, row, line);
                if (row.size() != t.columns.size())
                    throw ParseError("expected " + std::to_string(t.columns.size()) + " fields, got " +
                                         std::to_string(row.size()),
                                     at, 1);
                ++td.rows;
            }
        } catch (const ParseError& e) {
            throw Error(p.string() + ":" + e.what());
        }
        st->tables.emplace(t.name, std::move(td));
    }
    return std::make_unique<CsvSession>(std::move(st));
}

}  // namespace umig::source
