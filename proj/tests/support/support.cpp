#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

#include "umig/ddl.hpp"
#include "umig/io.hpp"
#include "umig/model_index.hpp"

namespace umig::test {

namespace fs = std::filesystem;

fs::path fixture(std::string_view relative) { return fs::path(UMIG_FIXTURE_DIR) / std::string(relative); }

TempDir::TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("umig-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

void copy_dir(const fs::path& from, const fs::path& to) {
    fs::create_directories(to);
    for (const auto& e : fs::directory_iterator(from))
        if (e.is_regular_file()) fs::copy_file(e.path(), to / e.path().filename(), fs::copy_options::overwrite_existing);
}

Pipeline::Pipeline(const fs::path& schema_file)
    : relational(rel::parse_ddl(io::read_file(schema_file))),
      pivot(rel_to_uschema(relational)),
      document(uschema_to_document(pivot.target)) {
    pivot.trace.attach(ModelIndex(relational));
    pivot.trace.attach(ModelIndex(pivot.target));
    document.trace.attach(ModelIndex(pivot.target));
    document.trace.attach(ModelIndex(document.target));
}

std::unique_ptr<source::SourceSession> Pipeline::open(const fs::path& dir) const {
    return source::open_source(dir, relational, pivot.trace);
}

TraceStore identity_trace(const us::USchemaModel& model) {
    TraceStore t;
    ModelIndex index(model);
    for (const auto& id : index.ids()) {
        if (id.path().front() == '@') continue;
        t.record({ElementId("rel:" + std::string(id.path()))}, {id}, "R0");
    }
    return t;
}

namespace {

std::vector<std::optional<std::string>> split_records(const std::string& text, std::size_t& pos) {
    std::vector<std::optional<std::string>> fields;
    std::string cur;
    bool quoted = false;
    bool in_quotes = false;
    while (pos < text.size()) {
        char c = text[pos++];
        if (in_quotes) {
            if (c == '"') {
                if (pos < text.size() && text[pos] == '"') {
                    cur += '"';
                    ++pos;
                } else {
                    in_quotes = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            in_quotes = true;
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur.empty() && !quoted ? std::nullopt : std::optional<std::string>(cur));
            cur.clear();
            quoted = false;
        } else if (c == '\n' || c == '\r') {
            if (c == '\r' && pos < text.size() && text[pos] == '\n') ++pos;
            break;
        } else {
            cur += c;
        }
    }
    fields.push_back(cur.empty() && !quoted ? std::nullopt : std::optional<std::string>(cur));
    return fields;
}

}  // namespace

std::vector<CsvRow> read_csv_rows(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    std::size_t pos = 0;
    std::vector<std::string> header;
    for (auto& h : split_records(text, pos)) header.push_back(h.value_or(""));
    std::vector<CsvRow> rows;
    while (pos < text.size()) {
        auto fields = split_records(text, pos);
        if (fields.size() != header.size()) throw std::runtime_error("bad row in " + file.string());
        CsvRow row;
        for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = fields[i];
        rows.push_back(std::move(row));
    }
    return rows;
}

namespace {

using rel::SqlType;
using Base = SqlType::Base;

int pick(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

SqlType key_type(std::mt19937_64& rng) {
    switch (pick(rng, 0, 2)) {
        case 0: return SqlType::of(Base::Char, 36);
        case 1: return SqlType::of(Base::Int);
        default: return SqlType::of(Base::Varchar, 20);
    }
}

SqlType attr_type(std::mt19937_64& rng) {
    switch (pick(rng, 0, 9)) {
        case 0: return SqlType::of(Base::Varchar, pick(rng, 1, 200));
        case 1: return SqlType::of(Base::Char, pick(rng, 1, 40));
        case 2: return SqlType::of(Base::Text);
        case 3: return SqlType::of(Base::Int);
        case 4: return SqlType::of(Base::Bigint);
        case 5: return SqlType::of(Base::Boolean);
        case 6: return SqlType::of(Base::Date);
        case 7: return SqlType::of(Base::Timestamp);
        case 8: return SqlType::of(Base::Decimal, pick(rng, 4, 12), pick(rng, 0, 3));
        default: return SqlType::of(Base::Double);
    }
}

rel::ReferentialAction action(std::mt19937_64& rng) {
    static const rel::ReferentialAction all[] = {rel::ReferentialAction::NoAction, rel::ReferentialAction::Cascade,
                                                 rel::ReferentialAction::SetNull, rel::ReferentialAction::Restrict};
    return all[pick(rng, 0, 3)];
}

/// Appends columns copying `target`'s primary key, named `<prefix><col>`.
std::vector<std::string> add_ref_columns(rel::Table& t, const rel::Table& target, const std::string& prefix,
                                         bool nullable) {
    std::vector<std::string> cols;
    for (const auto& c : target.primary_key()->columns) {
        rel::Column col{prefix + c, target.column(c)->type, nullable, std::nullopt};
        t.columns.push_back(col);
        cols.push_back(col.name);
    }
    return cols;
}

void add_attributes(std::mt19937_64& rng, rel::Table& t, const std::string& prefix, int max) {
    int n = pick(rng, 0, max);
    for (int k = 0; k < n; ++k) {
        rel::Column c{prefix + "a" + std::to_string(k), attr_type(rng), chance(rng, 0.5), std::nullopt};
        t.columns.push_back(c);
    }
}

}  // namespace

rel::RelationalSchema random_schema(std::mt19937_64& rng, const RandomSchemaOptions& options) {
    rel::RelationalSchema s;
    s.name = "random";
    int n = pick(rng, options.min_tables, options.max_tables);
    std::vector<int> candidates;  // non-associative tables
    for (int i = 0; i < n; ++i) {
        rel::Table t;
        t.name = "t" + std::to_string(i);
        std::string own = "c" + std::to_string(i) + "_";
        int kind = candidates.empty() ? 0 : pick(rng, 0, 3);
        if (kind == 3 && candidates.size() < 2) kind = 0;
        if (kind <= 1) {
            int nk = pick(rng, 1, 2);
            std::vector<std::string> pk;
            for (int k = 0; k < nk; ++k) {
                t.columns.push_back({own + "id" + std::to_string(k), key_type(rng), false, std::nullopt});
                pk.push_back(t.columns.back().name);
            }
            t.keys.push_back({t.name + "_pk", true, pk});
        } else if (kind == 2) {
            const rel::Table& parent = s.tables[candidates[pick(rng, 0, (int)candidates.size() - 1)]];
            auto inherited = add_ref_columns(t, parent, "", false);
            t.columns.push_back({own + "seq", key_type(rng), false, std::nullopt});
            auto pk = inherited;
            pk.push_back(own + "seq");
            t.keys.push_back({t.name + "_pk", true, pk});
            t.fkeys.push_back({t.name + "_own", inherited, parent.name, parent.name + "_pk",
                               rel::ReferentialAction::Cascade, rel::ReferentialAction::NoAction});
        } else {
            int a = pick(rng, 0, (int)candidates.size() - 1);
            int b = pick(rng, 0, (int)candidates.size() - 2);
            if (b >= a) ++b;
            const rel::Table& left = s.tables[candidates[a]];
            const rel::Table& right = s.tables[candidates[b]];
            auto lc = add_ref_columns(t, left, own + "l_", false);
            auto rc = add_ref_columns(t, right, own + "r_", false);
            auto pk = lc;
            pk.insert(pk.end(), rc.begin(), rc.end());
            t.keys.push_back({t.name + "_pk", true, pk});
            t.fkeys.push_back({t.name + "_left", lc, left.name, left.name + "_pk", action(rng), action(rng)});
            t.fkeys.push_back({t.name + "_right", rc, right.name, right.name + "_pk", action(rng), action(rng)});
        }
        add_attributes(rng, t, own, kind == 3 ? 2 : 4);
        if (kind != 3 && !candidates.empty()) {
            int nf = pick(rng, 0, 2);
            for (int j = 0; j < nf; ++j) {
                const rel::Table& target = s.tables[candidates[pick(rng, 0, (int)candidates.size() - 1)]];
                auto cols = add_ref_columns(t, target, own + "f" + std::to_string(j) + "_", chance(rng, 0.6));
                t.fkeys.push_back(
                    {t.name + "_fk" + std::to_string(j), cols, target.name, target.name + "_pk", action(rng), action(rng)});
            }
        }
        if (kind <= 1 && chance(rng, 0.3)) {
            for (auto& c : t.columns) {
                if (c.name.rfind(own + "a", 0) == 0) {
                    c.nullable = false;
                    t.keys.push_back({t.name + "_uk", false, {c.name}});
                    break;
                }
            }
        }
        if (kind != 3) candidates.push_back(i);
        s.tables.push_back(std::move(t));
    }
    return s;
}

rel::Table random_table(std::mt19937_64& rng) {
    rel::Table t;
    t.name = "r";
    int n = pick(rng, 1, 8);
    for (int k = 0; k < n; ++k) t.columns.push_back({"c" + std::to_string(k), key_type(rng), true, std::nullopt});
    std::vector<std::string> pk;
    for (const auto& c : t.columns)
        if (chance(rng, 0.5)) pk.push_back(c.name);
    if (!pk.empty() || chance(rng, 0.7)) {
        if (pk.empty()) pk.push_back(t.columns.front().name);
        t.keys.push_back({"r_pk", true, pk});
    }
    int nf = pick(rng, 0, 4);
    for (int j = 0; j < nf; ++j) {
        std::vector<std::string> cols;
        for (const auto& c : t.columns)
            if (chance(rng, 0.35)) cols.push_back(c.name);
        if (cols.empty()) cols.push_back(t.columns[pick(rng, 0, n - 1)].name);
        t.fkeys.push_back({"r_fk" + std::to_string(j), cols, "x" + std::to_string(j), "x" + std::to_string(j) + "_pk",
                           rel::ReferentialAction::NoAction, rel::ReferentialAction::NoAction});
    }
    return t;
}

std::vector<std::string> source_tables(const TraceStore& composed, const ElementId& target) {
    std::set<std::string> out;
    for (const TraceLink* l : composed.lookup(target, Direction::Backward))
        for (const auto& s : l->sources)
            if (s.kind() == SchemaKind::Relational && s.path().find('.') == std::string_view::npos &&
                s.path().front() != '@')
                out.insert(std::string(s.path()));
    return {out.begin(), out.end()};
}

}  // namespace umig::test
