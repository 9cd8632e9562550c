#include <gtest/gtest.h>
#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <random>

#include "support.hpp"
#include "umig/assignment.hpp"
#include "umig/ddl.hpp"
#include "umig/docschema_json.hpp"
#include "umig/generator.hpp"
#include "umig/io.hpp"
#include "umig/validation.hpp"

using namespace umig;
using namespace umig::validation;

namespace {

rel::RelationalSchema load(const char* name) { return rel::parse_ddl(io::read_file(test::fixture(name))); }

double total(const std::vector<std::vector<double>>& w, const std::vector<int>& a) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] >= 0) s += w[i][static_cast<std::size_t>(a[i])];
    return s;
}

/// Best total weight over every injective row -> column map, skipping allowed.
double brute_force(const std::vector<std::vector<double>>& w) {
    std::size_t rows = w.size(), cols = rows ? w[0].size() : 0;
    std::vector<int> perm(std::max(rows, cols));
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0;
    do {
        double s = 0;
        for (std::size_t i = 0; i < rows; ++i)
            if (static_cast<std::size_t>(perm[i]) < cols) s += std::max(0.0, w[i][static_cast<std::size_t>(perm[i])]);
        best = std::max(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

void expect_all_perfect(const MatchReport& r) {
    for (Category c : kCategories) {
        EXPECT_DOUBLE_EQ(r[c].precision(), 1.0) << to_string(c);
        EXPECT_DOUBLE_EQ(r[c].recall(), 1.0) << to_string(c);
        EXPECT_DOUBLE_EQ(r[c].f1(), 1.0) << to_string(c);
    }
}

}  // namespace

TEST(ScoreTest, Conventions) {
    Score empty;
    EXPECT_DOUBLE_EQ(empty.precision(), 1.0);
    EXPECT_DOUBLE_EQ(empty.recall(), 1.0);
    EXPECT_DOUBLE_EQ(empty.f1(), 1.0);
    Score zero{0, 3, 2};
    EXPECT_DOUBLE_EQ(zero.precision(), 0.0);
    EXPECT_DOUBLE_EQ(zero.recall(), 0.0);
    EXPECT_DOUBLE_EQ(zero.f1(), 0.0);
    Score s{3, 1, 2};
    EXPECT_DOUBLE_EQ(s.precision(), 0.75);
    EXPECT_DOUBLE_EQ(s.recall(), 0.6);
    EXPECT_DOUBLE_EQ(s.f1(), 2 * 0.75 * 0.6 / 1.35);
}

TEST(AssignmentTest, MatchesBruteForce) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.2, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t rows = rng() % 6 + 1, cols = rng() % 6 + 1;
        std::vector<std::vector<double>> w(rows, std::vector<double>(cols));
        for (auto& r : w)
            for (auto& x : r) x = u(rng);
        auto a = max_weight_assignment(w);
        ASSERT_EQ(a.size(), rows);
        std::vector<int> used;
        for (std::size_t i = 0; i < rows; ++i) {
            if (a[i] < 0) continue;
            EXPECT_GT(w[i][static_cast<std::size_t>(a[i])], 0.0);
            used.push_back(a[i]);
        }
        std::sort(used.begin(), used.end());
        EXPECT_EQ(std::adjacent_find(used.begin(), used.end()), used.end());
        EXPECT_NEAR(total(w, a), brute_force(w), 1e-9);
    }
    EXPECT_TRUE(max_weight_assignment({}).empty());
}

TEST(CompareTest, IdentityIsPerfect) {
    for (const auto& s : {load("music/schema.sql"), load("northwind/schema.sql")}) expect_all_perfect(compare_schemas(s, s));
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
        auto s = test::random_schema(rng);
        expect_all_perfect(compare_schemas(s, s));
    }
}

TEST(CompareTest, MissingTable) {
    auto r = rel::parse_ddl(gen::dataset_ddl());
    ASSERT_EQ(r.tables.size(), 8u);
    auto shorter = r;
    shorter.tables.erase(std::remove_if(shorter.tables.begin(), shorter.tables.end(),
                                        [](const rel::Table& t) { return t.name == "listening"; }),
                         shorter.tables.end());
    auto m = compare_schemas(r, shorter);
    EXPECT_DOUBLE_EQ(m[Category::Entities].precision(), 1.0);
    EXPECT_DOUBLE_EQ(m[Category::Entities].recall(), 0.875);
}

TEST(CompareTest, GeneralisedTypeCountsAsAttributeButNotType) {
    auto a = rel::parse_ddl("CREATE TABLE t (id INT PRIMARY KEY, n VARCHAR(80));");
    auto b = rel::parse_ddl("CREATE TABLE t (id INT PRIMARY KEY, n VARCHAR(255));");
    auto m = compare_schemas(a, b);
    EXPECT_EQ(m[Category::Attributes].tp, 2u);
    EXPECT_EQ(m[Category::Attributes].fp, 0u);
    EXPECT_EQ(m[Category::DataTypes].tp, 1u);
    EXPECT_EQ(m[Category::DataTypes].fp, 1u);
    EXPECT_EQ(m[Category::DataTypes].fn, 1u);
}

TEST(CompareTest, MatchingIgnoresNames) {
    auto a = rel::parse_ddl(
        "CREATE TABLE person (id INT PRIMARY KEY, name VARCHAR(20), born DATE);"
        "CREATE TABLE pet (id INT PRIMARY KEY, owner INT, FOREIGN KEY (owner) REFERENCES person (id));");
    auto b = rel::parse_ddl(
        "CREATE TABLE animal (id INT PRIMARY KEY, owner INT, FOREIGN KEY (owner) REFERENCES human (id));"
        "CREATE TABLE human (id INT PRIMARY KEY, name VARCHAR(20), born DATE);");
    auto m = compare_schemas(a, b);
    expect_all_perfect(m);
    ASSERT_EQ(m.tables.size(), 2u);
}

TEST(CompareTest, DeletingColumnsNeverRaisesRecall) {
    auto rt = run_roundtrip(load("music/schema.sql"));
    const auto base = rt.report;
    for (std::size_t t = 0; t < rt.reconstructed.target.tables.size(); ++t) {
        const auto& table = rt.reconstructed.target.tables[t];
        for (const auto& c : table.columns) {
            bool keyed = table.is_fk_column(c.name);
            for (const auto& k : table.keys)
                keyed |= std::find(k.columns.begin(), k.columns.end(), c.name) != k.columns.end();
            if (keyed) continue;
            auto smaller = rt.reconstructed.target;
            auto& cols = smaller.tables[t].columns;
            cols.erase(std::find_if(cols.begin(), cols.end(), [&](const rel::Column& x) { return x.name == c.name; }));
            auto m = compare_schemas(rt.original, smaller);
            // DataTypes only scores matched columns, so a dropped mistyped column lowers its fn.
            for (Category cat : kCategories) {
                if (cat == Category::DataTypes) continue;
                EXPECT_LE(m[cat].recall(), base[cat].recall() + 1e-12) << to_string(cat);
            }
        }
    }
}

TEST(RoundTripTest, Fixtures) {
    for (const char* f : {"music/schema.sql", "northwind/schema.sql"}) {
        auto rt = run_roundtrip(load(f));
        const auto& r = rt.report;
        EXPECT_DOUBLE_EQ(r[Category::Entities].precision(), 1.0) << f;
        EXPECT_DOUBLE_EQ(r[Category::Entities].recall(), 1.0) << f;
        EXPECT_GE(r[Category::Attributes].f1(), 0.90) << f;
        EXPECT_GE(r[Category::ForeignKeys].f1(), 0.85) << f;
        EXPECT_LT(r[Category::PrimaryKeys].recall(), 1.0) << f;
        EXPECT_LT(r[Category::DataTypes].f1(), 1.0) << f;
    }
}

TEST(RoundTripTest, EmptySchema) {
    rel::RelationalSchema s;
    s.name = "e";
    expect_all_perfect(run_roundtrip(s).report);
}

TEST(RoundTripTest, EntityPreservationOnRandomSchemas) {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 50; ++i) {
        auto s = test::random_schema(rng);
        auto r = run_roundtrip(s).report;
        EXPECT_DOUBLE_EQ(r[Category::Entities].precision(), 1.0) << rel::print_ddl(s);
        EXPECT_DOUBLE_EQ(r[Category::Entities].recall(), 1.0) << rel::print_ddl(s);
    }
}

TEST(ReportTest, MarkdownAndJson) {
    auto r = run_roundtrip(load("music/schema.sql")).report;
    std::string md = report_markdown(r, "music");
    EXPECT_NE(md.find("| Entities | 9 | 0 | 0 | 1.00 | 1.00 | 1.00 |"), std::string::npos) << md;
    auto j = nlohmann::json::parse(report_json(r, "music"));
    EXPECT_EQ(j["schema"], "music");
    ASSERT_EQ(j["categories"].size(), 6u);
    EXPECT_EQ(j["categories"][0]["category"], "Entities");
    EXPECT_EQ(j["categories"][0]["precision"], 1.0);
}

TEST(DiffTest, IdenticalModels) {
    auto d = doc::parse_docschema(io::read_file(test::fixture("music/expected.docschema.json")));
    EXPECT_TRUE(diff_models(d, d).empty());
    auto r = load("northwind/schema.sql");
    EXPECT_TRUE(diff_models(r, r).empty());
}

TEST(DiffTest, RenamedField) {
    auto a = doc::parse_docschema(io::read_file(test::fixture("music/expected.docschema.json")));
    auto b = a;
    auto& p = b.documents[2].properties[1];
    std::get<doc::Field>(p.node).name = "track_title";
    auto diffs = diff_models(a, b);
    ASSERT_EQ(diffs.size(), 1u);
    EXPECT_EQ(diffs[0].kind, Difference::Kind::Renamed);
    EXPECT_EQ(to_string(diffs[0].kind), "changed name");
    EXPECT_EQ(diffs[0].before, "title");
    EXPECT_EQ(diffs[0].after, "track_title");
}

TEST(DiffTest, ChangedAddedRemoved) {
    auto a = load("music/schema.sql");
    auto b = a;
    b.table("song")->columns[2].type = rel::SqlType::of(rel::SqlType::Base::Numeric, 38);
    b.table("album")->columns.push_back({"label", rel::SqlType::of(rel::SqlType::Base::Text), true, std::nullopt});
    b.tables.erase(b.tables.begin() + 3);  // musical_style
    auto diffs = diff_models(a, b);
    int changed = 0, added = 0, removed = 0;
    for (const auto& d : diffs) {
        changed += d.kind == Difference::Kind::Changed;
        added += d.kind == Difference::Kind::Added;
        removed += d.kind == Difference::Kind::Removed;
    }
    EXPECT_GE(changed, 1);
    EXPECT_EQ(added, 1);
    EXPECT_EQ(removed, 1);
    auto j = nlohmann::json::parse(diff_json(diffs));
    EXPECT_EQ(j.size(), diffs.size());
}

TEST(DiffTest, KindMismatch) {
    auto r = load("music/schema.sql");
    auto d = doc::parse_docschema(io::read_file(test::fixture("music/expected.docschema.json")));
    EXPECT_THROW(diff_models(r, d), Error);
}
