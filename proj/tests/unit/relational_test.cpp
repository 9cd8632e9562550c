#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "support.hpp"
#include "umig/ddl.hpp"
#include "umig/io.hpp"
#include "umig/relational.hpp"

using namespace umig;
using namespace umig::rel;

namespace {

RelationalSchema music() { return parse_ddl(io::read_file(test::fixture("music/schema.sql"))); }
RelationalSchema northwind() { return parse_ddl(io::read_file(test::fixture("northwind/schema.sql"))); }

const FKey& fk_over(const Table& t, std::vector<std::string> cols) {
    for (const auto& f : t.fkeys)
        if (f.columns == cols) return f;
    throw std::runtime_error("no such fk");
}

}  // namespace

TEST(DdlTest, ParsesMusicFixture) {
    auto s = music();
    EXPECT_EQ(s.name, "music");
    EXPECT_EQ(s.tables.size(), 9u);
    const Table* pl = s.table("playlist");
    ASSERT_NE(pl, nullptr);
    ASSERT_NE(pl->primary_key(), nullptr);
    EXPECT_EQ(pl->primary_key()->columns, (std::vector<std::string>{"user_id", "playlist_id"}));
    ASSERT_EQ(pl->fkeys.size(), 1u);
    EXPECT_EQ(pl->fkeys[0].ref_table, "app_user");
    EXPECT_EQ(pl->fkeys[0].on_delete, ReferentialAction::Cascade);
    EXPECT_TRUE(validate_relational(s).empty());
}

TEST(DdlTest, NamesUnnamedConstraints) {
    auto s = music();
    const Table* pl = s.table("playlist");
    EXPECT_EQ(pl->primary_key()->constraint_name, "playlist_pk");
    EXPECT_EQ(pl->fkeys[0].constraint_name, "playlist_fk1");
    EXPECT_EQ(s.table("playlist_song")->primary_key()->constraint_name, "pls_pk");
    const RKey* ak = s.table("app_user")->key("user_name_ak");
    ASSERT_NE(ak, nullptr);
    EXPECT_FALSE(ak->is_pk);
}

TEST(DdlTest, ColumnDetails) {
    auto s = music();
    const Column* c = s.table("song")->column("duration");
    ASSERT_NE(c, nullptr);
    EXPECT_EQ(c->type, SqlType::of(SqlType::Base::Decimal, 4, 2));
    EXPECT_TRUE(c->nullable);
    const Column* pc = s.table("song")->column("plays_count");
    EXPECT_FALSE(pc->nullable);
    EXPECT_EQ(pc->default_value, "0");
    EXPECT_FALSE(s.table("app_user")->column("user_id")->nullable);
}

TEST(DdlTest, CommentsOnly) {
    auto s = parse_ddl("-- nothing here\n-- at all\n");
    EXPECT_TRUE(s.tables.empty());
}

TEST(DdlTest, NorthwindAssociativeTable) {
    auto s = northwind();
    EXPECT_EQ(s.name, "northwind");
    EXPECT_EQ(s.tables.size(), 14u);
    const Table* od = s.table("order_details");
    ASSERT_NE(od, nullptr);
    EXPECT_EQ(od->fkeys.size(), 2u);
    EXPECT_TRUE(is_mn(*od));
    EXPECT_TRUE(validate_relational(s).empty());
    // REFERENCES without a column list resolves to the primary key.
    EXPECT_EQ(od->fkeys[0].ref_key, s.table("products")->primary_key()->constraint_name);
}

TEST(DdlTest, RoundTrip) {
    for (auto s : {music(), northwind()}) {
        auto again = parse_ddl(print_ddl(s));
        EXPECT_EQ(again, s);
    }
}

TEST(DdlTest, EmptySchemaPrintsHeaderOnly) {
    RelationalSchema s;
    s.name = "x";
    std::string text = print_ddl(s);
    EXPECT_EQ(text.find("CREATE"), std::string::npos);
    EXPECT_EQ(parse_ddl(text), s);
}

TEST(DdlTest, CompositeForeignKeyPrinted) {
    std::string text = print_ddl(music());
    EXPECT_NE(text.find("FOREIGN KEY (user_id, playlist_id) REFERENCES playlist (user_id, playlist_id)"),
              std::string::npos);
}

TEST(DdlTest, Errors) {
    EXPECT_THROW(parse_ddl("CREATE TABLE a (x INT PRIMARY KEY);\nCREATE TABLE a (y INT);"), Error);
    EXPECT_THROW(parse_ddl("CREATE TABLE a (x INT, FOREIGN KEY (x) REFERENCES b (y));"), Error);
    try {
        parse_ddl("CREATE TABLE a (\n  x INT,\n  y FROB\n);");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3);
        EXPECT_EQ(e.column(), 5);
    }
}

TEST(DdlTest, RandomSchemasRoundTrip) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 50; ++i) {
        auto s = test::random_schema(rng);
        ASSERT_TRUE(validate_relational(s).empty()) << print_ddl(s);
        EXPECT_EQ(parse_ddl(print_ddl(s), s.name), s);
    }
}

TEST(PredicateTest, RunningExampleClassification) {
    auto s = music();
    const Table& ps = *s.table("playlist_song");
    EXPECT_TRUE(fk_in_pk(ps, fk_over(ps, {"user_id", "playlist_id"})));
    EXPECT_FALSE(fk_in_pk(ps, fk_over(ps, {"song_id"})));

    EXPECT_TRUE(is_weak(*s.table("playlist")));
    EXPECT_FALSE(is_mn(*s.table("playlist")));
    EXPECT_TRUE(is_weak(ps));
    EXPECT_TRUE(is_weak(*s.table("most_recent_song")));
    EXPECT_TRUE(is_mn(*s.table("listening")));
    EXPECT_FALSE(is_weak(*s.table("listening")));
    EXPECT_TRUE(is_mn(*s.table("song_style")));
    EXPECT_FALSE(is_weak(*s.table("app_user")));
    EXPECT_FALSE(is_mn(*s.table("app_user")));
    EXPECT_FALSE(is_weak(*s.table("song")));
}

TEST(PredicateTest, TableWithoutPrimaryKey) {
    Table t{"t", {{"a", {}, true, {}}}, {}, {{"t_fk", {"a"}, "u", "u_pk", {}, {}}}};
    EXPECT_FALSE(fk_in_pk(t, t.fkeys[0]));
    EXPECT_FALSE(is_weak(t));
    EXPECT_FALSE(is_mn(t));
}

TEST(PredicateTest, ForeignKeyOfAnotherTable) {
    auto s = music();
    EXPECT_THROW(fk_in_pk(*s.table("playlist"), s.table("listening")->fkeys[0]), Error);
}

TEST(PredicateTest, ThreeForeignKeysInPrimaryKey) {
    Table t{"t",
            {{"a", {}, false, {}}, {"b", {}, false, {}}, {"c", {}, false, {}}},
            {{"t_pk", true, {"a", "b", "c"}}},
            {{"f1", {"a"}, "x", "x_pk", {}, {}}, {"f2", {"b"}, "y", "y_pk", {}, {}}, {"f3", {"c"}, "z", "z_pk", {}, {}}}};
    EXPECT_TRUE(is_mn(t));
    EXPECT_FALSE(is_weak(t));
}

TEST(PredicateTest, RandomTablesAgreeWithSetOracle) {
    std::mt19937_64 rng(1234);
    for (int i = 0; i < 1000; ++i) {
        Table t = test::random_table(rng);
        std::set<std::string> pk;
        if (t.primary_key()) pk.insert(t.primary_key()->columns.begin(), t.primary_key()->columns.end());
        int inside = 0;
        for (const auto& f : t.fkeys) {
            bool all = !pk.empty() && std::all_of(f.columns.begin(), f.columns.end(),
                                                  [&](const std::string& c) { return pk.count(c) > 0; });
            EXPECT_EQ(fk_in_pk(t, f), all);
            inside += all;
        }
        EXPECT_EQ(is_weak(t), inside == 1);
        EXPECT_EQ(is_mn(t), inside >= 2);
        EXPECT_FALSE(is_weak(t) && is_mn(t));
    }
}

TEST(PredicateTest, MonotoneInPrimaryKeyColumns) {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 200; ++i) {
        Table t = test::random_table(rng);
        if (!t.primary_key() || t.fkeys.empty()) continue;
        const FKey fk = t.fkeys[0];
        auto& pk = t.keys[0].columns;
        for (const auto& c : fk.columns)
            if (std::find(pk.begin(), pk.end(), c) == pk.end()) pk.push_back(c);
        EXPECT_TRUE(fk_in_pk(t, fk));
    }
}

TEST(RelationalTest, ValidationFindsDanglingForeignKey) {
    auto s = music();
    s.table("song")->fkeys[0].ref_table = "record";
    EXPECT_TRUE(has_errors(validate_relational(s)));
}

TEST(RelationalTest, SqlTypeSpelling) {
    EXPECT_EQ(to_string(SqlType::of(SqlType::Base::Varchar, 80)), "VARCHAR(80)");
    EXPECT_EQ(to_string(SqlType::of(SqlType::Base::Numeric, 38)), "NUMERIC(38)");
    EXPECT_EQ(parse_sql_type("decimal(4, 2)"), SqlType::of(SqlType::Base::Decimal, 4, 2));
    EXPECT_THROW(parse_sql_type("GEOMETRY"), Error);
}
