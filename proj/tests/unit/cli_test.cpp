#include <gtest/gtest.h>
#include <json.hpp>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "support.hpp"
#include "umig/ddl.hpp"
#include "umig/io.hpp"
#include "umig/model_json.hpp"

using namespace umig;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::dispatch(args, out, err);
    return {code, out.str(), err.str()};
}

std::string music() { return test::fixture("music/schema.sql").string(); }

bool has_temp_files(const std::filesystem::path& dir) {
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        auto ext = e.path().extension();
        if (ext == ".tmp" || ext == ".part") return true;
    }
    return false;
}

}  // namespace

TEST(CliTest, Inject) {
    test::TempDir dir;
    auto r = run({"inject", music(), "-o", (dir / "rel.model.json").string()});
    EXPECT_EQ(r.code, 0) << r.err;
    auto m = load_model(dir / "rel.model.json");
    ASSERT_TRUE(std::holds_alternative<rel::RelationalSchema>(m));
    EXPECT_EQ(std::get<rel::RelationalSchema>(m), rel::parse_ddl(io::read_file(music())));
    EXPECT_FALSE(has_temp_files(dir.path()));
}

TEST(CliTest, RoundtripMarkdown) {
    auto r = run({"roundtrip", music(), "--report", "md"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("| Entities | 9 | 0 | 0 | 1.00 | 1.00 | 1.00 |"), std::string::npos) << r.out;
    auto j = run({"roundtrip", test::fixture("northwind/schema.sql").string(), "--report", "json"});
    EXPECT_EQ(j.code, 0);
    EXPECT_TRUE(nlohmann::json::parse(j.out).contains("categories"));
}

TEST(CliTest, UsageErrors) {
    EXPECT_EQ(run({"inject", music(), "--frobnicate"}).code, 2);
    EXPECT_EQ(run({"transmogrify"}).code, 2);
    EXPECT_EQ(run({"transform", music(), "--from", "rel"}).code, 2);
    EXPECT_EQ(run({"transform", music(), "--from", "xml", "--to", "us"}).code, 2);
    EXPECT_EQ(run({"inject", music(), "--connection", "postgres://db"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(CliTest, DomainErrors) {
    EXPECT_EQ(run({"inject", "/nonexistent/schema.sql"}).code, 1);
    test::TempDir dir;
    io::write_file_atomic(dir / "bad.sql", "CREATE TABLE (");
    auto r = run({"inject", (dir / "bad.sql").string()});
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(r.err.empty());
}

TEST(CliTest, TransformChainAndDiff) {
    test::TempDir dir;
    auto doc = (dir / "music.docschema.json").string();
    auto r = run({"transform", music(), "--from", "rel", "--to", "doc", "-o", doc, "--trace",
                  (dir / "t.trace.json").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(std::filesystem::exists(dir / "t.trace.json"));
    auto d = run({"diff", doc, test::fixture("music/expected.docschema.json").string()});
    EXPECT_EQ(d.code, 0) << d.err;
    EXPECT_EQ(d.out, "no differences\n");
    auto j = run({"diff", doc, test::fixture("music/expected.docschema.json").string(), "--format", "json"});
    EXPECT_EQ(nlohmann::json::parse(j.out), nlohmann::json::array());
    EXPECT_EQ(run({"diff", music(), doc}).code, 1);
}

TEST(CliTest, EmitAndEvolve) {
    test::TempDir dir;
    auto e = run({"emit-ddl", music()});
    EXPECT_EQ(e.code, 0);
    EXPECT_EQ(rel::parse_ddl(e.out), rel::parse_ddl(io::read_file(music())));
    auto a = run({"emit-athena", test::fixture("music/music.athena").string()});
    EXPECT_EQ(a.code, 0);
    auto ev = run({"evolve", test::fixture("music/music.athena").string(), "--script",
                   test::fixture("music/evolution.orion").string(), "-o", (dir / "evolved.athena").string()});
    EXPECT_EQ(ev.code, 0) << ev.err;
    EXPECT_NE(io::read_file(dir / "evolved.athena").find("AppUser"), std::string::npos);
    EXPECT_EQ(run({"emit-athena", music()}).code, 1);
}

TEST(CliTest, GenerateAndMigrateSample) {
    test::TempDir dir;
    auto r = run({"migrate", "--source", test::fixture("music/sample").string(), "--out", (dir / "out").string(),
                  "--batch", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* f : {"app_user.jsonl", "listening.jsonl", "manifest.json", "t1.trace.json", "t2.trace.json"})
        EXPECT_TRUE(std::filesystem::exists(dir / "out" / f)) << f;
    EXPECT_FALSE(has_temp_files(dir / "out"));
    EXPECT_EQ(run({"migrate", "--source", dir.path().string(), "--out", (dir / "o2").string(), "--batch", "0"}).code,
              2);
    EXPECT_EQ(run({"generate-dataset", "--scale", "XL", "--out", dir.path().string()}).code, 2);
}

TEST(CliTest, MigrateAfterEvolution) {
    test::TempDir dir;
    io::write_file_atomic(dir / "rename.orion", "RENAME song::title TO track_title\n");
    auto r = run({"migrate", "--source", test::fixture("music/sample").string(), "--out", (dir / "out").string(),
                  "--script", (dir / "rename.orion").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(dir / "out" / "song.jsonl");
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        auto d = nlohmann::json::parse(line);
        EXPECT_TRUE(d.contains("track_title")) << line;
        EXPECT_FALSE(d.contains("title")) << line;
        ++n;
    }
    EXPECT_EQ(n, 4u);
    io::write_file_atomic(dir / "bad.orion", "DELETE song::nothing\n");
    EXPECT_EQ(run({"migrate", "--source", test::fixture("music/sample").string(), "--out", (dir / "o2").string(),
                   "--script", (dir / "bad.orion").string()})
                  .code,
              1);
}
