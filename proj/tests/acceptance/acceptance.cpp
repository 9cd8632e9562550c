#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "support.hpp"
#include "umig/athena.hpp"
#include "umig/ddl.hpp"
#include "umig/docschema_json.hpp"
#include "umig/evolution.hpp"
#include "umig/generator.hpp"
#include "umig/io.hpp"
#include "umig/model_index.hpp"
#include "umig/model_json.hpp"
#include "umig/relational.hpp"
#include "umig/transform.hpp"
#include "umig/validation.hpp"

using namespace umig;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

/// Failed expectations of one criterion.
class Findings {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok) failures_.push_back(what);
    }
    template <class A, class B>
    void equal(const A& a, const B& b, const std::string& what) {
        if (!(a == b)) {
            std::ostringstream s;
            s << what << ": got " << a << ", expected " << b;
            failures_.push_back(s.str());
        }
    }
    void note(const std::string& n) { notes_.push_back(n); }

    const std::vector<std::string>& failures() const { return failures_; }
    const std::vector<std::string>& notes() const { return notes_; }

private:
    std::vector<std::string> failures_;
    std::vector<std::string> notes_;
};

int run_cli(std::vector<std::string> args, std::string* out = nullptr) {
    std::ostringstream o, e;
    int code = cli::dispatch(args, o, e);
    if (out) *out = o.str();
    if (code != 0) std::cerr << "umig " << args[0] << ": " << e.str();
    return code;
}

rel::RelationalSchema load_ddl(const fs::path& p) { return rel::parse_ddl(io::read_file(p)); }

std::vector<json> read_jsonl(const fs::path& p) {
    std::vector<json> out;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(json::parse(line));
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// 1. Running-example schema transform through the CLI.
void running_example_transform(Findings& f) {
    test::TempDir dir;
    auto start = Clock::now();
    f.equal(run_cli({"transform", test::fixture("music/schema.sql").string(), "--from", "rel", "--to", "us", "-o",
                     (dir / "music.us.json").string()}),
            0, "transform rel->us exit code");
    f.equal(run_cli({"transform", (dir / "music.us.json").string(), "--from", "us", "--to", "doc", "-o",
                     (dir / "music.docschema.json").string()}),
            0, "transform us->doc exit code");
    double elapsed = seconds_since(start);

    auto u = parse_uschema_json(io::read_file(dir / "music.us.json"));
    std::set<std::string> roots, nonroots, rts;
    for (const auto& e : u.entities) (e.root ? roots : nonroots).insert(e.name);
    for (const auto& r : u.relationships) rts.insert(r.name);
    f.expect(roots == std::set<std::string>{"app_user", "song", "album", "musical_style"}, "root entity set");
    f.expect(nonroots == std::set<std::string>{"playlist", "playlist_song", "most_recent_song"}, "non-root entity set");
    f.expect(rts == std::set<std::string>{"listening", "song_style"}, "relationship type set");
    const auto* user = u.entity("app_user");
    f.expect(user && user->find_as<us::Aggregate>("playlists") &&
                 user->find_as<us::Aggregate>("playlists")->specified_by == "playlist",
             "aggregate playlists in app_user");
    const auto* album = u.entity("album");
    const auto* songs = album ? album->find_as<us::Reference>("songs") : nullptr;
    f.expect(songs && songs->refs_to == "song" && songs->attributes == std::vector<std::string>{"song_id_song"},
             "reference songs with attribute song_id_song in album");
    f.expect(album && album->find_as<us::Attribute>("song_id_song"), "attribute song_id_song in album");

    auto produced = doc::parse_docschema(io::read_file(dir / "music.docschema.json"));
    auto expected = doc::parse_docschema(io::read_file(test::fixture("music/expected.docschema.json")));
    auto diffs = validation::diff_models(produced, expected);
    for (const auto& d : diffs) f.expect(false, "doc schema diff at " + d.path);
    std::string text;
    f.equal(run_cli({"diff", (dir / "music.docschema.json").string(),
                     test::fixture("music/expected.docschema.json").string()},
                    &text),
            0, "diff exit code");
    f.equal(text, std::string("no differences\n"), "diff output");
    f.expect(elapsed < 1.0, "runtime " + fmt(elapsed) + " s >= 1 s");
    f.note("transform " + fmt(elapsed) + " s");
}

// 2. Round trip on both fixtures.
void roundtrip_preservation(Findings& f) {
    for (const char* name : {"music", "northwind"}) {
        auto start = Clock::now();
        std::string out;
        f.equal(run_cli({"roundtrip", test::fixture(std::string(name) + "/schema.sql").string(), "--report", "json"},
                        &out),
                0, std::string(name) + " roundtrip exit code");
        double elapsed = seconds_since(start);
        std::map<std::string, json> cat;
        const json report = json::parse(out);
        for (const auto& c : report["categories"]) cat[c["category"].get<std::string>()] = c;
        const std::string n = name;
        f.equal(cat["Entities"]["precision"].get<double>(), 1.0, n + " Entities P");
        f.equal(cat["Entities"]["recall"].get<double>(), 1.0, n + " Entities R");
        f.equal(cat["Entities"]["f1"].get<double>(), 1.0, n + " Entities F1");
        f.expect(cat["Attributes"]["f1"].get<double>() >= 0.90, n + " Attributes F1 < 0.90");
        f.expect(cat["ForeignKeys"]["f1"].get<double>() >= 0.85, n + " ForeignKeys F1 < 0.85");
        f.expect(cat["PrimaryKeys"]["recall"].get<double>() < 1.0, n + " PrimaryKeys recall not < 1");
        f.expect(cat["DataTypes"]["f1"].get<double>() < 1.0, n + " DataTypes F1 not < 1");
        f.expect(elapsed < 5.0, n + " runtime >= 5 s");
        f.note(n + ": Attr F1 " + fmt(cat["Attributes"]["f1"]) + ", PK R " + fmt(cat["PrimaryKeys"]["recall"]) +
               ", FK F1 " + fmt(cat["ForeignKeys"]["f1"]) + ", Types F1 " + fmt(cat["DataTypes"]["f1"]));
    }
}

struct Generated {
    test::TempDir data;
    test::TempDir out;
    double throughput = 0;
    double seconds = 0;
};

/// generate-dataset then migrate, both through the CLI.
bool generate_and_migrate(const std::string& scale, Generated& g, Findings& f) {
    if (run_cli({"generate-dataset", "--scale", scale, "--seed", "42", "--out", g.data.path().string()}) != 0) {
        f.expect(false, "generate-dataset " + scale + " failed");
        return false;
    }
    auto start = Clock::now();
    if (run_cli({"migrate", "--source", g.data.path().string(), "--out", g.out.path().string()}) != 0) {
        f.expect(false, "migrate " + scale + " failed");
        return false;
    }
    g.seconds = seconds_since(start);
    g.throughput = json::parse(io::read_file(g.out / "manifest.json"))["totals"]["throughput"].get<double>();
    return true;
}

Generated* small_dataset = nullptr;

// 3. Data conservation at S, throughput stability S vs M.
void data_conservation(Findings& f) {
    if (!generate_and_migrate("S", *small_dataset, f)) return;
    const Generated& s = *small_dataset;
    auto users = read_jsonl(s.out / "app_user.jsonl");
    std::size_t playlists = 0, playlist_songs = 0, recent = 0;
    for (const auto& u : users) {
        for (const auto& p : u["playlists"]) {
            ++playlists;
            playlist_songs += p["playlist_songs"].size();
        }
        recent += u["most_recent_songs"].size();
    }
    f.equal(users.size(), std::size_t{1000}, "user docs");
    f.equal(read_jsonl(s.out / "listening.jsonl").size(), std::size_t{50000}, "listening docs");
    f.equal(read_jsonl(s.out / "song.jsonl").size(), std::size_t{5000}, "song docs");
    f.equal(playlists, std::size_t{10000}, "embedded playlists");
    f.equal(playlist_songs, std::size_t{200000}, "embedded playlist_songs");
    f.equal(recent, std::size_t{10000}, "embedded most_recent_songs");
    f.expect(s.seconds < 600, "S migration over 10 min");

    Generated m;
    if (!generate_and_migrate("M", m, f)) return;
    double ratio = m.throughput / s.throughput;
    f.expect(ratio >= 0.5 && ratio <= 1.5, "throughput M/S ratio " + fmt(ratio) + " outside 0.5..1.5");
    f.note("S " + fmt(s.seconds) + " s at " + fmt(s.throughput) + " rows/s, M " + fmt(m.seconds) + " s at " +
           fmt(m.throughput) + " rows/s");
}

std::string cell(const test::CsvRow& r, const std::string& c) { return r.at(c).value_or("<null>"); }

std::string field(const json& doc, const std::string& name) {
    if (!doc.contains(name)) return "<null>";
    const json& v = doc[name];
    return v.is_string() ? v.get<std::string>() : v.dump();
}

// 4. Sampled documents against a naive CSV join.
void instance_oracle(Findings& f) {
    const Generated& s = *small_dataset;
    if (!fs::exists(s.out / "app_user.jsonl")) {
        f.expect(false, "no migrated S dataset");
        return;
    }
    std::mt19937_64 rng(4242);
    auto users = read_jsonl(s.out / "app_user.jsonl");
    std::set<std::size_t> picks;
    while (picks.size() < 100) picks.insert(rng() % users.size());
    std::set<std::string> sample;
    for (auto i : picks) sample.insert(users[i]["user_id"].get<std::string>());

    using Songs = std::set<std::pair<std::string, std::string>>;
    using Playlist = std::tuple<std::string, std::string, std::string, Songs>;
    std::map<std::string, std::map<std::string, Playlist>> expected;
    for (const auto& r : test::read_csv_rows(s.data / "playlist.csv")) {
        if (!sample.count(cell(r, "user_id"))) continue;
        expected[cell(r, "user_id")][cell(r, "playlist_id")] =
            Playlist{cell(r, "playlist_id"), cell(r, "name"), cell(r, "creation_date"), {}};
    }
    for (const auto& r : test::read_csv_rows(s.data / "playlist_song.csv")) {
        auto u = expected.find(cell(r, "user_id"));
        if (u == expected.end()) continue;
        std::get<3>(u->second.at(cell(r, "playlist_id"))).insert({cell(r, "position_idx"), cell(r, "song_id")});
    }
    std::size_t mismatches = 0;
    for (auto i : picks) {
        const json& u = users[i];
        std::set<Playlist> got, want;
        for (const auto& p : u["playlists"]) {
            Songs songs;
            for (const auto& ps : p["playlist_songs"]) songs.insert({field(ps, "position_idx"), field(ps, "song")});
            got.insert(Playlist{field(p, "playlist_id"), field(p, "name"), field(p, "creation_date"), songs});
        }
        for (const auto& [id, p] : expected[u["user_id"].get<std::string>()]) want.insert(p);
        if (got != want) ++mismatches;
    }
    f.equal(mismatches, std::size_t{0}, "app_user documents differing from the CSV join");

    auto listening = read_jsonl(s.out / "listening.jsonl");
    std::map<std::string, test::CsvRow> rows;
    for (const auto& r : test::read_csv_rows(s.data / "listening.csv"))
        rows[cell(r, "user_id") + "#" + cell(r, "song_id")] = r;
    std::size_t bad = 0;
    for (int k = 0; k < 100; ++k) {
        const json& d = listening[rng() % listening.size()];
        auto it = rows.find(field(d, "listening_id"));
        if (it == rows.end()) {
            ++bad;
            continue;
        }
        const auto& r = it->second;
        bool ok = field(d, "listening_user") == cell(r, "user_id") && field(d, "listening_song") == cell(r, "song_id") &&
                  field(d, "plays_count") == cell(r, "plays_count") && field(d, "status") == cell(r, "status") &&
                  d.size() == 4u + (r.at("status") ? 1u : 0u);
        bad += !ok;
    }
    f.equal(bad, std::size_t{0}, "listening documents differing from their CSV row");
}

// 5. Trace totality and composition.
void trace_totality(Findings& f) {
    std::vector<rel::RelationalSchema> schemas{load_ddl(test::fixture("music/schema.sql")),
                                               load_ddl(test::fixture("northwind/schema.sql"))};
    std::mt19937_64 rng(5150);
    for (int i = 0; i < 50; ++i) schemas.push_back(test::random_schema(rng));
    std::size_t collections = 0;
    for (std::size_t i = 0; i < schemas.size(); ++i) {
        const auto& s = schemas[i];
        const std::string label = "schema " + std::to_string(i) + " (" + s.name + ")";
        auto u = rel_to_uschema(s);
        auto d = uschema_to_document(u.target);
        f.equal(untraced_targets(u.trace, ModelIndex(u.target)).size(), std::size_t{0}, label + " untraced in T1");
        f.equal(untraced_targets(d.trace, ModelIndex(d.target)).size(), std::size_t{0}, label + " untraced in T2");
        auto u2 = document_to_uschema(d.target);
        f.equal(untraced_targets(u2.trace, ModelIndex(u2.target)).size(), std::size_t{0}, label + " untraced in D->U");
        auto r2 = uschema_to_relational(u2.target);
        f.equal(untraced_targets(r2.trace, ModelIndex(r2.target)).size(), std::size_t{0}, label + " untraced in U->R");

        auto composed = compose(u.trace, d.trace);
        for (const auto& dt : d.target.documents) {
            ++collections;
            auto tables = test::source_tables(composed, ids::doc_type(dt.name));
            f.expect(tables == std::vector<std::string>{dt.name},
                     label + " collection " + dt.name + " traces to " + std::to_string(tables.size()) + " tables");
        }
    }
    f.note(std::to_string(schemas.size()) + " schemas, " + std::to_string(collections) + " collections");
}

// 6. Evolution script on the textual example.
void orion_consistency(Findings& f) {
    auto model = us::parse_athena(io::read_file(test::fixture("music/music.athena")));
    auto trace = test::identity_trace(model);
    auto ops = evo::parse_orion(io::read_file(test::fixture("music/evolution.orion")));
    f.equal(ops.size(), std::size_t{5}, "script statements");
    auto r = evo::apply_changes(model, ops, trace);
    f.expect(r.model.entity("AppUser") && !r.model.entity("User"), "User renamed to AppUser");
    const auto* song = r.model.entity("Song");
    const auto* len = song ? song->find_as<us::Attribute>("length") : nullptr;
    f.expect(len && len->type == us::DataType::of(us::DataType::Kind::Integer) && !song->find("duration"),
             "Song.length: Integer");
    f.expect(song && song->find_as<us::Aggregate>("styles"), "Song.styles is an aggregate");
    f.expect(r.model.entity("Listening") && !r.model.entity("Listening")->find("status"), "Listening.status deleted");
    f.equal(r.trace.attach(ModelIndex(r.model)).size(), std::size_t{0}, "unresolved trace ids after evolution");

    // Same kind of script on the pivot model derived from the fixture DDL, with the real T1.
    auto rel = load_ddl(test::fixture("music/schema.sql"));
    auto t1 = rel_to_uschema(rel);
    auto e = evo::apply_changes(t1.target,
                                evo::parse_orion("RENAME ENTITY app_user TO AppUser\nRENAME song::duration TO length\n"
                                                 "CAST ATTR song::length TO Integer\nDELETE listening::status"),
                                t1.trace);
    ModelIndex rel_index(rel), evolved(e.model);
    f.equal(e.trace.attach(rel_index).size(), std::size_t{0}, "unresolved relational ids in evolved T1");
    f.equal(e.trace.attach(evolved).size(), std::size_t{0}, "unresolved pivot ids in evolved T1");
    f.equal(untraced_targets(e.trace, evolved).size(), std::size_t{0}, "untraced evolved elements");

    const auto model_before = model;
    const auto trace_before = trace;
    for (const char* bad : {"RENAME ENTITY User TO AppUser\nDELETE Song::lyrics", "RENAME ENTITY User TO Song",
                            "CAST ATTR Nobody::x TO Integer", "MORPH REF Song::title TO t"}) {
        bool threw = false;
        try {
            evo::apply_changes(model, evo::parse_orion(bad), trace);
        } catch (const Error&) {
            threw = true;
        }
        f.expect(threw, std::string("no error for: ") + bad);
        f.expect(model == model_before && trace == trace_before, std::string("inputs changed by: ") + bad);
    }
}

// 7. Table predicates.
void predicates(Findings& f) {
    auto s = load_ddl(test::fixture("music/schema.sql"));
    auto weak = [&](const char* t) { return rel::is_weak(*s.table(t)); };
    auto mn = [&](const char* t) { return rel::is_mn(*s.table(t)); };
    f.expect(weak("playlist") && !mn("playlist"), "playlist weak");
    f.expect(weak("playlist_song") && !mn("playlist_song"), "playlist_song weak");
    f.expect(weak("most_recent_song"), "most_recent_song weak");
    f.expect(mn("listening") && !weak("listening"), "listening MN");
    f.expect(mn("song_style"), "song_style MN");
    f.expect(!weak("app_user") && !mn("app_user"), "app_user neither");
    const auto& ps = *s.table("playlist_song");
    for (const auto& fk : ps.fkeys)
        f.expect(rel::fk_in_pk(ps, fk) == (fk.ref_table == "playlist"), "fk_in_pk on " + fk.constraint_name);

    std::mt19937_64 rng(777);
    std::size_t weak_n = 0, mn_n = 0;
    for (int i = 0; i < 1000; ++i) {
        auto t = test::random_table(rng);
        std::set<std::string> pk;
        if (t.primary_key()) pk.insert(t.primary_key()->columns.begin(), t.primary_key()->columns.end());
        int inside = 0;
        for (const auto& fk : t.fkeys)
            inside += !pk.empty() && std::all_of(fk.columns.begin(), fk.columns.end(),
                                                 [&](const std::string& c) { return pk.count(c) > 0; });
        bool w = rel::is_weak(t), m = rel::is_mn(t);
        f.expect(!(w && m), "weak and MN at once on random table " + std::to_string(i));
        f.expect(w == (inside == 1) && m == (inside >= 2), "classification mismatch on random table " + std::to_string(i));
        weak_n += w;
        mn_n += m;
    }
    f.note("1000 random tables: " + std::to_string(weak_n) + " weak, " + std::to_string(mn_n) + " MN");
}

// 8. Serialization identities.
void serialization(Findings& f) {
    auto diff_count = [](const validation::AnyModel& a, const validation::AnyModel& b) {
        return validation::diff_models(a, b).size();
    };
    auto athena = us::parse_athena(io::read_file(test::fixture("music/music.athena")));
    auto athena2 = us::parse_athena(us::print_athena(athena));
    f.expect(athena2 == athena, "Athena parse.print differs");
    f.equal(diff_count(athena, athena2), std::size_t{0}, "Athena diffs");

    for (const char* ddl : {"music/schema.sql", "northwind/schema.sql", "music/sample/schema.sql"}) {
        auto s = load_ddl(test::fixture(ddl));
        auto s2 = rel::parse_ddl(rel::print_ddl(s));
        f.expect(s2 == s, std::string("DDL parse.print differs for ") + ddl);
        f.equal(diff_count(s, s2), std::size_t{0}, std::string("DDL diffs for ") + ddl);

        auto u = rel_to_uschema(s);
        auto d = uschema_to_document(u.target);
        auto d2 = doc::parse_docschema(doc::print_docschema(d.target));
        f.expect(d2 == d.target, std::string("doc schema parse.print differs for ") + ddl);
        f.equal(diff_count(d.target, d2), std::size_t{0}, std::string("doc schema diffs for ") + ddl);
        for (const TraceStore* t : {&u.trace, &d.trace}) {
            auto t2 = load_trace(save_trace(*t));
            f.expect(t2 == *t, std::string("trace load.save differs for ") + ddl);
        }
        auto c = compose(u.trace, d.trace);
        f.expect(load_trace(save_trace(c)) == c, std::string("composed trace load.save differs for ") + ddl);
    }
    auto expected_text = io::read_file(test::fixture("music/expected.docschema.json"));
    auto expected = doc::parse_docschema(expected_text);
    f.expect(doc::parse_docschema(doc::print_docschema(expected)) == expected, "expected doc schema parse.print differs");
    f.expect(doc::print_docschema(expected) == expected_text, "expected doc schema not byte-stable");
}

}  // namespace

int main() {
    struct Criterion {
        int number;
        const char* title;
        std::function<void(Findings&)> run;
    };
    const std::vector<Criterion> criteria{
        {1, "running-example schema transform", running_example_transform},
        {2, "round-trip entity preservation", roundtrip_preservation},
        {3, "data conservation at scale S", data_conservation},
        {4, "instance oracle", instance_oracle},
        {5, "trace totality and composition", trace_totality},
        {6, "evolution consistency", orion_consistency},
        {7, "table predicates", predicates},
        {8, "serialization identities", serialization},
    };
    Generated shared;
    small_dataset = &shared;

    int failed = 0;
    for (const auto& c : criteria) {
        Findings f;
        auto start = Clock::now();
        try {
            c.run(f);
        } catch (const std::exception& e) {
            f.expect(false, std::string("exception: ") + e.what());
        }
        double elapsed = seconds_since(start);
        bool ok = f.failures().empty();
        failed += !ok;
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c.number << ": " << c.title << " (" << fmt(elapsed)
                  << " s";
        for (const auto& n : f.notes()) std::cout << "; " << n;
        std::cout << ")\n";
        for (std::size_t i = 0; i < f.failures().size() && i < 20; ++i) std::cout << "    " << f.failures()[i] << "\n";
        std::cout.flush();
    }
    return failed == 0 ? 0 : 1;
}
