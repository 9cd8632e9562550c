#include "umig/generator.hpp"

#include <ctime>
#include <fstream>
#include <random>

#include <json.hpp>

#include "umig/error.hpp"
#include "umig/io.hpp"

namespace umig::gen {

namespace fs = std::filesystem;

Scale parse_scale(std::string_view s) {
    if (s == "S" || s == "s") return Scale::S;
    if (s == "M" || s == "m") return Scale::M;
    if (s == "L" || s == "l") return Scale::L;
    throw Error("unknown scale '" + std::string(s) + "' (expected S, M or L)");
}

std::string_view to_string(Scale s) {
    switch (s) {
        case Scale::S: return "S";
        case Scale::M: return "M";
        case Scale::L: return "L";
    }
    return "S";
}

namespace {

constexpr std::size_t kPlaylistsPerUser = 10;
constexpr std::size_t kSongsPerPlaylist = 20;
constexpr std::size_t kListeningsPerUser = 50;
constexpr std::size_t kRecentPerUser = 10;
constexpr std::size_t kSongsPerUser = 5;
constexpr std::size_t kStyles = 25;

std::size_t users_for(Scale s) {
    switch (s) {
        case Scale::S: return 1000;
        case Scale::M: return 10000;
        case Scale::L: return 100000;
    }
    return 1000;
}

std::size_t styles_of(std::size_t song) { return song % 3 + 1; }

std::string id(char prefix, std::size_t n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%c%06zu", prefix, n);
    return buf;
}

/// `2025-01-01 00:00:00` plus `seconds`.
std::string timestamp(std::int64_t seconds) {
    std::tm base{};
    base.tm_year = 125;
    base.tm_mon = 0;
    base.tm_mday = 1;
    std::time_t t = timegm(&base) + seconds;
    std::tm out{};
    gmtime_r(&t, &out);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%d %H:%M:%S", &out);
    return buf;
}

class CsvFile {
public:
    CsvFile(const fs::path& dir, const std::string& table, const char* header)
        : final_(dir / (table + ".csv")), tmp_(dir / (table + ".csv.tmp")), out_(tmp_, std::ios::binary | std::ios::trunc) {
        if (!out_) throw Error("cannot write " + tmp_.string());
        out_ << header << '\n';
    }
    std::ofstream& out() { return out_; }
    void row() { ++rows_; }
    std::size_t finish() {
        out_.close();
        if (!out_) throw Error("write failed: " + tmp_.string());
        fs::rename(tmp_, final_);
        return rows_;
    }

private:
    fs::path final_;
    fs::path tmp_;
    std::ofstream out_;
    std::size_t rows_ = 0;
};

}  // namespace

std::string dataset_ddl() {
    return R"(-- schema: music

CREATE TABLE app_user (
  user_id       CHAR(36)    PRIMARY KEY,
  name          VARCHAR(80) NOT NULL,
  is_premium    BOOLEAN     DEFAULT false,
  register_date DATE        NOT NULL,
  CONSTRAINT user_name_ak UNIQUE (name)
);

CREATE TABLE song (
  song_id     CHAR(36)     PRIMARY KEY,
  title       VARCHAR(100) NOT NULL,
  duration    DECIMAL(4,2),
  artist      VARCHAR(80),
  plays_count INT          NOT NULL DEFAULT 0
);

CREATE TABLE musical_style (
  style_id CHAR(36)    PRIMARY KEY,
  name     VARCHAR(30) NOT NULL
);

CREATE TABLE song_style (
  song_id  CHAR(36) NOT NULL,
  style_id CHAR(36) NOT NULL,
  PRIMARY KEY (song_id, style_id),
  CONSTRAINT song_style_song FOREIGN KEY (song_id) REFERENCES song (song_id),
  CONSTRAINT song_style_style FOREIGN KEY (style_id) REFERENCES musical_style (style_id)
);

CREATE TABLE playlist (
  playlist_id   CHAR(36)    NOT NULL,
  user_id       CHAR(36)    NOT NULL,
  name          VARCHAR(30),
  creation_date DATE        NOT NULL,
  PRIMARY KEY (user_id, playlist_id),
  FOREIGN KEY (user_id) REFERENCES app_user (user_id) ON DELETE CASCADE
);

CREATE TABLE playlist_song (
  playlist_id  CHAR(36) NOT NULL,
  user_id      CHAR(36) NOT NULL,
  position_idx INT      NOT NULL,
  song_id      CHAR(36) NOT NULL,
  CONSTRAINT pls_pk PRIMARY KEY (user_id, playlist_id, position_idx),
  FOREIGN KEY (user_id, playlist_id) REFERENCES playlist (user_id, playlist_id) ON DELETE CASCADE,
  CONSTRAINT pls_song FOREIGN KEY (song_id) REFERENCES song (song_id)
);

CREATE TABLE most_recent_song (
  user_id      CHAR(36) NOT NULL,
  position_idx INT      NOT NULL,
  song_id      CHAR(36) NOT NULL,
  PRIMARY KEY (user_id, position_idx),
  FOREIGN KEY (user_id) REFERENCES app_user (user_id) ON DELETE CASCADE,
  FOREIGN KEY (song_id) REFERENCES song (song_id)
);

CREATE TABLE listening (
  user_id     CHAR(36) NOT NULL,
  song_id     CHAR(36) NOT NULL,
  plays_count INT      NOT NULL,
  status      VARCHAR(10),
  PRIMARY KEY (user_id, song_id),
  CONSTRAINT listening_user FOREIGN KEY (user_id) REFERENCES app_user (user_id),
  CONSTRAINT listening_song FOREIGN KEY (song_id) REFERENCES song (song_id)
);
)";
}

TableCounts counts_for(Scale s) {
    const std::size_t users = users_for(s);
    const std::size_t songs = users * kSongsPerUser;
    std::size_t song_styles = 0;
    for (std::size_t i = 0; i < songs; ++i) song_styles += styles_of(i);
    return {{"app_user", users},
            {"song", songs},
            {"musical_style", kStyles},
            {"song_style", song_styles},
            {"playlist", users * kPlaylistsPerUser},
            {"playlist_song", users * kPlaylistsPerUser * kSongsPerPlaylist},
            {"most_recent_song", users * kRecentPerUser},
            {"listening", users * kListeningsPerUser}};
}

std::string DatasetManifest::to_json() const {
    nlohmann::ordered_json j;
    j["scale"] = std::string(gen::to_string(spec.scale));
    j["seed"] = spec.seed;
    j["files"] = nlohmann::ordered_json::array();
    j["files"].push_back({{"table", "schema"}, {"file", "schema.sql"}});
    for (const auto& [t, n] : tables) j["files"].push_back({{"table", t}, {"file", t + ".csv"}, {"rows", n}});
    return j.dump(2) + "\n";
}

DatasetManifest generate_dataset(const ScaleSpec& spec, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());
    std::mt19937_64 rng(spec.seed);
    // Plain modulo keeps the sequence identical across standard libraries.
    auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };

    const std::size_t users = users_for(spec.scale);
    const std::size_t songs = users * kSongsPerUser;
    DatasetManifest m{spec, {}};
    io::write_file_atomic(dir / "schema.sql", dataset_ddl());

    {
        CsvFile f(dir, "app_user", "user_id,name,is_premium,register_date");
        for (std::size_t u = 0; u < users; ++u) {
            f.out() << id('u', u + 1) << ",user_" << u + 1 << ',' << (pick(2) ? "true" : "false") << ','
                    << timestamp(static_cast<std::int64_t>(u) * 3600 + static_cast<std::int64_t>(pick(3600))) << '\n';
            f.row();
        }
        m.tables.emplace_back("app_user", f.finish());
    }
    {
        CsvFile f(dir, "song", "song_id,title,duration,artist,plays_count");
        char dur[16];
        for (std::size_t s = 0; s < songs; ++s) {
            const std::size_t centis = 100 + pick(900);
            std::snprintf(dur, sizeof dur, "%zu.%02zu", centis / 100, centis % 100);
            f.out() << id('s', s + 1) << ",song_" << s + 1 << ',' << dur << ",artist_" << pick(500) + 1 << ','
                    << pick(100000) << '\n';
            f.row();
        }
        m.tables.emplace_back("song", f.finish());
    }
    {
        CsvFile f(dir, "musical_style", "style_id,name");
        for (std::size_t g = 0; g < kStyles; ++g) {
            f.out() << id('g', g + 1) << ",style_" << g + 1 << '\n';
            f.row();
        }
        m.tables.emplace_back("musical_style", f.finish());
    }
    {
        CsvFile f(dir, "song_style", "song_id,style_id");
        for (std::size_t s = 0; s < songs; ++s) {
            // Stride 7 is coprime with the style count, so picks are distinct.
            const std::size_t first = pick(kStyles);
            for (std::size_t j = 0; j < styles_of(s); ++j) {
                f.out() << id('s', s + 1) << ',' << id('g', (first + j * 7) % kStyles + 1) << '\n';
                f.row();
            }
        }
        m.tables.emplace_back("song_style", f.finish());
    }
    {
        CsvFile pl(dir, "playlist", "playlist_id,user_id,name,creation_date");
        CsvFile ps(dir, "playlist_song", "playlist_id,user_id,position_idx,song_id");
        std::size_t next = 0;
        for (std::size_t u = 0; u < users; ++u) {
            for (std::size_t p = 0; p < kPlaylistsPerUser; ++p) {
                const std::string pid = id('p', ++next);
                pl.out() << pid << ',' << id('u', u + 1) << ",playlist_" << next << ','
                         << timestamp(static_cast<std::int64_t>(next) * 600) << '\n';
                pl.row();
                for (std::size_t k = 0; k < kSongsPerPlaylist; ++k) {
                    ps.out() << pid << ',' << id('u', u + 1) << ',' << k + 1 << ',' << id('s', pick(songs) + 1) << '\n';
                    ps.row();
                }
            }
        }
        m.tables.emplace_back("playlist", pl.finish());
        m.tables.emplace_back("playlist_song", ps.finish());
    }
    {
        CsvFile f(dir, "most_recent_song", "user_id,position_idx,song_id");
        for (std::size_t u = 0; u < users; ++u)
            for (std::size_t k = 0; k < kRecentPerUser; ++k) {
                f.out() << id('u', u + 1) << ',' << k + 1 << ',' << id('s', pick(songs) + 1) << '\n';
                f.row();
            }
        m.tables.emplace_back("most_recent_song", f.finish());
    }
    {
        static const char* const kStatus[] = {"completed", "skipped", "paused", ""};
        CsvFile f(dir, "listening", "user_id,song_id,plays_count,status");
        for (std::size_t u = 0; u < users; ++u) {
            // Stride 13 is coprime with the song count, so songs are distinct.
            const std::size_t offset = pick(songs);
            for (std::size_t j = 0; j < kListeningsPerUser; ++j) {
                f.out() << id('u', u + 1) << ',' << id('s', (offset + j * 13) % songs + 1) << ',' << pick(50) + 1 << ','
                        << kStatus[pick(4)] << '\n';
                f.row();
            }
        }
        m.tables.emplace_back("listening", f.finish());
    }
    io::write_file_atomic(dir / "manifest.json", m.to_json());
    return m;
}

}  // namespace umig::gen
