#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "umig/document.hpp"
#include "umig/source.hpp"
#include "umig/trace.hpp"

/// Trace-driven data migration from a source session to document collections.
namespace umig::migrate {

using Document = nlohmann::ordered_json;

enum class Mode { Files, Stream };

struct MigrationConfig {
    std::size_t batch_size = 1000;
    Mode mode = Mode::Files;
};

struct EntityReport {
    std::string collection;
    std::string source_type;
    /// Source records consumed, embedded ones included.
    std::size_t rows_read = 0;
    std::size_t docs_written = 0;
    std::size_t batches = 0;
    /// Embedded objects per embedded property path (`playlists/playlist_songs`).
    std::map<std::string, std::size_t> embedded;
    double elapsed_ms = 0;
};

struct MigrationReport {
    std::vector<EntityReport> per_entity;
    std::size_t total_rows = 0;
    std::size_t total_docs = 0;
    double elapsed_ms = 0;
    double throughput = 0;  // rows per second
};

/// Receives documents collection by collection, one batch at a time.
class DocumentSink {
public:
    virtual ~DocumentSink() = default;
    virtual void open_collection(const std::string& name) = 0;
    virtual void write(const std::string& name, const std::vector<Document>& batch) = 0;
    virtual void commit() = 0;
    virtual void abort() noexcept = 0;
};

/// One `<collection>.jsonl` per collection. Files are written under a
/// temporary name and only renamed into place by commit().
class JsonlDirectorySink final : public DocumentSink {
public:
    JsonlDirectorySink(std::filesystem::path dir, MigrationConfig config);
    ~JsonlDirectorySink() override;

    void open_collection(const std::string& name) override;
    void write(const std::string& name, const std::vector<Document>& batch) override;
    void commit() override;
    void abort() noexcept override;

    std::size_t appends() const noexcept { return appends_; }

private:
    std::filesystem::path part(const std::string& name) const;

    std::filesystem::path dir_;
    MigrationConfig config_;
    std::vector<std::string> names_;
    std::size_t appends_ = 0;
    bool done_ = false;
};

/// Keeps documents in memory; used for streaming into another process step.
class MemorySink final : public DocumentSink {
public:
    void open_collection(const std::string& name) override;
    void write(const std::string& name, const std::vector<Document>& batch) override;
    void commit() override { committed_ = true; }
    void abort() noexcept override { collections_.clear(); }

    const std::map<std::string, std::vector<Document>>& collections() const noexcept { return collections_; }
    std::size_t batches() const noexcept { return batches_; }
    bool committed() const noexcept { return committed_; }

private:
    std::map<std::string, std::vector<Document>> collections_;
    std::size_t batches_ = 0;
    bool committed_ = false;
};

/// Appends `docs` to `file` as JSON lines and flushes. Throws Error when the
/// batch exceeds the configured size or the write fails.
std::size_t write_batch(const std::filesystem::path& file, const std::vector<Document>& docs,
                        const MigrationConfig& config);

/// Builds documents of one document type from cursors positioned on its
/// source instances, following the properties' T2 links.
class InstanceTransformer {
public:
    InstanceTransformer(const TraceStore& t2, const doc::DocumentType& type);
    ~InstanceTransformer();
    InstanceTransformer(InstanceTransformer&&) noexcept;

    /// U-Schema type whose instances feed the documents.
    const std::string& source_type() const;
    Document operator()(source::SourceCursor& cursor, EntityReport* stats = nullptr) const;

private:
    struct Plan;
    std::unique_ptr<Plan> plan_;
};

Document transform_instance(const TraceStore& t2, source::SourceCursor& cursor, const doc::DocumentType& type);

/// Migrates every document type of `target` in schema order. The session is
/// closed on return, also when an error is thrown; the sink is then aborted.
MigrationReport migrate(const doc::DocumentSchema& target, const TraceStore& t2, source::SourceSession& session,
                        DocumentSink& sink, const MigrationConfig& config = {});

struct ManifestInfo {
    std::string t1_file;
    std::string t2_file;
};

/// Migration into `<dir>/<collection>.jsonl` plus `<dir>/manifest.json`.
MigrationReport migrate_to_directory(const doc::DocumentSchema& target, const TraceStore& t2,
                                     source::SourceSession& session, const std::filesystem::path& dir,
                                     const MigrationConfig& config = {}, const ManifestInfo& info = {});

Document manifest_json(const MigrationReport& report, const MigrationConfig& config, const ManifestInfo& info);

}  // namespace umig::migrate
