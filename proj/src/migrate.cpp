#include "umig/migrate.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include "umig/io.hpp"

namespace umig::migrate {

namespace fs = std::filesystem;
using source::Value;

JsonlDirectorySink::JsonlDirectorySink(fs::path dir, MigrationConfig config)
    : dir_(std::move(dir)), config_(config) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error("cannot create " + dir_.string() + ": " + ec.message());
}

JsonlDirectorySink::~JsonlDirectorySink() {
    if (!done_) abort();
}

fs::path JsonlDirectorySink::part(const std::string& name) const { return dir_ / (name + ".jsonl.part"); }

void JsonlDirectorySink::open_collection(const std::string& name) {
    std::ofstream out(part(name), std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot create " + part(name).string());
    names_.push_back(name);
}

void JsonlDirectorySink::write(const std::string& name, const std::vector<Document>& batch) {
    write_batch(part(name), batch, config_);
    ++appends_;
}

void JsonlDirectorySink::commit() {
    for (const auto& n : names_) {
        std::error_code ec;
        fs::rename(part(n), dir_ / (n + ".jsonl"), ec);
        if (ec) throw Error("cannot finalize collection " + n + ": " + ec.message());
    }
    done_ = true;
}

void JsonlDirectorySink::abort() noexcept {
    for (const auto& n : names_) {
        std::error_code ec;
        fs::remove(part(n), ec);
    }
    names_.clear();
    done_ = true;
}

void MemorySink::open_collection(const std::string& name) { collections_[name]; }

void MemorySink::write(const std::string& name, const std::vector<Document>& batch) {
    auto& c = collections_[name];
    c.insert(c.end(), batch.begin(), batch.end());
    ++batches_;
}

std::size_t write_batch(const fs::path& file, const std::vector<Document>& docs, const MigrationConfig& config) {
    if (docs.size() > config.batch_size)
        throw Error("batch of " + std::to_string(docs.size()) + " exceeds batch size " +
                    std::to_string(config.batch_size));
    std::string buf;
    for (const auto& d : docs) {
        buf += d.dump();
        buf += '\n';
    }
    std::ofstream out(file, std::ios::binary | std::ios::app);
    if (!out) throw Error("cannot open " + file.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    out.flush();
    if (!out) throw Error("write failed: " + file.string());
    return docs.size();
}

namespace {

struct Prop {
    enum class Kind { Attr, KeyJoin, RelKey, Ref, Side, Embed };
    Kind kind = Kind::Attr;
    std::string name;
    std::string feature;
    doc::Primitive prim = doc::Primitive::String;
    bool array = false;
    std::string path;
    std::vector<Prop> children;
};

std::string feature_of(const ElementId& id) {
    std::string p(id.path());
    auto dot = p.find('.');
    return dot == std::string::npos ? std::string() : p.substr(dot + 1);
}

std::vector<Prop> compile(const TraceStore& t2, const std::string& docname, std::vector<std::string>& chain,
                          const std::vector<doc::Property>& props) {
    std::vector<Prop> out;
    for (const auto& p : props) {
        const bool embedded = std::holds_alternative<doc::Embedded>(p.node);
        const ElementId id = ids::doc_property(docname, chain, p.name(), embedded);
        const auto links = t2.lookup(id, Direction::Backward);
        auto with = [&](TraceRole r) -> const TraceLink* {
            for (const TraceLink* l : links)
                if (l->role == r) return l;
            return nullptr;
        };
        Prop q;
        q.name = p.name();
        if (const auto* f = std::get_if<doc::Field>(&p.node)) {
            q.prim = f->type.kind;
            if (const TraceLink* l = with(TraceRole::Attribute)) {
                q.kind = Prop::Kind::Attr;
                q.feature = feature_of(l->sources.front());
            } else if (const TraceLink* k = with(TraceRole::KeyComponent)) {
                q.feature = feature_of(k->sources.front());
                q.kind = q.feature.empty() ? Prop::Kind::RelKey : Prop::Kind::KeyJoin;
            } else {
                throw Error(id.str() + ": no attribute or key trace link");
            }
        } else if (const auto* r = std::get_if<doc::DocReference>(&p.node)) {
            q.prim = r->type.kind;
            q.array = r->type.is_array;
            if (const TraceLink* l = with(TraceRole::RelTypeSide)) {
                q.kind = Prop::Kind::Side;
                q.feature = std::string(l->sources.front().path());
            } else {
                const TraceLink* ref = with(TraceRole::RefForward);
                if (!ref) ref = with(TraceRole::RefReverse);
                if (!ref) throw Error(id.str() + ": no reference trace link");
                q.kind = Prop::Kind::Ref;
                q.feature = feature_of(ref->sources.front());
            }
        } else {
            const auto& e = std::get<doc::Embedded>(p.node);
            const TraceLink* l = with(TraceRole::AggregateChild);
            if (!l) throw Error(id.str() + ": no aggregate trace link");
            q.kind = Prop::Kind::Embed;
            q.feature = feature_of(l->sources.front());
            q.array = e.is_many;
            chain.push_back(e.name);
            for (std::size_t i = 0; i < chain.size(); ++i) q.path += (i ? "/" : "") + chain[i];
            q.children = compile(t2, docname, chain, e.aggregates);
            chain.pop_back();
        }
        out.push_back(std::move(q));
    }
    return out;
}

Document convert(const Value& v, doc::Primitive p) {
    switch (p) {
        case doc::Primitive::String:
            return source::to_string(v);
        case doc::Primitive::Integer:
            if (auto* d = std::get_if<double>(&v)) return static_cast<std::int64_t>(std::llround(*d));
            if (auto* b = std::get_if<bool>(&v)) return static_cast<std::int64_t>(*b);
            if (auto* i = std::get_if<std::int64_t>(&v)) return *i;
            break;
        case doc::Primitive::Double:
            if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
            if (auto* d = std::get_if<double>(&v)) return *d;
            break;
        case doc::Primitive::Boolean:
            if (auto* b = std::get_if<bool>(&v)) return *b;
            if (auto* i = std::get_if<std::int64_t>(&v)) return *i != 0;
            break;
    }
    throw Error("cannot store '" + source::to_string(v) + "' as " + std::string(doc::to_string(p)));
}

std::optional<Document> id_value(const std::vector<Value>& parts, doc::Primitive p) {
    for (const auto& v : parts)
        if (source::is_null(v)) return std::nullopt;
    if (parts.empty()) return std::nullopt;
    if (parts.size() == 1) return convert(parts.front(), p);
    return Document(source::join_key(parts));
}

void build(source::SourceCursor& c, const std::vector<Prop>& props, Document& out, EntityReport* stats);

std::vector<Document> related_ids(source::SourceCursor& c, const Prop& q) {
    std::vector<Document> ids;
    auto r = c.related(q.feature);
    while (r->advance())
        if (auto v = id_value(r->id(), q.prim)) ids.push_back(std::move(*v));
    return ids;
}

void build(source::SourceCursor& c, const std::vector<Prop>& props, Document& out, EntityReport* stats) {
    for (const auto& q : props) {
        switch (q.kind) {
            case Prop::Kind::Attr: {
                Value v = c.value(q.feature);
                if (!source::is_null(v)) out[q.name] = convert(v, q.prim);
                break;
            }
            case Prop::Kind::KeyJoin:
                if (auto v = id_value(c.key(q.feature), doc::Primitive::String)) out[q.name] = std::move(*v);
                break;
            case Prop::Kind::RelKey: {
                std::vector<Value> parts;
                for (const auto& s : props) {
                    if (s.kind != Prop::Kind::Side) continue;
                    auto ids = related_ids(c, s);
                    if (ids.empty())
                        parts.emplace_back();
                    else
                        parts.emplace_back(ids.front().is_string() ? ids.front().get<std::string>() : ids.front().dump());
                }
                if (parts.empty()) parts = c.id();
                if (auto v = id_value(parts, doc::Primitive::String)) out[q.name] = *v;
                break;
            }
            case Prop::Kind::Ref:
            case Prop::Kind::Side: {
                auto ids = related_ids(c, q);
                if (q.array)
                    out[q.name] = Document(ids);
                else if (!ids.empty())
                    out[q.name] = std::move(ids.front());
                break;
            }
            case Prop::Kind::Embed: {
                auto r = c.related(q.feature);
                Document arr = Document::array();
                std::size_t n = 0;
                while (r->advance()) {
                    Document child = Document::object();
                    build(*r, q.children, child, stats);
                    ++n;
                    if (q.array) {
                        arr.push_back(std::move(child));
                    } else {
                        out[q.name] = std::move(child);
                        break;
                    }
                }
                if (q.array) out[q.name] = std::move(arr);
                if (stats) {
                    stats->embedded[q.path] += n;
                    stats->rows_read += n;
                }
                break;
            }
        }
    }
}

}  // namespace

struct InstanceTransformer::Plan {
    std::string type;
    std::string collection;
    std::string key;
    std::vector<Prop> props;
};

InstanceTransformer::InstanceTransformer(const TraceStore& t2, const doc::DocumentType& type)
    : plan_(std::make_unique<Plan>()) {
    plan_->collection = type.name;
    for (const TraceLink* l : t2.lookup(ids::doc_type(type.name), Direction::Backward)) {
        for (const auto& s : l->sources)
            if (s.kind() == SchemaKind::USchema && feature_of(s).empty() && s.path().front() != '@') {
                plan_->type = std::string(s.path());
                break;
            }
        if (!plan_->type.empty()) break;
    }
    if (plan_->type.empty()) throw Error("document type " + type.name + " does not trace back to a U-Schema type");
    if (const doc::Field* k = type.key_field()) plan_->key = k->name;
    std::vector<std::string> chain;
    plan_->props = compile(t2, type.name, chain, type.properties);
}

InstanceTransformer::~InstanceTransformer() = default;
InstanceTransformer::InstanceTransformer(InstanceTransformer&&) noexcept = default;

const std::string& InstanceTransformer::source_type() const { return plan_->type; }

Document InstanceTransformer::operator()(source::SourceCursor& cursor, EntityReport* stats) const {
    if (!cursor.has_data()) throw Error("cursor over " + cursor.entity() + " has no current record");
    Document d = Document::object();
    build(cursor, plan_->props, d, stats);
    if (!plan_->key.empty() && (!d.contains(plan_->key) || d[plan_->key].is_null()))
        throw Error(plan_->collection + ": document without key " + plan_->key);
    return d;
}

Document transform_instance(const TraceStore& t2, source::SourceCursor& cursor, const doc::DocumentType& type) {
    return InstanceTransformer(t2, type)(cursor);
}

MigrationReport migrate(const doc::DocumentSchema& target, const TraceStore& t2, source::SourceSession& session,
                        DocumentSink& sink, const MigrationConfig& config) {
    using clock = std::chrono::steady_clock;
    if (config.batch_size == 0) throw Error("batch size must be at least 1");
    MigrationReport rep;
    const auto start = clock::now();
    std::string current;
    try {
        for (const auto& te : target.documents) {
            current = te.name;
            const auto t0 = clock::now();
            InstanceTransformer tr(t2, te);
            EntityReport er;
            er.collection = te.name;
            er.source_type = tr.source_type();
            sink.open_collection(te.name);
            auto cursor = session.read_entity_all(tr.source_type());
            std::vector<Document> batch;
            batch.reserve(config.batch_size);
            auto flush = [&] {
                if (batch.empty()) return;
                sink.write(te.name, batch);
                er.docs_written += batch.size();
                ++er.batches;
                batch.clear();
            };
            while (cursor->advance()) {
                ++er.rows_read;
                batch.push_back(tr(*cursor, &er));
                if (batch.size() == config.batch_size) flush();
            }
            flush();
            cursor->close();
            er.elapsed_ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
            rep.total_rows += er.rows_read;
            rep.total_docs += er.docs_written;
            rep.per_entity.push_back(std::move(er));
        }
        sink.commit();
    } catch (const std::exception& e) {
        sink.abort();
        session.close();
        throw Error("migrating collection " + current + ": " + e.what());
    }
    session.close();
    rep.elapsed_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    rep.throughput = rep.elapsed_ms > 0 ? rep.total_rows / (rep.elapsed_ms / 1000.0) : 0;
    return rep;
}

Document manifest_json(const MigrationReport& report, const MigrationConfig& config, const ManifestInfo& info) {
    Document m = Document::object();
    Document cols = Document::array();
    for (const auto& e : report.per_entity) {
        Document c = Document::object();
        c["name"] = e.collection;
        c["file"] = e.collection + ".jsonl";
        c["sourceType"] = e.source_type;
        c["documents"] = e.docs_written;
        c["rowsRead"] = e.rows_read;
        c["batches"] = e.batches;
        Document emb = Document::object();
        for (const auto& [k, v] : e.embedded) emb[k] = v;
        c["embedded"] = std::move(emb);
        c["elapsedMs"] = e.elapsed_ms;
        cols.push_back(std::move(c));
    }
    m["collections"] = std::move(cols);
    m["config"] = {{"batchSize", config.batch_size}, {"mode", config.mode == Mode::Files ? "FILES" : "STREAM"},
                   {"nullPolicy", "OMIT"}};
    m["traces"] = {{"t1", info.t1_file}, {"t2", info.t2_file}};
    m["totals"] = {{"rows", report.total_rows},
                   {"documents", report.total_docs},
                   {"elapsedMs", report.elapsed_ms},
                   {"throughput", report.throughput}};
    return m;
}

MigrationReport migrate_to_directory(const doc::DocumentSchema& target, const TraceStore& t2,
                                     source::SourceSession& session, const fs::path& dir,
                                     const MigrationConfig& config, const ManifestInfo& info) {
    JsonlDirectorySink sink(dir, config);
    MigrationReport rep = migrate(target, t2, session, sink, config);
    io::write_file_atomic(dir / "manifest.json", manifest_json(rep, config, info).dump(2) + "\n");
    return rep;
}

}  // namespace umig::migrate
