#include "cli.hpp"

#include <CLI11.hpp>
#include <iostream>

#include "umig/ddl.hpp"
#include "umig/docschema_json.hpp"
#include "umig/evolution.hpp"
#include "umig/generator.hpp"
#include "umig/io.hpp"
#include "umig/migrate.hpp"
#include "umig/model_json.hpp"
#include "umig/source.hpp"
#include "umig/transform.hpp"
#include "umig/validation.hpp"

namespace umig::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-")
        out << text;
    else
        io::write_file_atomic(path, text);
}

std::string kind_name(const AnyModel& m) {
    switch (m.index()) {
        case 0: return "rel";
        case 1: return "us";
        default: return "doc";
    }
}

struct Staged {
    AnyModel model;
    TraceStore trace;
};

/// One forward or reverse step, `from` already matching the model kind.
Staged step(const AnyModel& m, const std::string& to) {
    if (const auto* r = std::get_if<rel::RelationalSchema>(&m)) {
        if (to != "us") throw UsageError("a relational model transforms to us");
        auto t = rel_to_uschema(*r);
        return {std::move(t.target), std::move(t.trace)};
    }
    if (const auto* u = std::get_if<us::USchemaModel>(&m)) {
        if (to == "doc") {
            auto t = uschema_to_document(*u);
            return {std::move(t.target), std::move(t.trace)};
        }
        if (to == "rel") {
            auto t = uschema_to_relational(*u);
            return {std::move(t.target), std::move(t.trace)};
        }
        throw UsageError("a U-Schema model transforms to doc or rel");
    }
    if (to != "us") throw UsageError("a document schema transforms to us");
    auto t = document_to_uschema(std::get<doc::DocumentSchema>(m));
    return {std::move(t.target), std::move(t.trace)};
}

void warn_all(const std::vector<std::string>& ws, std::ostream& err) {
    for (const auto& w : ws) err << "warning: " << w << "\n";
}

void reject_connections(const std::string& conn) {
    if (!conn.empty()) throw UsageError("live database connections are not supported; use a CSV directory");
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Relational to document schema and data migration through a U-Schema pivot model", "umig"};
    app.require_subcommand(1);

    std::string input, input2, output, trace_in, trace_out, from, to, script, source_dir, out_dir, report = "md",
                scale = "S", connection, diff_format = "text";
    std::size_t batch = 1000;
    std::uint64_t seed = 42;

    auto* inject = app.add_subcommand("inject", "Parse a DDL file into a relational model");
    inject->add_option("schema", input, "DDL file")->required();
    inject->add_option("-o,--output", output, "model file (.json or .sql)");
    inject->add_option("--connection", connection, "reserved for live databases");

    auto* emit_ddl = app.add_subcommand("emit-ddl", "Print a relational model as DDL");
    emit_ddl->add_option("model", input, "relational model")->required();
    emit_ddl->add_option("-o,--output", output, "output file");

    auto* emit_athena = app.add_subcommand("emit-athena", "Print a U-Schema model in Athena notation");
    emit_athena->add_option("model", input, "U-Schema model")->required();
    emit_athena->add_option("-o,--output", output, "output file");

    auto* transform = app.add_subcommand("transform", "Transform a model between rel, us and doc");
    transform->add_option("model", input, "input model")->required();
    transform->add_option("--from", from, "input kind")->required()->check(CLI::IsMember({"rel", "us", "doc"}));
    transform->add_option("--to", to, "output kind")->required()->check(CLI::IsMember({"us", "doc", "rel"}));
    transform->add_option("-o,--output", output, "output model");
    transform->add_option("--trace", trace_out, "trace file to write");

    auto* evolve = app.add_subcommand("evolve", "Apply an evolution script to a U-Schema model");
    evolve->add_option("model", input, "U-Schema model")->required();
    evolve->add_option("--script", script, "evolution script")->required();
    evolve->add_option("--trace", trace_in, "trace whose targets follow the model");
    evolve->add_option("--trace-out", trace_out, "evolved trace file");
    evolve->add_option("-o,--output", output, "evolved model");

    auto* migrate = app.add_subcommand("migrate", "Migrate a CSV dataset to JSON-lines collections");
    migrate->add_option("--source", source_dir, "directory with schema.sql and one CSV per table")->required();
    migrate->add_option("--out", out_dir, "output directory")->required();
    migrate->add_option("--batch", batch, "documents per write")->check(CLI::PositiveNumber);
    migrate->add_option("--script", script, "evolution script applied to the pivot model first");
    migrate->add_option("--connection,--target-connection", connection, "reserved for live databases");

    auto* roundtrip = app.add_subcommand("roundtrip", "Rebuild a relational schema through the pivot model");
    roundtrip->add_option("schema", input, "DDL file or relational model")->required();
    roundtrip->add_option("--report", report, "report format")->check(CLI::IsMember({"json", "md", "markdown"}));
    roundtrip->add_option("-o,--output", output, "report file");

    auto* diff = app.add_subcommand("diff", "Structural differences between two models of one kind");
    diff->add_option("a", input, "first model")->required();
    diff->add_option("b", input2, "second model")->required();
    diff->add_option("--format", diff_format, "output format")->check(CLI::IsMember({"text", "json"}));

    auto* gen = app.add_subcommand("generate-dataset", "Write a deterministic music streaming dataset");
    gen->add_option("--scale", scale, "S, M or L")->check(CLI::IsMember({"S", "M", "L"}));
    gen->add_option("--seed", seed, "random seed");
    gen->add_option("--out", out_dir, "output directory")->required();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (inject->parsed()) {
            reject_connections(connection);
            auto r = rel::parse_ddl(io::read_file(input));
            const auto f = output.empty() ? ModelFormat::Json : format_for(output);
            emit(output, print_model(r, f), out);
        } else if (emit_ddl->parsed()) {
            emit(output, print_model(load_model(input), ModelFormat::Ddl), out);
        } else if (emit_athena->parsed()) {
            emit(output, print_model(load_model(input), ModelFormat::Athena), out);
        } else if (transform->parsed()) {
            AnyModel m = load_model(input);
            if (kind_name(m) != from) throw UsageError(input + " holds a " + kind_name(m) + " model, not " + from);
            if (from == to) throw UsageError("--from and --to must differ");
            std::optional<TraceStore> trace;
            // rel<->doc goes through the pivot model and composes the traces.
            std::vector<std::string> path;
            if (from != "us" && to != "us") path = {"us", to};
            else path = {to};
            for (const auto& target : path) {
                Staged s = step(m, target);
                trace = trace ? compose(*trace, s.trace) : std::move(s.trace);
                m = std::move(s.model);
            }
            emit(output, print_model(m, output.empty() ? ModelFormat::Json : format_for(output)), out);
            if (!trace_out.empty()) io::write_file_atomic(trace_out, save_trace(*trace));
        } else if (evolve->parsed()) {
            AnyModel m = load_model(input);
            const auto* u = std::get_if<us::USchemaModel>(&m);
            if (!u) throw UsageError(input + " is not a U-Schema model");
            const TraceStore t = trace_in.empty() ? TraceStore{} : load_trace(io::read_file(trace_in));
            auto r = evo::apply_changes(*u, evo::parse_orion(io::read_file(script)), t);
            emit(output, print_model(r.model, output.empty() ? ModelFormat::Json : format_for(output)), out);
            if (!trace_out.empty()) io::write_file_atomic(trace_out, save_trace(r.trace));
        } else if (migrate->parsed()) {
            reject_connections(connection);
            const fs::path src(source_dir), dst(out_dir);
            rel::RelationalSchema r = rel::parse_ddl(io::read_file(src / "schema.sql"));
            auto u = rel_to_uschema(r);
            warn_all(u.warnings, err);
            us::USchemaModel pivot = std::move(u.target);
            TraceStore t1 = std::move(u.trace);
            if (!script.empty()) {
                auto e = evo::apply_changes(pivot, evo::parse_orion(io::read_file(script)), t1);
                pivot = std::move(e.model);
                t1 = std::move(e.trace);
            }
            auto d = uschema_to_document(pivot);
            warn_all(d.warnings, err);
            ModelIndex ri(r), ui(pivot), di(d.target);
            t1.attach(ri);
            t1.attach(ui);
            d.trace.attach(ui);
            d.trace.attach(di);
            auto session = source::open_source(src, r, t1);
            migrate::MigrationConfig cfg;
            cfg.batch_size = batch;
            auto rep = migrate::migrate_to_directory(d.target, d.trace, *session, dst, cfg,
                                                     {"t1.trace.json", "t2.trace.json"});
            io::write_file_atomic(dst / "t1.trace.json", save_trace(t1));
            io::write_file_atomic(dst / "t2.trace.json", save_trace(d.trace));
            io::write_file_atomic(dst / "target.docschema.json", doc::print_docschema(d.target));
            for (const auto& e : rep.per_entity)
                out << e.collection << ": " << e.docs_written << " documents from " << e.rows_read << " rows\n";
            out << "total: " << rep.total_docs << " documents, " << rep.total_rows << " rows, "
                << static_cast<long long>(rep.throughput) << " rows/s\n";
        } else if (roundtrip->parsed()) {
            AnyModel m = load_model(input);
            const auto* r = std::get_if<rel::RelationalSchema>(&m);
            if (!r) throw UsageError(input + " is not a relational schema");
            auto rt = validation::run_roundtrip(*r);
            emit(output,
                 report == "json" ? validation::report_json(rt.report, r->name)
                                  : validation::report_markdown(rt.report, r->name),
                 out);
        } else if (diff->parsed()) {
            auto diffs = validation::diff_models(load_model(input), load_model(input2));
            if (diff_format == "json") {
                out << validation::diff_json(diffs);
            } else {
                for (const auto& d : diffs) {
                    out << validation::to_string(d.kind) << " " << d.path;
                    if (!d.before.empty() || !d.after.empty()) out << ": " << d.before << " -> " << d.after;
                    out << "\n";
                }
                if (diffs.empty()) out << "no differences\n";
            }
        } else if (gen->parsed()) {
            auto m = gen::generate_dataset({gen::parse_scale(scale), seed}, out_dir);
            for (const auto& [t, n] : m.tables) out << t << ": " << n << " rows\n";
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return dispatch(args, out, err);
}

}  // namespace umig::cli
