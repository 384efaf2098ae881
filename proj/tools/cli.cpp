// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#include "cli.hpp"

#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "kgate/audit.hpp"
#include "kgate/eval.hpp"
#include "kgate/gateway.hpp"
#include "kgate/synth.hpp"

namespace kgate::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

/// Raised for bad flags or inputs; maps to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Format { Json, Table };

PropertyGraph load_graph(const fs::path& path) {
    if (!fs::exists(path)) throw UsageError("graph not found: " + path.string());
    return fs::is_directory(path) ? synth::import_csv(path) : synth::load_jsonl(path);
}

std::string fixed(double d) {
    std::ostringstream os;
    os << std::setprecision(6) << std::fixed << d;
    return os.str();
}

void print_metrics_table(std::ostream& out, const eval::MetricsReport& m) {
    const std::string t(eval::to_string(m.task));
    out << t << ".accuracy     " << fixed(m.accuracy) << "\n";
    if (m.precision) out << t << ".precision    " << fixed(*m.precision) << "\n";
    if (m.recall) out << t << ".recall       " << fixed(*m.recall) << "\n";
    if (m.f1) out << t << ".f1           " << fixed(*m.f1) << "\n";
    if (m.macro_recall) out << t << ".macro_recall " << fixed(*m.macro_recall) << "\n";
    out << t << ".n_scored     " << m.n_scored << "\n";
    out << t << ".n_missing    " << m.n_missing << "\n";
}

void print_report(std::ostream& out, const gateway::EgressReport& r, Format format) {
    if (format == Format::Json) {
        out << gateway::to_json(r).dump(2) << "\n";
        return;
    }
    out << "app       " << r.app_name << " " << r.version << "\n";
    out << "state     " << to_string(r.state) << "\n";
    out << "queries   " << r.counts.queries_issued << "\n";
    out << "rows      " << r.counts.rows_returned_total << "\n";
    if (r.task_a) print_metrics_table(out, *r.task_a);
    if (r.task_b) print_metrics_table(out, *r.task_b);
    if (r.score_total) out << "score_total  " << fixed(*r.score_total) << "\n";
}

/// Summary counts for generated or ingested graphs.
struct GraphSummary {
    std::size_t subjects = 0, samples = 0, diseased = 0, control = 0;
};

GraphSummary summarize(const PropertyGraph& g) {
    GraphSummary s;
    s.subjects = g.nodes_by_label(NodeLabel::Subject).size();
    for (auto bs : g.nodes_by_label(NodeLabel::BiologicalSample)) {
        ++s.samples;
        bool control = false, diseased = false;
        for (const auto& row : g.neighbors(bs, EdgeType::HasDisease, Direction::Out)) {
            const auto& props = g.node(row.node).properties;
            auto it = props.find("name");
            const bool is_control = it != props.end() && std::get<std::string>(it->second) == kControlDiseaseName;
            (is_control ? control : diseased) = true;
        }
        if (control) ++s.control;
        if (diseased) ++s.diseased;
    }
    return s;
}

void write_graph(const PropertyGraph& g, const fs::path& out, const std::string& format) {
    if (format == "csv") {
        synth::export_csv(g, out);
    } else {
        synth::export_jsonl(g, out);
    }
}

void print_summary(std::ostream& out, const PropertyGraph& g, Format format) {
    const auto s = summarize(g);
    if (format == Format::Json) {
        out << json{{"subjects", s.subjects}, {"samples", s.samples}, {"diseased", s.diseased},
                    {"control", s.control}, {"nodes", g.node_count()}, {"edges", g.edge_count()}}
                   .dump()
            << "\n";
        return;
    }
    out << "subjects=" << s.subjects << " samples=" << s.samples << " diseased=" << s.diseased
        << " control=" << s.control << "\n";
    out << "nodes=" << g.node_count() << " edges=" << g.edge_count() << "\n";
}

/// Session limit flags shared by run and serve.
struct LimitFlags {
    std::optional<std::uint64_t> max_steps, max_rows, query_ms, max_queries, session_ms;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--max-steps", max_steps, "Traversal steps per query");
        cmd->add_option("--max-rows", max_rows, "Result rows per query");
        cmd->add_option("--query-timeout-ms", query_ms, "Wall clock per query");
        cmd->add_option("--max-queries", max_queries, "Queries per session");
        cmd->add_option("--session-timeout-ms", session_ms, "Wall clock per session");
    }

    /// Flags win over the config file, which wins over built-in defaults.
    proto::SessionLimits resolve(const json& config) const {
        proto::SessionLimits l;
        const json limits = config.value("limits", json::object());
        auto pick = [&](const std::optional<std::uint64_t>& flag, const char* key, std::uint64_t& target) {
            if (flag) {
                target = *flag;
            } else if (limits.contains(key)) {
                target = limits.at(key).get<std::uint64_t>();
            }
            if (target == 0) throw UsageError(std::string("limit ") + key + " must be positive");
        };
        pick(max_steps, "max_steps", l.query_budget.max_steps);
        pick(max_rows, "max_rows", l.query_budget.max_rows);
        pick(query_ms, "wall_clock_ms", l.query_budget.wall_clock_ms);
        pick(max_queries, "max_queries", l.max_queries);
        pick(session_ms, "session_wall_clock_ms", l.session_wall_clock_ms);
        return l;
    }
};

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    try {
        auto j = json::parse(synth::read_file(path));
        if (!j.is_object()) throw UsageError("config must be a JSON object");
        return j;
    } catch (const json::exception& e) {
        throw UsageError("config " + path + ": " + e.what());
    }
}

template <typename T>
void from_config(const json& config, const char* key, T& target, bool given) {
    if (given || !config.contains(key)) return;
    try {
        target = config.at(key).get<T>();
    } catch (const json::exception&) {
        throw UsageError(std::string("config field '") + key + "' has the wrong type");
    }
}

Format parse_format(const std::string& text) {
    if (text == "json") return Format::Json;
    if (text == "table") return Format::Table;
    throw UsageError("--format must be json or table");
}

int report_exit_code(const gateway::EgressReport& r) {
    return r.state.state == WorkflowState::Failed ? kWorkflowFailure : kSuccess;
}

// ------------------------------------------------------------- subcommands

struct GenerateArgs {
    synth::GeneratorConfig config;
    std::string vocab, out, format = "jsonl";
};

int cmd_generate(const GenerateArgs& a, std::ostream& out, Format fmt) {
    std::optional<std::vector<synth::DiseaseVocabEntry>> vocab;
    if (!a.vocab.empty()) vocab = synth::parse_vocab_csv(synth::read_file(a.vocab), a.vocab);
    std::optional<std::span<const synth::DiseaseVocabEntry>> view;
    if (vocab) view = std::span<const synth::DiseaseVocabEntry>(*vocab);
    auto graph = synth::generate(a.config, view);
    write_graph(graph, a.out, a.format);
    print_summary(out, graph, fmt);
    return kSuccess;
}

struct IngestArgs {
    std::string subjects, diagnoses, phenotypes, vocab, out, format = "jsonl";
};

int cmd_ingest(const IngestArgs& a, std::ostream& out, Format fmt) {
    auto bundle = synth::read_bundle(a.subjects, a.diagnoses, a.phenotypes);
    std::optional<std::vector<synth::DiseaseVocabEntry>> vocab;
    if (!a.vocab.empty()) vocab = synth::parse_vocab_csv(synth::read_file(a.vocab), a.vocab);
    std::optional<std::span<const synth::DiseaseVocabEntry>> view;
    if (vocab) view = std::span<const synth::DiseaseVocabEntry>(*vocab);
    auto graph = synth::ingest(bundle, view);
    write_graph(graph, a.out, a.format);
    print_summary(out, graph, fmt);
    return kSuccess;
}

struct RunArgs {
    std::string manifest, graph, audit, pending, config;
    bool hold = false;
    LimitFlags limits;
};

int cmd_run(RunArgs a, const CLI::App& cmd, std::ostream& out, std::ostream& err, Format fmt) {
    const auto config = load_config(a.config);
    from_config(config, "graph", a.graph, cmd.count("--graph") > 0);
    from_config(config, "audit_log", a.audit, cmd.count("--audit") > 0);
    from_config(config, "hold_for_approval", a.hold, cmd.count("--hold-for-approval") > 0);
    if (a.graph.empty()) throw UsageError("--graph is required");

    gateway::GatewayConfig gw_config;
    gw_config.limits = a.limits.resolve(config);
    gw_config.hold_for_approval = a.hold;

    const auto manifest = gateway::load_manifest(a.manifest);
    const auto graph = load_graph(a.graph);
    std::optional<AuditLog> file_log;
    AuditLog memory_log;
    if (!a.audit.empty()) file_log.emplace(a.audit);
    AuditLog& audit = file_log ? *file_log : memory_log;

    gateway::Gateway gw(graph, gw_config, audit);
    ProcessLauncher launcher;
    gateway::WorkflowResult result;
    try {
        result = gw.run_workflow(manifest, launcher);
    } catch (const gateway::EgressViolation&) {
        err << "error: report withheld by egress policy\n";
        return kWorkflowFailure;
    } catch (const eval::EvalError& e) {
        err << "error: evaluation failed: " << e.what() << "\n";
        return kWorkflowFailure;
    }
    for (const auto& reason : result.rejection_reasons) err << "rejected: " << reason << "\n";
    if (result.pending) {
        const fs::path path = a.pending.empty() ? fs::path(result.session_id + ".pending.json") : fs::path(a.pending);
        std::ofstream file(path, std::ios::binary | std::ios::trunc);
        file << gateway::to_json(*result.pending).dump(2) << "\n";
        if (!file) throw UsageError("cannot write " + path.string());
        err << "held for approval: " << path.string() << "\n";
    }
    print_report(out, result.report, fmt);
    return report_exit_code(result.report);
}

struct ApproveArgs {
    std::string pending, graph, audit;
};

int cmd_approve(const ApproveArgs& a, std::ostream& out, std::ostream& err, Format fmt) {
    json j;
    try {
        j = json::parse(synth::read_file(a.pending));
    } catch (const json::exception& e) {
        throw UsageError(a.pending + ": " + e.what());
    }
    const auto pending = gateway::pending_from_json(j);
    const auto graph = load_graph(a.graph);
    std::optional<AuditLog> file_log;
    AuditLog memory_log;
    if (!a.audit.empty()) file_log.emplace(a.audit);
    gateway::Gateway gw(graph, {}, file_log ? *file_log : memory_log);
    try {
        print_report(out, gw.approve(pending).report, fmt);
    } catch (const gateway::EgressViolation&) {
        err << "error: report withheld by egress policy\n";
        return kWorkflowFailure;
    } catch (const eval::EvalError& e) {
        err << "error: evaluation failed: " << e.what() << "\n";
        return kWorkflowFailure;
    }
    return kSuccess;
}

struct EvaluateArgs {
    std::string graph, predictions, task;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out, Format fmt) {
    auto task = eval::parse_task(a.task);
    if (!task) throw UsageError("--task must be A or B");
    const auto graph = load_graph(a.graph);
    const auto predictions = eval::parse_predictions(synth::read_file(a.predictions), *task);
    const auto metrics = eval::evaluate(predictions, eval::ground_truth(graph, *task));
    if (fmt == Format::Json) {
        out << eval::to_json(metrics).dump(2) << "\n";
    } else {
        print_metrics_table(out, metrics);
    }
    return kSuccess;
}

struct AuditArgs {
    std::string log, session, kind;
    bool check = false;
};

int cmd_audit(const AuditArgs& a, std::ostream& out, std::ostream& err, Format fmt) {
    if (!fs::exists(a.log)) throw UsageError("audit log not found: " + a.log);
    std::optional<AuditKind> kind;
    if (!a.kind.empty()) {
        kind = parse_audit_kind(a.kind);
        if (!kind) throw UsageError("unknown --kind '" + a.kind + "'");
    }
    auto entries = read_audit_log(a.log);
    if (a.check) {
        auto replayed = replay(entries);
        if (fmt == Format::Json) {
            nlohmann::ordered_json j{{"sessions", replayed.sessions},
                                     {"transitions", replayed.transitions},
                                     {"violations", replayed.violations}};
            out << j.dump(2) << "\n";
            return replayed.ok() ? kSuccess : kWorkflowFailure;
        }
        for (const auto& v : replayed.violations) err << "violation: " << v << "\n";
        out << "sessions=" << replayed.sessions << " transitions=" << replayed.transitions
            << " violations=" << replayed.violations.size() << "\n";
        return replayed.ok() ? kSuccess : kWorkflowFailure;
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const AuditEntry& x, const AuditEntry& y) { return x.timestamp_ms < y.timestamp_ms; });
    nlohmann::ordered_json lines = nlohmann::ordered_json::array();
    for (const auto& e : entries) {
        if (!a.session.empty() && e.session_id != a.session) continue;
        if (kind && e.kind != *kind) continue;
        if (fmt == Format::Json) {
            lines.push_back(to_json(e));
        } else {
            out << e.timestamp_ms << " " << e.session_id << " " << to_string(e.kind) << " " << e.detail << "\n";
        }
    }
    if (fmt == Format::Json) out << lines.dump(2) << "\n";
    return kSuccess;
}

struct InspectArgs {
    std::string graph, report;
};

int cmd_inspect(const InspectArgs& a, std::ostream& out, Format fmt) {
    if (a.graph.empty() == a.report.empty()) throw UsageError("give exactly one of --graph or --report");
    if (!a.report.empty()) {
        json j;
        try {
            j = json::parse(synth::read_file(a.report));
        } catch (const json::exception& e) {
            throw UsageError(a.report + ": " + e.what());
        }
        print_report(out, gateway::parse_egress_report(j), fmt);
        return kSuccess;
    }
    const auto graph = load_graph(a.graph);
    const auto stats = graph.stats();
    if (fmt == Format::Json) {
        json nodes = json::object(), edges = json::object();
        for (auto l : kAllLabels) nodes[std::string(to_string(l))] = stats.nodes(l);
        for (auto t : kAllEdgeTypes) edges[std::string(to_string(t))] = stats.edges(t);
        out << json{{"nodes", nodes}, {"edges", edges}}.dump(2) << "\n";
        return kSuccess;
    }
    for (auto l : kAllLabels) out << std::left << std::setw(22) << to_string(l) << stats.nodes(l) << "\n";
    for (auto t : kAllEdgeTypes) out << std::left << std::setw(22) << to_string(t) << stats.edges(t) << "\n";
    print_summary(out, graph, Format::Table);
    return kSuccess;
}

struct ServeArgs {
    std::string graph, listen, audit, report, manifest, tasks = "A,B", config;
    bool stdio = false, concurrent = false;
    std::size_t max_sessions = 0;
    LimitFlags limits;
};

gateway::Manifest serve_manifest(const ServeArgs& a) {
    if (!a.manifest.empty()) return gateway::load_manifest(a.manifest);
    gateway::Manifest m{"remote-app", "0", {}, "connected", std::nullopt};
    std::stringstream ss(a.tasks);
    for (std::string t; std::getline(ss, t, ',');) m.tasks.push_back(t);
    return m;
}

int cmd_serve(ServeArgs a, const CLI::App& cmd, std::ostream& out, std::ostream& err) {
    const auto config = load_config(a.config);
    from_config(config, "graph", a.graph, cmd.count("--graph") > 0);
    from_config(config, "listen", a.listen, cmd.count("--listen") > 0);
    from_config(config, "stdio", a.stdio, cmd.count("--stdio") > 0);
    from_config(config, "audit_log", a.audit, cmd.count("--audit") > 0);
    if (a.graph.empty()) throw UsageError("--graph is required");
    if (a.stdio == !a.listen.empty()) throw UsageError("give exactly one of --listen or --stdio");
    if (a.stdio && a.report.empty()) throw UsageError("--stdio needs --report, since stdout carries the protocol");

    gateway::GatewayConfig gw_config;
    gw_config.limits = a.limits.resolve(config);
    gw_config.allow_concurrent_sessions = a.concurrent;
    const auto manifest = serve_manifest(a);
    const auto graph = load_graph(a.graph);
    std::optional<AuditLog> file_log;
    AuditLog memory_log;
    if (!a.audit.empty()) file_log.emplace(a.audit);
    gateway::Gateway gw(graph, gw_config, file_log ? *file_log : memory_log);

    std::ofstream report_file;
    if (!a.report.empty()) {
        report_file.open(a.report, std::ios::app | std::ios::binary);
        if (!report_file) throw UsageError("cannot open " + a.report);
    }
    std::ostream& reports = a.report.empty() ? out : report_file;
    std::mutex reports_mutex;

    auto serve_one = [&](FdChannel channel) {
        ConnectedLauncher launcher(std::move(channel));
        try {
            auto result = gw.run_workflow(manifest, launcher);
            std::lock_guard lock(reports_mutex);
            reports << gateway::serialize(result.report) << "\n" << std::flush;
            return report_exit_code(result.report);
        } catch (const std::exception& e) {
            std::lock_guard lock(reports_mutex);
            err << "session failed: " << e.what() << "\n";
            return static_cast<int>(kWorkflowFailure);
        }
    };

    if (a.stdio) return serve_one(FdChannel::borrow(STDIN_FILENO, STDOUT_FILENO));

    int listener = ::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (listener < 0) throw UsageError(std::string("socket: ") + std::strerror(errno));
    UniqueFd listener_fd(listener);
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    if (a.listen.size() >= sizeof(addr.sun_path)) throw UsageError("--listen path too long");
    std::strncpy(addr.sun_path, a.listen.c_str(), sizeof(addr.sun_path) - 1);
    ::unlink(a.listen.c_str());
    if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 || ::listen(listener, 16) < 0) {
        throw UsageError("cannot listen on " + a.listen + ": " + std::strerror(errno));
    }
    err << "listening on " << a.listen << "\n";

    std::vector<std::thread> workers;
    int last = kSuccess;
    for (std::size_t served = 0; a.max_sessions == 0 || served < a.max_sessions; ++served) {
        int fd = ::accept4(listener, nullptr, nullptr, SOCK_CLOEXEC);
        if (fd < 0) {
            if (errno == EINTR) continue;
            err << "accept: " << std::strerror(errno) << "\n";
            break;
        }
        FdChannel channel{UniqueFd(fd)};
        if (a.concurrent) {
            workers.emplace_back([&serve_one, ch = std::move(channel)]() mutable { serve_one(std::move(ch)); });
        } else {
            last = serve_one(std::move(channel));
        }
    }
    for (auto& w : workers) w.join();
    ::unlink(a.listen.c_str());
    return last;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"kgate: private knowledge graph gateway", "kgate"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string format_text = "table";
    app.add_option("--format", format_text, "Output format: json or table")->capture_default_str();

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Generate a seeded synthetic graph");
    generate->add_option("--seed", gen.config.seed)->capture_default_str();
    generate->add_option("--subjects", gen.config.n_subjects)->capture_default_str();
    generate->add_option("--controls", gen.config.n_control_samples, "Control samples")->capture_default_str();
    generate->add_option("--vocab", gen.vocab, "Disease vocabulary CSV (name,icd10,icd9)");
    generate->add_option("--vocab-size", gen.config.disease_vocab_size, "Disease nodes, control included")
        ->capture_default_str();
    generate->add_option("--genes", gen.config.n_genes)->capture_default_str();
    generate->add_option("--proteins", gen.config.n_proteins)->capture_default_str();
    generate->add_option("--phenotypes", gen.config.n_phenotypes)->capture_default_str();
    generate->add_option("--out", gen.out, "JSONL file, or directory for csv")->required();
    generate->add_option("--graph-format", gen.format, "jsonl or csv")
        ->check(CLI::IsMember({"jsonl", "csv"}))
        ->capture_default_str();

    IngestArgs ing;
    auto* ingest = app.add_subcommand("ingest", "Build a graph from subject, diagnosis and phenotype tables");
    ingest->add_option("--subjects", ing.subjects)->required();
    ingest->add_option("--diagnoses", ing.diagnoses)->required();
    ingest->add_option("--phenotypes", ing.phenotypes)->required();
    ingest->add_option("--vocab", ing.vocab);
    ingest->add_option("--out", ing.out)->required();
    ingest->add_option("--graph-format", ing.format)->check(CLI::IsMember({"jsonl", "csv"}))->capture_default_str();

    ServeArgs srv;
    auto* serve = app.add_subcommand("serve", "Serve protocol sessions over a unix socket or stdio");
    serve->add_option("--graph", srv.graph);
    serve->add_option("--listen", srv.listen, "Unix socket path");
    serve->add_flag("--stdio", srv.stdio, "Serve one session on stdin/stdout");
    serve->add_option("--audit", srv.audit, "Audit log (JSONL, appended)");
    serve->add_option("--report", srv.report, "Append reports here instead of stdout");
    serve->add_option("--manifest", srv.manifest, "Manifest for connected apps");
    serve->add_option("--tasks", srv.tasks, "Tasks when no manifest is given")->capture_default_str();
    serve->add_option("--max-sessions", srv.max_sessions, "Stop after this many sessions (0 = no limit)");
    serve->add_flag("--concurrent", srv.concurrent, "Allow concurrent read-only sessions");
    serve->add_option("--config", srv.config, "JSON config file");
    srv.limits.add_to(serve);

    RunArgs rn;
    auto* run_cmd = app.add_subcommand("run", "Validate, run, evaluate and release one app");
    run_cmd->add_option("--manifest", rn.manifest)->required();
    run_cmd->add_option("--graph", rn.graph);
    run_cmd->add_option("--audit", rn.audit, "Audit log (JSONL, appended)");
    run_cmd->add_flag("--hold-for-approval", rn.hold, "Park at AwaitingEvaluation until `approve`");
    run_cmd->add_option("--pending", rn.pending, "Where to write the held run");
    run_cmd->add_option("--config", rn.config, "JSON config file");
    rn.limits.add_to(run_cmd);

    ApproveArgs apr;
    auto* approve = app.add_subcommand("approve", "Evaluate and release a held run");
    approve->add_option("--pending", apr.pending)->required();
    approve->add_option("--graph", apr.graph)->required();
    approve->add_option("--audit", apr.audit);

    EvaluateArgs evl;
    auto* evaluate = app.add_subcommand("evaluate", "Score a predictions file against a graph");
    evaluate->add_option("--graph", evl.graph)->required();
    evaluate->add_option("--predictions", evl.predictions)->required();
    evaluate->add_option("--task", evl.task)->required();

    AuditArgs aud;
    auto* audit = app.add_subcommand("audit", "Filter and check an audit log");
    audit->add_option("--log", aud.log)->required();
    audit->add_option("--session", aud.session);
    audit->add_option("--kind", aud.kind, "transition, query, query_error, submission or egress");
    audit->add_flag("--check", aud.check, "Replay transitions and report illegal ones");

    InspectArgs ins;
    auto* inspect = app.add_subcommand("inspect", "Show graph statistics or validate a report");
    inspect->add_option("--graph", ins.graph);
    inspect->add_option("--report", ins.report);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        const auto fmt = parse_format(format_text);
        if (generate->parsed()) return cmd_generate(gen, out, fmt);
        if (ingest->parsed()) return cmd_ingest(ing, out, fmt);
        if (serve->parsed()) return cmd_serve(srv, *serve, out, err);
        if (run_cmd->parsed()) return cmd_run(rn, *run_cmd, out, err, fmt);
        if (approve->parsed()) return cmd_approve(apr, out, err, fmt);
        if (evaluate->parsed()) return cmd_evaluate(evl, out, fmt);
        if (audit->parsed()) return cmd_audit(aud, out, err, fmt);
        if (inspect->parsed()) return cmd_inspect(ins, out, fmt);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const synth::SynthError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const gateway::ManifestError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const gateway::EgressViolation& e) {
        err << "error: " << e.what() << "\n";
        return kWorkflowFailure;
    } catch (const eval::EvalError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const GraphError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    }
    return kUsageError;
}

}  // namespace kgate::cli
