// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

// Acceptance checks. One line per criterion:
//   PASS [n] name (seconds) detail
// Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "cli.hpp"
#include "kgate/gateway.hpp"
#include "kgate/refapp.hpp"
#include "kgate/synth.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

namespace {

using namespace kgate;
using testing::Rand;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Failure {
    std::string what;
};

void require(bool cond, const std::string& what) {
    if (!cond) throw Failure{what};
}

template <typename T>
std::string str(const T& v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// ------------------------------------------------------------------ [1]

Outcome default_generation() {
    testing::TempDir dir("kgate-accept");
    const auto path = dir / "graph.jsonl";
    std::ostringstream out, err;
    require(cli::run({"generate", "--seed", "42", "--out", path.string()}, out, err) == 0, "generate failed: " + err.str());
    const auto g = synth::load_jsonl(path);

    const auto stats = g.stats();
    require(stats.nodes(NodeLabel::Subject) == 100, "subjects=" + str(stats.nodes(NodeLabel::Subject)));
    require(stats.nodes(NodeLabel::BiologicalSample) == 100,
            "samples=" + str(stats.nodes(NodeLabel::BiologicalSample)));
    require(stats.nodes(NodeLabel::Disease) == 10'792, "diseases=" + str(stats.nodes(NodeLabel::Disease)));

    std::size_t control = 0, diseased = 0, scored = 0;
    for (const auto& e : g.edges()) {
        if (e.type == EdgeType::HasDisease) {
            const auto& name = std::get<std::string>(g.node(e.dst).properties.at("name"));
            (name == kControlDiseaseName ? control : diseased) += 1;
        }
        if (auto it = e.properties.find("score"); it != e.properties.end()) {
            const double s = std::get<double>(it->second);
            require(s >= 1.0 && s <= 20.0, "score " + str(s) + " out of [1, 20]");
            ++scored;
        }
    }
    require(diseased == 99 && control == 1, "HAS_DISEASE non-control=" + str(diseased) + " control=" + str(control));
    require(scored > 0, "no scored edges");
    return {true, "100/100 nodes, 99+1 HAS_DISEASE, 10792 Disease, " + str(scored) + " scores in [1,20]"};
}

// ------------------------------------------------------------------ [2]

Outcome degree_means() {
    double damage = 0, protein = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        synth::GeneratorConfig c;
        c.seed = seed;
        const auto stats = synth::generate(c).stats();
        damage += stats.mean_degree(NodeLabel::BiologicalSample, EdgeType::HasDamage);
        protein += stats.mean_degree(NodeLabel::BiologicalSample, EdgeType::HasProtein);
    }
    damage /= 100;
    protein /= 100;
    const std::string detail = "HAS_DAMAGE " + str(damage) + ", HAS_PROTEIN " + str(protein);
    require(damage >= 4.5 && damage <= 5.5, detail);
    require(protein >= 47 && protein <= 53, detail);
    return {true, detail};
}

// ------------------------------------------------------------------ [3]

Outcome evaluator_vs_naive() {
    Rand r(20'261'018);
    std::size_t non_empty = 0, truncated = 0;
    for (int i = 0; i < 1'000; ++i) {
        const auto g = testing::random_graph(r, 50);
        const auto ast = testing::random_valid_query(r);
        const auto text = qlang::pretty_print(ast);
        const auto expected = testing::oracle_evaluate(g, ast);
        const auto actual = qlang::evaluate(g, ast, qlang::Budget::production());
        require(actual.rows == expected.rows, "rows differ for " + text);
        require(actual.truncated == expected.truncated, "truncated differs for " + text);
        non_empty += expected.rows.empty() ? 0 : 1;
        truncated += expected.truncated ? 1 : 0;
    }
    require(non_empty >= 100, "only " + str(non_empty) + " non-empty results");
    return {true, "1000 pairs, " + str(non_empty) + " non-empty, " + str(truncated) + " truncated"};
}

// ------------------------------------------------------------------ [4]

Outcome printer_round_trip() {
    Rand r(4);
    for (int i = 0; i < 10'000; ++i) {
        const auto ast = testing::random_ast(r);
        const auto text = qlang::pretty_print(ast);
        require(qlang::parse(text) == ast, "round trip failed for " + text);
    }
    return {true, "10000 ASTs"};
}

// ------------------------------------------------------------------ [5]

Outcome metrics_vs_counting() {
    Rand r(5);
    auto table = [&](eval::Task task, const std::map<std::string, std::string>& predictions) {
        eval::PredictionTable t{task, {}, predictions.size()};
        for (const auto& [s, l] : predictions) t.rows.push_back({s, l});
        std::shuffle(t.rows.begin(), t.rows.end(), r);
        return t;
    };
    for (int i = 0; i < 1'000; ++i) {
        const auto a = testing::random_metric_case(r, true);
        const auto b = testing::random_metric_case(r, false);
        const auto ra = eval::evaluate(table(eval::Task::A, a.predictions), {eval::Task::A, a.labels, a.excluded});
        const auto rb = eval::evaluate(table(eval::Task::B, b.predictions), {eval::Task::B, b.labels, b.excluded});

        const auto o = testing::oracle_task_a(a.labels, a.predictions);
        require(*ra.f1 == o.f1, "f1 " + str(*ra.f1) + " vs " + str(o.f1));
        require(*ra.precision == o.precision, "precision " + str(*ra.precision) + " vs " + str(o.precision));
        require(*ra.recall == o.recall, "recall " + str(*ra.recall) + " vs " + str(o.recall));
        require(ra.accuracy == o.accuracy, "accuracy " + str(ra.accuracy) + " vs " + str(o.accuracy));

        const double macro = testing::oracle_macro_recall(b.labels, b.predictions);
        require(*rb.macro_recall == macro, "macro recall " + str(*rb.macro_recall) + " vs " + str(macro));
        double correct = 0;
        for (const auto& [s, l] : b.labels) {
            auto it = b.predictions.find(s);
            correct += it != b.predictions.end() && it->second == l ? 1 : 0;
        }
        require(rb.accuracy == correct / static_cast<double>(b.labels.size()), "task B accuracy");

        for (const auto& total : {eval::score_total(ra, rb), eval::score_total(ra, std::nullopt),
                                  eval::score_total(std::nullopt, rb)}) {
            require(total >= 0.0 && total <= 2.0, "score_total " + str(total));
        }
    }

    eval::MetricsReport a, b;
    a.task = eval::Task::A;
    a.f1 = 0.62;
    b.task = eval::Task::B;
    b.macro_recall = 0.39;
    const double total = eval::score_total(a, b);
    require(total == 1.01, "0.62 + 0.39 gave " + str(total));
    require(eval::score_total(std::nullopt, std::optional<eval::MetricsReport>([] {
                eval::MetricsReport m;
                m.task = eval::Task::B;
                m.macro_recall = 0.67;
                return m;
            }())) == 0.67,
            "missing task A should contribute 0");
    return {true, "1000 pairs exact, 0.62 + 0.39 = 1.01"};
}

// ------------------------------------------------------------------ [6]

/// Task A labels straight from the edge list: a subject is positive when any
/// of its samples links to a Disease other than control.
std::map<std::string, std::string> oracle_task_a_truth(const PropertyGraph& g) {
    std::map<std::uint64_t, std::string> subject_of_sample;
    std::map<std::string, std::string> labels;
    for (const auto& e : g.edges()) {
        if (e.type == EdgeType::BelongsToSubject) {
            subject_of_sample[e.src.value] = std::get<std::string>(g.node(e.dst).properties.at("subject_id"));
        }
    }
    for (const auto& e : g.edges()) {
        if (e.type != EdgeType::HasDisease) continue;
        const auto& subject = subject_of_sample.at(e.src.value);
        const bool control = std::get<std::string>(g.node(e.dst).properties.at("name")) == kControlDiseaseName;
        auto& label = labels[subject];
        if (!control || label.empty()) label = control ? "0" : "1";
    }
    return labels;
}

std::map<std::string, std::string> oracle_parse_predictions(const std::string& csv) {
    std::map<std::string, std::string> out;
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        out[line.substr(0, comma)] = line.substr(comma + 1);
    }
    return out;
}

Outcome refapp_on_default_graph() {
    const auto& g = testing::default_graph();
    const gateway::Manifest manifest{"kgate-refapp", "1.0", {"A", "B"}, KGATE_REFAPP_PATH, std::nullopt};
    auto log = testing::file_audit_log("acceptance-refapp");

    gateway::Gateway direct(g, {}, *log);
    ProcessLauncher launcher;
    const auto released = direct.run_workflow(manifest, launcher);
    require(released.report.state == StateTag{WorkflowState::Released, std::nullopt},
            "state " + to_string(released.report.state));
    require(released.report.task_a && released.report.task_a->f1, "no Task A metrics");
    require(*released.report.task_a->f1 == 198.0 / 199.0, "f1 " + str(*released.report.task_a->f1));

    // Same app held before evaluation, so its submission can be scored by
    // the counting oracle.
    gateway::GatewayConfig hold;
    hold.hold_for_approval = true;
    gateway::Gateway held_gw(g, hold, *log);
    ProcessLauncher launcher2;
    const auto held = held_gw.run_workflow(manifest, launcher2);
    require(held.pending.has_value(), "run was not held");
    const auto o = testing::oracle_task_a(oracle_task_a_truth(g),
                                          oracle_parse_predictions(held.pending->submissions.at(eval::Task::A)));
    require(o.f1 == 198.0 / 199.0, "oracle f1 " + str(o.f1));
    const auto approved = held_gw.approve(*held.pending);
    require(approved.report == released.report, "held and direct reports differ");
    return {true, "Released, f1 = 198/199 (" + str(o.f1) + "), oracle agrees"};
}

// ------------------------------------------------------------------ [7]

Outcome egress_fuzz() {
    Rand r(7);
    auto log = testing::file_audit_log("acceptance-egress");
    std::size_t released = 0, failed = 0, withheld = 0;
    std::map<std::string, std::size_t> states;
    for (int i = 0; i < 1'000; ++i) {
        const auto g = synth::generate(testing::small_config(r(), 5 + testing::pick(r, 36)));
        refapp::BaselineOptions o;
        o.extra_queries = testing::pick(r, 6);
        o.inject_parse_error = testing::coin(r, 0.3);
        o.inject_type_error = testing::coin(r, 0.3);
        o.inject_expensive_query = testing::coin(r, 0.3);
        o.random_predictions = testing::coin(r, 0.5);
        o.seed = r();
        o.submit_a = testing::coin(r, 0.9);
        o.submit_b = testing::coin(r, 0.9);
        o.send_workflow_done = testing::coin(r, 0.9);
        o.send_malformed_frame = testing::coin(r, 0.03);
        o.submit_twice = testing::coin(r, 0.03);
        o.exit_code = testing::coin(r, 0.1) ? 3 : 0;

        gateway::GatewayConfig cfg;
        cfg.limits.query_budget.max_steps = testing::coin(r) ? 200 : 100'000;
        cfg.limits.max_queries = 2 + testing::pick(r, 10);
        cfg.fatal_grace = std::chrono::milliseconds(500);
        // A few apps crash right after the handshake or go silent until the
        // session clock runs out.
        const auto misbehave = testing::pick(r, 100);
        if (misbehave < 2) cfg.limits.session_wall_clock_ms = 100;
        gateway::Gateway gw(g, cfg, *log);
        ThreadLauncher launcher([o, misbehave](FdChannel& ch) {
            if (misbehave >= 4) return refapp::run_baseline(ch, o);
            MessageStream s(ch);
            handshake_app(s, o.app_name);
            if (misbehave >= 2) return 3;
            while (s.receive()) {
            }
            return 0;
        });
        gateway::WorkflowResult result;
        try {
            result = gw.run_workflow({"kgate-refapp", "1.0", {"A", "B"}, "in-process", std::nullopt}, launcher);
        } catch (const gateway::EgressViolation&) {
            ++withheld;
            continue;
        }
        const auto bytes = gateway::serialize(result.report);
        require(!testing::oracle_leaks(bytes, g), "run " + str(i) + " leaked: " + bytes);
        require(gateway::parse_egress_report(nlohmann::json::parse(bytes)) == result.report,
                "report does not survive the whitelist");
        ++states[to_string(result.report.state)];
        (result.report.state.state == WorkflowState::Released ? released : failed) += 1;
    }
    require(withheld == 0, str(withheld) + " clean runs were withheld");
    require(released > 0 && failed > 0, "fuzz did not reach both outcomes");

    // Canaries: each forbidden kind of string planted in the version field.
    const auto g = synth::generate(testing::small_config(99, 10));
    std::size_t caught = 0;
    for (const std::string canary : {std::string("S001"), std::string("n3"), std::string(kControlDiseaseName),
                                     std::get<std::string>(g.node(g.nodes_by_label(NodeLabel::Disease).back())
                                                               .properties.at("name"))}) {
        gateway::Gateway gw(g, {}, *log);
        ThreadLauncher launcher([](FdChannel& ch) { return refapp::run_baseline(ch); });
        try {
            gw.run_workflow({"kgate-refapp", canary, {"A", "B"}, "in-process", std::nullopt}, launcher);
        } catch (const gateway::EgressViolation&) {
            ++caught;
        }
    }
    require(caught == 4, "only " + str(caught) + " of 4 canaries raised EgressViolation");

    std::string mix;
    for (const auto& [state, n] : states) mix += " " + state + "=" + str(n);
    return {true, "0 leaks in 1000 runs (" + str(released) + " released, " + str(failed) + " failed;" + mix +
                      "), 4/4 canaries caught"};
}

// ------------------------------------------------------------------ [8]

Outcome query_timeout_then_submit() {
    const auto& g = testing::default_graph();
    auto log = testing::file_audit_log("acceptance-timeout");
    gateway::GatewayConfig cfg;
    cfg.limits.query_budget.max_steps = 1'000;
    gateway::Gateway gw(g, cfg, *log);

    std::string timeout_code, after_timeout;
    ThreadLauncher launcher([&](FdChannel& ch) {
        MessageStream s(ch);
        auto next = [&] {
            auto m = s.receive();
            if (!m) throw std::runtime_error("gateway closed the channel");
            return *m;
        };
        handshake_app(s, "timeout-probe");
        s.send(proto::Query{1, "MATCH (a)-[]->(b)<-[]-(c) RETURN a, c"});
        auto first = next();
        if (auto* e = std::get_if<proto::QueryError>(&first)) timeout_code = e->code;
        s.send(proto::Query{2, std::string(refapp::kSubjectQuery)});
        auto reply = next();
        const auto* rows = std::get_if<proto::Rows>(&reply);
        if (rows == nullptr) return 1;
        after_timeout = "rows=" + std::to_string(rows->rows.size());
        std::string csv = "subject_id,prediction\n";
        for (const auto& row : rows->rows) csv += std::get<std::string>(row.at(0)) + ",1\n";
        s.send(proto::SubmitPredictions{"A", csv});
        if (!std::holds_alternative<proto::SubmitAck>(next())) return 1;
        s.send(proto::WorkflowDone{});
        return 0;
    });
    const auto result = gw.run_workflow({"timeout-probe", "1", {"A"}, "in-process", std::nullopt}, launcher);
    require(timeout_code == "TIMEOUT", "first query answered with '" + timeout_code + "'");
    require(after_timeout == "rows=100", "follow-up query: " + after_timeout);
    require(result.report.state.state == WorkflowState::Released, "state " + to_string(result.report.state));
    require(*result.report.task_a->f1 == 198.0 / 199.0, "f1 " + str(*result.report.task_a->f1));
    return {true, "QUERY_ERROR TIMEOUT at max_steps=1000, then Released"};
}

// ------------------------------------------------------------------ [9]

Outcome replay_all_logs() {
    std::size_t files = 0, sessions = 0, transitions = 0;
    for (const auto& entry : std::filesystem::directory_iterator(testing::audit_dir())) {
        if (entry.path().extension() != ".jsonl") continue;
        ++files;
        const auto report = replay(read_audit_log(entry.path()));
        require(report.ok(), entry.path().filename().string() + ": " +
                                 (report.violations.empty() ? "" : report.violations.front()));
        sessions += report.sessions;
        transitions += report.transitions;
    }
    require(files > 0, "no audit logs found in " + testing::audit_dir().string());
    return {true, str(files) + " logs, " + str(sessions) + " sessions, " + str(transitions) + " legal transitions"};
}

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> check;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "seed-42 default graph shape", 10, default_generation},
        {2, "degree means over seeds 1-100", 120, degree_means},
        {3, "evaluator equals naive enumeration", 60, evaluator_vs_naive},
        {4, "parse(pretty_print(ast)) == ast", 30, printer_round_trip},
        {5, "metrics equal counting oracle", 30, metrics_vs_counting},
        {6, "refapp released with f1 198/199", 10, refapp_on_default_graph},
        {7, "egress fuzz and canary", 300, egress_fuzz},
        {8, "query timeout then successful submission", 30, query_timeout_then_submit},
        {9, "audit replay shows only legal transitions", 60, replay_all_logs},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.check();
        } catch (const Failure& f) {
            outcome = {false, f.what};
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (outcome.pass && secs > c.limit_s) {
            outcome = {false, "took longer than " + str(c.limit_s) + " s; " + outcome.detail};
        }
        failures += outcome.pass ? 0 : 1;
        std::printf("%s [%d] %s (%.2f s) %s\n", outcome.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    outcome.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
