// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

#include "kgate/gateway.hpp"

namespace kgate::gateway {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

[[noreturn]] void reject(const std::string& what) { throw EgressViolation("report rejected: " + what); }

void only_keys(const json& j, const std::set<std::string_view>& allowed, const std::string& where) {
    if (!j.is_object()) reject(where + " must be an object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.contains(key)) reject("field '" + where + "." + key + "' is not whitelisted");
    }
}

const json& member(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) reject("missing field '" + where + "." + key + "'");
    return *it;
}

std::string text(const json& j, const char* key, const std::string& where) {
    const auto& v = member(j, key, where);
    if (!v.is_string()) reject("field '" + where + "." + key + "' must be a string");
    return v.get<std::string>();
}

std::uint64_t count(const json& j, const char* key, const std::string& where) {
    const auto& v = member(j, key, where);
    if (!v.is_number_unsigned()) reject("field '" + where + "." + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

double bounded(const json& v, const std::string& name, double hi) {
    if (!v.is_number()) reject("field '" + name + "' must be a number");
    const double d = v.get<double>();
    if (!(d >= 0.0 && d <= hi)) reject("field '" + name + "' out of range");
    return d;
}

eval::MetricsReport parse_metrics(const json& j, eval::Task task) {
    const std::string where = "metrics." + std::string(eval::to_string(task));
    const bool is_a = task == eval::Task::A;
    if (is_a) {
        only_keys(j, {"task", "accuracy", "precision", "recall", "f1", "n_scored", "n_missing"}, where);
    } else {
        only_keys(j, {"task", "accuracy", "macro_recall", "n_scored", "n_missing"}, where);
    }
    if (text(j, "task", where) != eval::to_string(task)) reject("field '" + where + ".task' does not match its key");
    eval::MetricsReport m;
    m.task = task;
    m.accuracy = bounded(member(j, "accuracy", where), where + ".accuracy", 1.0);
    if (is_a) {
        m.precision = bounded(member(j, "precision", where), where + ".precision", 1.0);
        m.recall = bounded(member(j, "recall", where), where + ".recall", 1.0);
        m.f1 = bounded(member(j, "f1", where), where + ".f1", 1.0);
    } else {
        m.macro_recall = bounded(member(j, "macro_recall", where), where + ".macro_recall", 1.0);
    }
    m.n_scored = count(j, "n_scored", where);
    m.n_missing = count(j, "n_missing", where);
    if (m.n_missing > m.n_scored) reject("field '" + where + ".n_missing' exceeds n_scored");
    return m;
}

ojson metrics_json(const eval::MetricsReport& m) {
    ojson j;
    j["task"] = eval::to_string(m.task);
    j["accuracy"] = m.accuracy;
    if (m.task == eval::Task::A) {
        j["precision"] = m.precision.value_or(0.0);
        j["recall"] = m.recall.value_or(0.0);
        j["f1"] = m.f1.value_or(0.0);
    } else {
        j["macro_recall"] = m.macro_recall.value_or(0.0);
    }
    j["n_scored"] = m.n_scored;
    j["n_missing"] = m.n_missing;
    return j;
}

}  // namespace

ojson to_json(const EgressReport& r) {
    ojson j;
    j["app_name"] = r.app_name;
    j["version"] = r.version;
    j["state"] = to_string(r.state.state);
    if (r.state.reason) j["failure_reason"] = to_string(*r.state.reason);
    if (r.task_a || r.task_b) {
        ojson metrics = ojson::object();
        if (r.task_a) metrics["A"] = metrics_json(*r.task_a);
        if (r.task_b) metrics["B"] = metrics_json(*r.task_b);
        j["metrics"] = std::move(metrics);
    }
    if (r.score_total) j["score_total"] = *r.score_total;
    j["counts"] = {{"queries_issued", r.counts.queries_issued}, {"rows_returned_total", r.counts.rows_returned_total}};
    return j;
}

std::string serialize(const EgressReport& report) { return to_json(report).dump(); }

EgressReport parse_egress_report(const json& j) {
    only_keys(j, {"app_name", "version", "state", "failure_reason", "metrics", "score_total", "counts"}, "report");
    EgressReport r;
    r.app_name = text(j, "app_name", "report");
    r.version = text(j, "version", "report");

    auto state = parse_state(text(j, "state", "report"));
    if (!state) reject("unknown state");
    r.state.state = *state;
    if (j.contains("failure_reason")) {
        auto reason = parse_failure_reason(text(j, "failure_reason", "report"));
        if (!reason) reject("unknown failure_reason");
        r.state.reason = reason;
    }
    if ((r.state.state == WorkflowState::Failed) != r.state.reason.has_value()) {
        reject("failure_reason must be present exactly when state is Failed");
    }
    if (r.state.state != WorkflowState::Released && r.state.state != WorkflowState::Failed &&
        r.state.state != WorkflowState::AwaitingEvaluation) {
        reject("state " + std::string(to_string(r.state.state)) + " is never reported");
    }

    if (j.contains("metrics")) {
        if (r.state.state != WorkflowState::Released) reject("metrics on a report that was not released");
        const auto& metrics = j["metrics"];
        only_keys(metrics, {"A", "B"}, "metrics");
        if (metrics.empty()) reject("metrics object is empty");
        if (metrics.contains("A")) r.task_a = parse_metrics(metrics["A"], eval::Task::A);
        if (metrics.contains("B")) r.task_b = parse_metrics(metrics["B"], eval::Task::B);
    }
    if (j.contains("score_total")) {
        if (!r.task_a && !r.task_b) reject("score_total without metrics");
        r.score_total = bounded(j["score_total"], "report.score_total", 2.0);
    }
    if (r.state.state == WorkflowState::Released && !r.task_a && !r.task_b) reject("released report has no metrics");

    const auto& counts = member(j, "counts", "report");
    only_keys(counts, {"queries_issued", "rows_returned_total"}, "counts");
    r.counts.queries_issued = count(counts, "queries_issued", "counts");
    r.counts.rows_returned_total = count(counts, "rows_returned_total", "counts");
    return r;
}

IdentifierSet::IdentifierSet(const PropertyGraph& graph, const EgressPolicy& policy)
    : node_count_(graph.node_count()), scan_node_ids_(policy.scan_node_ids) {
    std::set<std::string> unique;
    if (policy.scan_subject_ids) {
        for (auto id : graph.nodes_by_label(NodeLabel::Subject)) {
            const auto& props = graph.node(id).properties;
            if (auto it = props.find("subject_id"); it != props.end()) unique.insert(std::get<std::string>(it->second));
        }
    }
    if (policy.scan_disease_names) {
        for (auto id : graph.nodes_by_label(NodeLabel::Disease)) {
            const auto& props = graph.node(id).properties;
            if (auto it = props.find("name"); it != props.end()) unique.insert(std::get<std::string>(it->second));
        }
    }
    for (const auto& s : policy.extra_forbidden) unique.insert(s);
    unique.erase(std::string{});
    literals_.assign(unique.begin(), unique.end());
}

std::optional<std::string> IdentifierSet::find_leak(std::string_view text) const {
    for (const auto& literal : literals_) {
        if (text.find(literal) != std::string_view::npos) return literal;
    }
    if (!scan_node_ids_) return std::nullopt;
    for (std::size_t pos = text.find('n'); pos != std::string_view::npos; pos = text.find('n', pos + 1)) {
        // "n" followed by a digit run leaks every id that is a prefix of it.
        std::size_t end = pos + 1;
        while (end < text.size() && std::isdigit(static_cast<unsigned char>(text[end]))) ++end;
        for (std::size_t len = 1; pos + 1 + len <= end; ++len) {
            std::uint64_t id = 0;
            auto digits = text.substr(pos + 1, len);
            auto [_, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
            if (ec != std::errc{}) break;
            if (id < node_count_) return "n" + std::string(digits);
        }
    }
    return std::nullopt;
}

EgressReport enforce_egress(const json& raw, const IdentifierSet& identifiers) {
    auto report = parse_egress_report(raw);
    if (auto leak = identifiers.find_leak(serialize(report))) {
        throw EgressViolation("report contains identifier '" + *leak + "'");
    }
    return report;
}

EgressReport enforce_egress(const json& raw, const PropertyGraph& graph, const EgressPolicy& policy) {
    return enforce_egress(raw, IdentifierSet(graph, policy));
}

}  // namespace kgate::gateway
