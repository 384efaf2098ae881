// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kgate/audit.hpp"
#include "kgate/channel.hpp"
#include "kgate/eval.hpp"
#include "kgate/graph.hpp"
#include "kgate/launcher.hpp"
#include "kgate/proto.hpp"

namespace kgate::gateway {

// ---------------------------------------------------------------- manifest

/// Fields left unset keep the gateway default.
struct LimitsOverride {
    std::optional<std::uint64_t> max_steps;
    std::optional<std::uint64_t> max_rows;
    std::optional<std::uint64_t> wall_clock_ms;
    std::optional<std::uint64_t> max_queries;
    std::optional<std::uint64_t> session_wall_clock_ms;
    friend bool operator==(const LimitsOverride&, const LimitsOverride&) = default;
};

struct Manifest {
    std::string app_name;
    std::string version;
    std::vector<std::string> tasks;  // "A" and/or "B"
    std::string entrypoint;
    std::optional<LimitsOverride> limits_override;
    friend bool operator==(const Manifest&, const Manifest&) = default;
};

class ManifestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Structural parse. The object must hold exactly app_name, version, tasks,
/// entrypoint and optionally limits_override, with the right JSON types.
Manifest parse_manifest(const nlohmann::json& j);
Manifest load_manifest(const std::filesystem::path& path);
nlohmann::json to_json(const Manifest& manifest);

// ------------------------------------------------------------------ config

struct EgressPolicy {
    bool scan_subject_ids = true;
    bool scan_node_ids = true;
    bool scan_disease_names = true;
    std::vector<std::string> extra_forbidden;
};

struct GatewayConfig {
    proto::SessionLimits limits;
    bool hold_for_approval = false;
    /// Lets several sessions run against one graph at the same time.
    bool allow_concurrent_sessions = false;
    EgressPolicy egress;
    /// How long an app may take to exit after FATAL before it is killed.
    std::chrono::milliseconds fatal_grace{2'000};
};

struct Validation {
    std::vector<std::string> reasons;
    std::vector<eval::Task> tasks;
    proto::SessionLimits effective;
    bool ok() const { return reasons.empty(); }
};

/// Runs every static check and reports all failures, not just the first.
Validation validate_manifest(const Manifest& manifest, const GatewayConfig& config);

// ------------------------------------------------------------------ egress

struct Counts {
    std::uint64_t queries_issued = 0;
    std::uint64_t rows_returned_total = 0;
    friend bool operator==(const Counts&, const Counts&) = default;
};

struct EgressReport {
    std::string app_name;
    std::string version;
    StateTag state;
    std::optional<eval::MetricsReport> task_a;
    std::optional<eval::MetricsReport> task_b;
    std::optional<double> score_total;
    Counts counts;
    friend bool operator==(const EgressReport&, const EgressReport&) = default;
};

/// Canonical field order; `failure_reason` only for Failed, `metrics` and
/// `score_total` only when at least one task was evaluated.
nlohmann::ordered_json to_json(const EgressReport& report);
std::string serialize(const EgressReport& report);

class EgressViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Strict whitelist parse: unknown keys, wrong types, out-of-range metrics,
/// or metrics on a Failed report all raise EgressViolation.
EgressReport parse_egress_report(const nlohmann::json& j);

/// Strings that must never leave the boundary.
class IdentifierSet {
public:
    IdentifierSet(const PropertyGraph& graph, const EgressPolicy& policy);

    /// The first forbidden identifier found in `text`, if any. Node ids are
    /// matched as "n" followed by the decimal id.
    std::optional<std::string> find_leak(std::string_view text) const;

private:
    std::vector<std::string> literals_;
    std::size_t node_count_ = 0;
    bool scan_node_ids_ = true;
};

/// Whitelist-parses the raw report, re-serializes it, and scans the bytes.
/// Throws EgressViolation and withholds the report on any hit.
EgressReport enforce_egress(const nlohmann::json& raw, const IdentifierSet& identifiers);
EgressReport enforce_egress(const nlohmann::json& raw, const PropertyGraph& graph, const EgressPolicy& policy = {});

// ----------------------------------------------------------------- session

/// Gateway side of one protocol session as a pure message handler: each
/// inbound message yields the responses to send, so transcripts depend only
/// on the graph, the limits and the received prefix (and the clock, for
/// wall-clock budgets).
class Session {
public:
    enum class Phase { AwaitHello, Active, Done, Fatal };

    Session(const PropertyGraph& graph, std::string session_id, std::vector<eval::Task> tasks,
            proto::SessionLimits limits, AuditLog& audit, Clock::time_point started = Clock::now());

    std::vector<proto::Message> on_message(const proto::Message& message);
    /// A frame that could not be decoded. Always session-fatal.
    std::vector<proto::Message> on_decode_error(const proto::ProtocolError& error);

    /// QUERY handling; also reachable directly for tests.
    proto::Message handle_query(const proto::Query& query);

    Phase phase() const { return phase_; }
    std::optional<proto::ErrorCode> fatal_code() const { return fatal_code_; }
    const std::string& id() const { return id_; }
    Clock::time_point deadline() const { return deadline_; }

    /// Accepted submissions, keyed by task, as the CSV text received.
    const std::map<eval::Task, std::string>& submissions() const { return submissions_; }
    Counts counts() const { return counts_; }
    std::uint64_t queries_executed() const { return executed_; }
    /// Upper bound on traversal steps spent: exact for answered queries,
    /// max_steps for each query stopped by a budget.
    std::uint64_t steps_used_total() const { return steps_total_; }

private:
    proto::Message fatal(proto::ErrorCode code, std::string message);
    proto::Message query_error(const proto::Query& query, std::string_view code, std::string message);
    std::vector<proto::Message> handle_submission(const proto::SubmitPredictions& submission);

    const PropertyGraph& graph_;
    std::string id_;
    std::vector<eval::Task> tasks_;
    proto::SessionLimits limits_;
    AuditLog& audit_;
    Clock::time_point deadline_;
    Phase phase_ = Phase::AwaitHello;
    std::optional<proto::ErrorCode> fatal_code_;
    std::optional<std::uint64_t> last_query_id_;
    std::map<eval::Task, std::string> submissions_;
    Counts counts_;
    std::uint64_t executed_ = 0;
    std::uint64_t steps_total_ = 0;
};

// ---------------------------------------------------------------- workflow

/// A run parked at AwaitingEvaluation by hold-for-approval. It holds the
/// raw submissions, so it stays inside the boundary.
struct PendingEvaluation {
    std::string session_id;
    std::string app_name;
    std::string version;
    std::map<eval::Task, std::string> submissions;
    Counts counts;
    friend bool operator==(const PendingEvaluation&, const PendingEvaluation&) = default;
};

nlohmann::json to_json(const PendingEvaluation& pending);
PendingEvaluation pending_from_json(const nlohmann::json& j);

struct WorkflowResult {
    std::string session_id;
    EgressReport report;
    std::vector<std::string> rejection_reasons;
    std::optional<PendingEvaluation> pending;
    std::uint64_t steps_used_total = 0;
};

class Gateway {
public:
    Gateway(const PropertyGraph& graph, GatewayConfig config, AuditLog& audit);

    /// Drives Submitted through Released or Failed, or stops at
    /// AwaitingEvaluation under hold-for-approval. Throws EgressViolation if
    /// the final report fails the scan, and eval::EvalError if the graph has
    /// no usable ground truth.
    WorkflowResult run_workflow(const Manifest& manifest, Launcher& launcher);

    /// Evaluates a held run and releases its report.
    WorkflowResult approve(const PendingEvaluation& pending);

    const GatewayConfig& config() const { return config_; }
    const IdentifierSet& identifiers() const { return identifiers_; }

private:
    WorkflowResult evaluate_and_release(const PendingEvaluation& pending);
    EgressReport release(const EgressReport& report, const std::string& session_id);

    const PropertyGraph& graph_;
    GatewayConfig config_;
    AuditLog& audit_;
    IdentifierSet identifiers_;
    std::mutex running_;
};

}  // namespace kgate::gateway
