// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kgate {

enum class WorkflowState {
    Submitted,
    Validated,
    Provisioned,
    Running,
    AwaitingEvaluation,
    Evaluated,
    Released,
    Failed,
};

enum class FailureReason { Rejected, Timeout, ProtocolViolation, AppCrash, NoSubmission };

/// A state plus, for Failed, its reason. Renders as "Running" or "Failed(Timeout)".
struct StateTag {
    WorkflowState state = WorkflowState::Submitted;
    std::optional<FailureReason> reason;
    friend bool operator==(const StateTag&, const StateTag&) = default;
};

std::string_view to_string(WorkflowState state);
std::string_view to_string(FailureReason reason);
std::string to_string(const StateTag& tag);
std::optional<WorkflowState> parse_state(std::string_view text);
std::optional<FailureReason> parse_failure_reason(std::string_view text);
std::optional<StateTag> parse_state_tag(std::string_view text);

bool is_terminal(WorkflowState state);

/// Submitted -> Validated | Failed(Rejected)
/// Validated -> Provisioned -> Running
/// Running -> AwaitingEvaluation | Failed(Timeout | ProtocolViolation | AppCrash | NoSubmission)
/// AwaitingEvaluation -> Evaluated -> Released
bool is_legal_transition(const StateTag& from, const StateTag& to);

enum class AuditKind { Transition, Query, QueryError, Submission, Egress };

std::string_view to_string(AuditKind kind);
std::optional<AuditKind> parse_audit_kind(std::string_view text);

struct AuditEntry {
    std::uint64_t timestamp_ms = 0;  // steady clock
    std::string session_id;
    AuditKind kind = AuditKind::Transition;
    std::string detail;
    friend bool operator==(const AuditEntry&, const AuditEntry&) = default;
};

nlohmann::ordered_json to_json(const AuditEntry& entry);
/// Throws std::invalid_argument on a malformed entry.
AuditEntry audit_entry_from_json(const nlohmann::json& j);

/// Transition detail text, e.g. "Running->Failed(Timeout)".
std::string transition_detail(const StateTag& from, const StateTag& to);

/// Append-only, thread-safe audit log. Entries are kept in memory and, when
/// constructed with a path, appended to that file as JSONL.
class AuditLog {
public:
    AuditLog() = default;
    /// Loads existing entries so new session ids do not collide with them.
    explicit AuditLog(const std::filesystem::path& path);

    AuditLog(const AuditLog&) = delete;
    AuditLog& operator=(const AuditLog&) = delete;

    void append(const std::string& session_id, AuditKind kind, std::string detail);
    void transition(const std::string& session_id, const StateTag& from, const StateTag& to);

    /// "s<k>" with k one past the largest numeric suffix seen so far.
    std::string next_session_id();

    std::vector<AuditEntry> entries() const;
    std::vector<AuditEntry> entries_for(const std::string& session_id) const;

    static std::uint64_t now_ms();

private:
    mutable std::mutex mutex_;
    std::vector<AuditEntry> entries_;
    std::ofstream sink_;
    std::uint64_t last_session_ = 0;
};

/// Parses a JSONL log; blank lines are skipped. Throws std::invalid_argument
/// naming the offending line.
std::vector<AuditEntry> parse_audit_log(std::string_view text);
std::vector<AuditEntry> read_audit_log(const std::filesystem::path& path);

struct ReplayReport {
    std::size_t sessions = 0;
    std::size_t transitions = 0;
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Replays transition entries per session from Submitted, checking each
/// against the legal set, that its source matches the current state, that
/// nothing follows a terminal state, and that timestamps never go backwards.
ReplayReport replay(const std::vector<AuditEntry>& entries);

}  // namespace kgate
