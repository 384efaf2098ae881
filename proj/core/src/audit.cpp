// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#include "kgate/audit.hpp"

#include <charconv>
#include <chrono>
#include <map>
#include <stdexcept>

#include "kgate/synth.hpp"

namespace kgate {

namespace {

constexpr WorkflowState kStates[] = {
    WorkflowState::Submitted,          WorkflowState::Validated, WorkflowState::Provisioned,
    WorkflowState::Running,            WorkflowState::AwaitingEvaluation, WorkflowState::Evaluated,
    WorkflowState::Released,           WorkflowState::Failed,
};

constexpr FailureReason kReasons[] = {FailureReason::Rejected, FailureReason::Timeout,
                                      FailureReason::ProtocolViolation, FailureReason::AppCrash,
                                      FailureReason::NoSubmission};

constexpr AuditKind kKinds[] = {AuditKind::Transition, AuditKind::Query, AuditKind::QueryError,
                                AuditKind::Submission, AuditKind::Egress};

std::optional<std::uint64_t> session_number(std::string_view id) {
    if (id.size() < 2 || id.front() != 's') return std::nullopt;
    std::uint64_t n = 0;
    auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), n);
    if (ec != std::errc{} || ptr != id.data() + id.size()) return std::nullopt;
    return n;
}

}  // namespace

std::string_view to_string(WorkflowState state) {
    switch (state) {
        case WorkflowState::Submitted: return "Submitted";
        case WorkflowState::Validated: return "Validated";
        case WorkflowState::Provisioned: return "Provisioned";
        case WorkflowState::Running: return "Running";
        case WorkflowState::AwaitingEvaluation: return "AwaitingEvaluation";
        case WorkflowState::Evaluated: return "Evaluated";
        case WorkflowState::Released: return "Released";
        case WorkflowState::Failed: return "Failed";
    }
    return "Unknown";
}

std::string_view to_string(FailureReason reason) {
    switch (reason) {
        case FailureReason::Rejected: return "Rejected";
        case FailureReason::Timeout: return "Timeout";
        case FailureReason::ProtocolViolation: return "ProtocolViolation";
        case FailureReason::AppCrash: return "AppCrash";
        case FailureReason::NoSubmission: return "NoSubmission";
    }
    return "Unknown";
}

std::string to_string(const StateTag& tag) {
    std::string out(to_string(tag.state));
    if (tag.reason) out += "(" + std::string(to_string(*tag.reason)) + ")";
    return out;
}

std::optional<WorkflowState> parse_state(std::string_view text) {
    for (auto s : kStates) {
        if (to_string(s) == text) return s;
    }
    return std::nullopt;
}

std::optional<FailureReason> parse_failure_reason(std::string_view text) {
    for (auto r : kReasons) {
        if (to_string(r) == text) return r;
    }
    return std::nullopt;
}

std::optional<StateTag> parse_state_tag(std::string_view text) {
    auto open = text.find('(');
    if (open == std::string_view::npos) {
        auto s = parse_state(text);
        if (!s || *s == WorkflowState::Failed) return std::nullopt;
        return StateTag{*s, std::nullopt};
    }
    if (text.back() != ')' || text.substr(0, open) != "Failed") return std::nullopt;
    auto r = parse_failure_reason(text.substr(open + 1, text.size() - open - 2));
    if (!r) return std::nullopt;
    return StateTag{WorkflowState::Failed, r};
}

bool is_terminal(WorkflowState state) {
    return state == WorkflowState::Released || state == WorkflowState::Failed;
}

bool is_legal_transition(const StateTag& from, const StateTag& to) {
    using S = WorkflowState;
    using R = FailureReason;
    if ((from.state == S::Failed) != from.reason.has_value()) return false;
    if ((to.state == S::Failed) != to.reason.has_value()) return false;
    switch (from.state) {
        case S::Submitted:
            return to.state == S::Validated || (to.state == S::Failed && *to.reason == R::Rejected);
        case S::Validated: return to.state == S::Provisioned;
        case S::Provisioned: return to.state == S::Running;
        case S::Running:
            return to.state == S::AwaitingEvaluation || (to.state == S::Failed && *to.reason != R::Rejected);
        case S::AwaitingEvaluation: return to.state == S::Evaluated;
        case S::Evaluated: return to.state == S::Released;
        case S::Released:
        case S::Failed: return false;
    }
    return false;
}

std::string_view to_string(AuditKind kind) {
    switch (kind) {
        case AuditKind::Transition: return "transition";
        case AuditKind::Query: return "query";
        case AuditKind::QueryError: return "query_error";
        case AuditKind::Submission: return "submission";
        case AuditKind::Egress: return "egress";
    }
    return "unknown";
}

std::optional<AuditKind> parse_audit_kind(std::string_view text) {
    for (auto k : kKinds) {
        if (to_string(k) == text) return k;
    }
    return std::nullopt;
}

nlohmann::ordered_json to_json(const AuditEntry& e) {
    nlohmann::ordered_json j;
    j["ts"] = e.timestamp_ms;
    j["session"] = e.session_id;
    j["kind"] = to_string(e.kind);
    j["detail"] = e.detail;
    return j;
}

AuditEntry audit_entry_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("audit entry must be an object");
    try {
        AuditEntry e;
        e.timestamp_ms = j.at("ts").get<std::uint64_t>();
        e.session_id = j.at("session").get<std::string>();
        auto kind = parse_audit_kind(j.at("kind").get<std::string>());
        if (!kind) throw std::invalid_argument("unknown audit kind");
        e.kind = *kind;
        e.detail = j.at("detail").get<std::string>();
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw std::invalid_argument(std::string("malformed audit entry: ") + ex.what());
    }
}

std::string transition_detail(const StateTag& from, const StateTag& to) {
    return to_string(from) + "->" + to_string(to);
}

AuditLog::AuditLog(const std::filesystem::path& path) {
    if (std::filesystem::exists(path)) {
        entries_ = read_audit_log(path);
        for (const auto& e : entries_) {
            if (auto n = session_number(e.session_id)) last_session_ = std::max(last_session_, *n);
        }
    }
    sink_.open(path, std::ios::app | std::ios::binary);
    if (!sink_) throw std::runtime_error("cannot open audit log " + path.string());
}

void AuditLog::append(const std::string& session_id, AuditKind kind, std::string detail) {
    std::lock_guard lock(mutex_);
    AuditEntry e{now_ms(), session_id, kind, std::move(detail)};
    if (!entries_.empty() && entries_.back().timestamp_ms > e.timestamp_ms) e.timestamp_ms = entries_.back().timestamp_ms;
    if (sink_.is_open()) {
        sink_ << to_json(e).dump() << '\n';
        sink_.flush();
    }
    entries_.push_back(std::move(e));
}

void AuditLog::transition(const std::string& session_id, const StateTag& from, const StateTag& to) {
    append(session_id, AuditKind::Transition, transition_detail(from, to));
}

std::string AuditLog::next_session_id() {
    std::lock_guard lock(mutex_);
    return "s" + std::to_string(++last_session_);
}

std::vector<AuditEntry> AuditLog::entries() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

std::vector<AuditEntry> AuditLog::entries_for(const std::string& session_id) const {
    std::lock_guard lock(mutex_);
    std::vector<AuditEntry> out;
    for (const auto& e : entries_) {
        if (e.session_id == session_id) out.push_back(e);
    }
    return out;
}

std::uint64_t AuditLog::now_ms() {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now().time_since_epoch())
            .count());
}

std::vector<AuditEntry> parse_audit_log(std::string_view text) {
    std::vector<AuditEntry> out;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        try {
            out.push_back(audit_entry_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw std::invalid_argument("audit log line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::vector<AuditEntry> read_audit_log(const std::filesystem::path& path) {
    return parse_audit_log(synth::read_file(path));
}

ReplayReport replay(const std::vector<AuditEntry>& entries) {
    struct Track {
        StateTag current;
        std::uint64_t last_ts = 0;
    };
    std::map<std::string, Track> sessions;
    ReplayReport report;
    auto violation = [&](const AuditEntry& e, const std::string& what) {
        report.violations.push_back("session " + e.session_id + ": " + what);
    };

    for (const auto& e : entries) {
        auto [it, fresh] = sessions.try_emplace(e.session_id);
        auto& track = it->second;
        if (!fresh && e.timestamp_ms < track.last_ts) violation(e, "timestamp goes backwards");
        track.last_ts = std::max(track.last_ts, e.timestamp_ms);
        if (e.kind != AuditKind::Transition) continue;

        ++report.transitions;
        auto arrow = e.detail.find("->");
        std::optional<StateTag> from, to;
        if (arrow != std::string::npos) {
            from = parse_state_tag(std::string_view(e.detail).substr(0, arrow));
            to = parse_state_tag(std::string_view(e.detail).substr(arrow + 2));
        }
        if (!from || !to) {
            violation(e, "unparseable transition '" + e.detail + "'");
            continue;
        }
        if (*from != track.current) {
            violation(e, "transition '" + e.detail + "' does not start at current state " + to_string(track.current));
        } else if (!is_legal_transition(*from, *to)) {
            violation(e, "illegal transition '" + e.detail + "'");
        }
        track.current = *to;
    }
    report.sessions = sessions.size();
    return report;
}

}  // namespace kgate
