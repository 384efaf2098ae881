// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#include "kgate/gateway.hpp"

#include <algorithm>
#include <set>

#include "kgate/synth.hpp"

namespace kgate::gateway {

namespace {

using json = nlohmann::json;

constexpr std::size_t kMaxAppNameLength = 64;

bool valid_app_name(std::string_view name) {
    if (name.empty() || name.size() > kMaxAppNameLength) return false;
    return std::all_of(name.begin(), name.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
    });
}

std::string text_member(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end()) throw ManifestError(std::string("manifest is missing '") + key + "'");
    if (!it->is_string()) throw ManifestError(std::string("manifest field '") + key + "' must be a string");
    return it->get<std::string>();
}

LimitsOverride parse_override(const json& j) {
    if (!j.is_object()) throw ManifestError("limits_override must be an object");
    LimitsOverride o;
    const std::pair<const char*, std::optional<std::uint64_t>*> fields[] = {
        {"max_steps", &o.max_steps},
        {"max_rows", &o.max_rows},
        {"wall_clock_ms", &o.wall_clock_ms},
        {"max_queries", &o.max_queries},
        {"session_wall_clock_ms", &o.session_wall_clock_ms},
    };
    for (const auto& [key, value] : j.items()) {
        auto f = std::find_if(std::begin(fields), std::end(fields), [&](const auto& p) { return key == p.first; });
        if (f == std::end(fields)) throw ManifestError("unknown limits_override field '" + key + "'");
        if (!value.is_number_integer()) throw ManifestError("limits_override." + key + " must be an integer");
        if (value.is_number_unsigned()) {
            *f->second = value.get<std::uint64_t>();
        } else {
            auto v = value.get<std::int64_t>();
            // Negative values survive parsing so validation can name them.
            *f->second = v < 0 ? 0 : static_cast<std::uint64_t>(v);
        }
    }
    return o;
}

}  // namespace

Manifest parse_manifest(const json& j) {
    if (!j.is_object()) throw ManifestError("manifest must be a JSON object");
    static const std::set<std::string> kAllowed = {"app_name", "version", "tasks", "entrypoint", "limits_override"};
    for (const auto& [key, _] : j.items()) {
        if (!kAllowed.contains(key)) throw ManifestError("unknown manifest field '" + key + "'");
    }
    Manifest m;
    m.app_name = text_member(j, "app_name");
    m.version = text_member(j, "version");
    m.entrypoint = text_member(j, "entrypoint");
    auto tasks = j.find("tasks");
    if (tasks == j.end()) throw ManifestError("manifest is missing 'tasks'");
    if (!tasks->is_array()) throw ManifestError("manifest field 'tasks' must be an array");
    for (const auto& t : *tasks) {
        if (!t.is_string()) throw ManifestError("manifest tasks must be strings");
        m.tasks.push_back(t.get<std::string>());
    }
    if (auto o = j.find("limits_override"); o != j.end()) m.limits_override = parse_override(*o);
    return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
    const auto text = synth::read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ManifestError(path.string() + ": " + e.what());
    }
    return parse_manifest(j);
}

json to_json(const Manifest& m) {
    json j{{"app_name", m.app_name}, {"version", m.version}, {"tasks", m.tasks}, {"entrypoint", m.entrypoint}};
    if (m.limits_override) {
        json o = json::object();
        const auto& l = *m.limits_override;
        if (l.max_steps) o["max_steps"] = *l.max_steps;
        if (l.max_rows) o["max_rows"] = *l.max_rows;
        if (l.wall_clock_ms) o["wall_clock_ms"] = *l.wall_clock_ms;
        if (l.max_queries) o["max_queries"] = *l.max_queries;
        if (l.session_wall_clock_ms) o["session_wall_clock_ms"] = *l.session_wall_clock_ms;
        j["limits_override"] = std::move(o);
    }
    return j;
}

Validation validate_manifest(const Manifest& m, const GatewayConfig& config) {
    Validation v;
    v.effective = config.limits;

    if (!valid_app_name(m.app_name)) v.reasons.push_back("app_name must match [a-z0-9-]{1,64}");

    if (m.tasks.empty()) v.reasons.push_back("no tasks declared");
    for (const auto& t : m.tasks) {
        auto task = eval::parse_task(t);
        if (!task || t != eval::to_string(*task)) {
            v.reasons.push_back("unknown task '" + t + "'");
        } else if (std::find(v.tasks.begin(), v.tasks.end(), *task) != v.tasks.end()) {
            v.reasons.push_back("duplicate task '" + t + "'");
        } else {
            v.tasks.push_back(*task);
        }
    }
    std::sort(v.tasks.begin(), v.tasks.end());

    if (split_command(m.entrypoint).empty()) v.reasons.push_back("entrypoint is empty");

    if (m.limits_override) {
        const auto& o = *m.limits_override;
        auto& e = v.effective;
        const std::pair<std::optional<std::uint64_t>, std::uint64_t*> fields[] = {
            {o.max_steps, &e.query_budget.max_steps},
            {o.max_rows, &e.query_budget.max_rows},
            {o.wall_clock_ms, &e.query_budget.wall_clock_ms},
            {o.max_queries, &e.max_queries},
            {o.session_wall_clock_ms, &e.session_wall_clock_ms},
        };
        bool exceeds = false, non_positive = false;
        for (const auto& [requested, current] : fields) {
            if (!requested) continue;
            if (*requested == 0) {
                non_positive = true;
            } else if (*requested > *current) {
                exceeds = true;
            } else {
                *current = *requested;
            }
        }
        if (exceeds) v.reasons.push_back("limits exceed gateway policy");
        if (non_positive) v.reasons.push_back("limits must be positive");
    }
    if (!v.ok()) v.effective = config.limits;
    return v;
}

json to_json(const PendingEvaluation& p) {
    json subs = json::object();
    for (const auto& [task, csv] : p.submissions) subs[std::string(eval::to_string(task))] = csv;
    return {{"session_id", p.session_id},
            {"app_name", p.app_name},
            {"version", p.version},
            {"submissions", std::move(subs)},
            {"counts", {{"queries_issued", p.counts.queries_issued}, {"rows_returned_total", p.counts.rows_returned_total}}}};
}

PendingEvaluation pending_from_json(const json& j) {
    try {
        PendingEvaluation p;
        p.session_id = j.at("session_id").get<std::string>();
        p.app_name = j.at("app_name").get<std::string>();
        p.version = j.at("version").get<std::string>();
        for (const auto& [key, csv] : j.at("submissions").items()) {
            auto task = eval::parse_task(key);
            if (!task) throw std::invalid_argument("unknown task '" + key + "' in pending evaluation");
            p.submissions[*task] = csv.get<std::string>();
        }
        p.counts.queries_issued = j.at("counts").at("queries_issued").get<std::uint64_t>();
        p.counts.rows_returned_total = j.at("counts").at("rows_returned_total").get<std::uint64_t>();
        return p;
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed pending evaluation: ") + e.what());
    }
}

Gateway::Gateway(const PropertyGraph& graph, GatewayConfig config, AuditLog& audit)
    : graph_(graph), config_(std::move(config)), audit_(audit), identifiers_(graph_, config_.egress) {}

EgressReport Gateway::release(const EgressReport& report, const std::string& session_id) {
    try {
        auto clean = enforce_egress(to_json(report), identifiers_);
        audit_.append(session_id, AuditKind::Egress,
                      "released state=" + to_string(clean.state) + " bytes=" + std::to_string(serialize(clean).size()));
        return clean;
    } catch (const EgressViolation& e) {
        audit_.append(session_id, AuditKind::Egress, std::string("withheld: ") + e.what());
        throw;
    }
}

WorkflowResult Gateway::run_workflow(const Manifest& manifest, Launcher& launcher) {
    WorkflowResult result;
    result.session_id = audit_.next_session_id();
    const auto& sid = result.session_id;
    result.report.app_name = manifest.app_name;
    result.report.version = manifest.version;

    StateTag current{WorkflowState::Submitted, std::nullopt};
    auto move_to = [&](WorkflowState state, std::optional<FailureReason> reason = std::nullopt) {
        StateTag next{state, reason};
        audit_.transition(sid, current, next);
        current = next;
    };
    auto fail = [&](FailureReason reason) {
        move_to(WorkflowState::Failed, reason);
        result.report.state = current;
        result.report = release(result.report, sid);
        return result;
    };

    auto validation = validate_manifest(manifest, config_);
    if (!validation.ok()) {
        result.rejection_reasons = validation.reasons;
        return fail(FailureReason::Rejected);
    }
    move_to(WorkflowState::Validated);

    std::unique_lock running(running_, std::defer_lock);
    if (!config_.allow_concurrent_sessions) running.lock();

    // The graph is immutable and shared, so provisioning is a handle grant.
    move_to(WorkflowState::Provisioned);
    move_to(WorkflowState::Running);

    Session session(graph_, sid, validation.tasks, validation.effective, audit_);
    std::unique_ptr<AppProcess> app;
    try {
        app = launcher.launch(manifest.entrypoint);
    } catch (const LaunchError&) {
        return fail(FailureReason::AppCrash);
    }

    enum class End { Done, Closed, Fatal, Timeout };
    End end = End::Closed;
    {
        MessageStream stream(app->channel());
        auto send_all = [&](const std::vector<proto::Message>& messages) {
            for (const auto& m : messages) {
                try {
                    stream.send(m);
                } catch (const ChannelError&) {
                    return;  // the app is gone; the next read reports it
                }
            }
        };
        for (;;) {
            std::optional<proto::Message> message;
            try {
                message = stream.receive(session.deadline());
            } catch (const ChannelTimeout&) {
                end = End::Timeout;
                break;
            } catch (const proto::ProtocolError& e) {
                send_all(session.on_decode_error(e));
                end = End::Fatal;
                break;
            } catch (const ChannelError&) {
                end = End::Closed;
                break;
            }
            if (!message) break;
            send_all(session.on_message(*message));
            if (session.phase() == Session::Phase::Fatal) {
                end = End::Fatal;
                break;
            }
            if (session.phase() == Session::Phase::Done) {
                end = End::Done;
                break;
            }
        }
    }

    result.report.counts = session.counts();
    result.steps_used_total = session.steps_used_total();

    app->channel().shutdown_write();
    if (end == End::Timeout) {
        app->kill();
        return fail(FailureReason::Timeout);
    }
    if (end == End::Fatal) {
        if (!app->wait_for(Clock::now() + config_.fatal_grace)) app->kill();
        return fail(FailureReason::ProtocolViolation);
    }
    auto exit_code = app->wait_for(session.deadline());
    if (!exit_code) {
        app->kill();
        return fail(FailureReason::Timeout);
    }
    if (session.submissions().empty()) {
        return fail(*exit_code != 0 ? FailureReason::AppCrash : FailureReason::NoSubmission);
    }

    move_to(WorkflowState::AwaitingEvaluation);
    PendingEvaluation pending{sid, manifest.app_name, manifest.version, session.submissions(), session.counts()};
    if (running.owns_lock()) running.unlock();

    if (config_.hold_for_approval) {
        result.report.state = current;
        result.report = release(result.report, sid);
        result.pending = std::move(pending);
        return result;
    }
    auto released = evaluate_and_release(pending);
    released.steps_used_total = result.steps_used_total;
    return released;
}

WorkflowResult Gateway::approve(const PendingEvaluation& pending) { return evaluate_and_release(pending); }

WorkflowResult Gateway::evaluate_and_release(const PendingEvaluation& pending) {
    WorkflowResult result;
    result.session_id = pending.session_id;
    auto& report = result.report;
    report.app_name = pending.app_name;
    report.version = pending.version;
    report.counts = pending.counts;

    for (const auto& [task, csv] : pending.submissions) {
        auto metrics = eval::evaluate(eval::parse_predictions(csv, task), eval::ground_truth(graph_, task));
        (task == eval::Task::A ? report.task_a : report.task_b) = metrics;
    }
    report.score_total = eval::score_total(report.task_a, report.task_b);

    StateTag current{WorkflowState::AwaitingEvaluation, std::nullopt};
    const StateTag evaluated{WorkflowState::Evaluated, std::nullopt};
    audit_.transition(pending.session_id, current, evaluated);

    report.state = {WorkflowState::Released, std::nullopt};
    // Scan before the transition so a withheld report never reaches Released.
    EgressReport clean;
    try {
        clean = enforce_egress(to_json(report), identifiers_);
    } catch (const EgressViolation& e) {
        audit_.append(pending.session_id, AuditKind::Egress, std::string("withheld: ") + e.what());
        throw;
    }
    audit_.transition(pending.session_id, evaluated, report.state);
    audit_.append(pending.session_id, AuditKind::Egress,
                  "released state=Released bytes=" + std::to_string(serialize(clean).size()));
    report = std::move(clean);
    return result;
}

}  // namespace kgate::gateway
