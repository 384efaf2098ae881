// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#include <algorithm>

#include "kgate/gateway.hpp"
#include "kgate/query.hpp"

namespace kgate::gateway {

namespace {

std::string_view query_error_code(const qlang::QueryError& e) {
    switch (e.code()) {
        case qlang::QueryErrc::BudgetExceeded: return "TIMEOUT";
        case qlang::QueryErrc::TypeMismatch: return "TYPE";
        default: return "PARSE";
    }
}

std::vector<std::string> task_names(const std::vector<eval::Task>& tasks) {
    std::vector<std::string> out;
    for (auto t : tasks) out.emplace_back(eval::to_string(t));
    return out;
}

}  // namespace

Session::Session(const PropertyGraph& graph, std::string session_id, std::vector<eval::Task> tasks,
                 proto::SessionLimits limits, AuditLog& audit, Clock::time_point started)
    : graph_(graph),
      id_(std::move(session_id)),
      tasks_(std::move(tasks)),
      limits_(limits),
      audit_(audit),
      deadline_(started + std::chrono::milliseconds(limits.session_wall_clock_ms)) {}

proto::Message Session::fatal(proto::ErrorCode code, std::string message) {
    phase_ = Phase::Fatal;
    fatal_code_ = code;
    return proto::Fatal{std::string(proto::to_string(code)), std::move(message)};
}

proto::Message Session::query_error(const proto::Query& query, std::string_view code, std::string message) {
    audit_.append(id_, AuditKind::QueryError,
                  "id=" + std::to_string(query.id) + " code=" + std::string(code) + " text=" + query.text);
    return proto::QueryError{query.id, std::string(code), std::move(message)};
}

std::vector<proto::Message> Session::on_decode_error(const proto::ProtocolError& error) {
    if (phase_ == Phase::Fatal) return {};
    return {fatal(error.code(), error.what())};
}

std::vector<proto::Message> Session::on_message(const proto::Message& message) {
    switch (phase_) {
        case Phase::Fatal: return {};
        case Phase::AwaitHello: {
            auto reply = respond_to_hello(message, proto::HelloAck{id_, task_names(tasks_), limits_});
            if (const auto* f = std::get_if<proto::Fatal>(&reply)) {
                return {fatal(*proto::parse_error_code(f->code), f->message)};
            }
            phase_ = Phase::Active;
            return {reply};
        }
        case Phase::Done:
            return {fatal(proto::ErrorCode::OutOfOrder, "message after WORKFLOW_DONE")};
        case Phase::Active: break;
    }

    if (const auto* q = std::get_if<proto::Query>(&message)) {
        auto reply = handle_query(*q);
        return {std::move(reply)};
    }
    if (const auto* s = std::get_if<proto::SubmitPredictions>(&message)) return handle_submission(*s);
    if (std::holds_alternative<proto::WorkflowDone>(message)) {
        phase_ = Phase::Done;
        return {};
    }
    return {fatal(proto::ErrorCode::OutOfOrder,
                  "unexpected " + std::string(proto::type_name(message)) + " from app")};
}

proto::Message Session::handle_query(const proto::Query& query) {
    ++counts_.queries_issued;
    if (last_query_id_ && query.id <= *last_query_id_) {
        audit_.append(id_, AuditKind::QueryError,
                      "id=" + std::to_string(query.id) + " code=OUT_OF_ORDER text=" + query.text);
        return fatal(proto::ErrorCode::OutOfOrder, "query ids must strictly increase");
    }
    last_query_id_ = query.id;

    if (executed_ >= limits_.max_queries) {
        return query_error(query, "SESSION_LIMIT",
                           "session allows " + std::to_string(limits_.max_queries) + " queries");
    }
    ++executed_;

    auto budget = limits_.query_budget;
    const auto remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline_ - Clock::now()).count();
    budget.wall_clock_ms = std::min<std::uint64_t>(budget.wall_clock_ms, remaining > 0 ? remaining : 0);

    try {
        auto table = qlang::evaluate(graph_, qlang::parse(query.text), budget);
        steps_total_ += table.steps_used;
        proto::Message rows = proto::Rows{query.id, table.columns, std::move(table.rows), table.truncated};
        std::size_t n_rows = std::get<proto::Rows>(rows).rows.size();
        try {
            (void)proto::encode(rows);
        } catch (const proto::ProtocolError&) {
            return query_error(query, "TIMEOUT", "result exceeds the frame size limit");
        }
        counts_.rows_returned_total += n_rows;
        audit_.append(id_, AuditKind::Query,
                      "id=" + std::to_string(query.id) + " rows=" + std::to_string(n_rows) +
                          " steps=" + std::to_string(table.steps_used) +
                          " truncated=" + (std::get<proto::Rows>(rows).truncated ? "true" : "false") +
                          " text=" + query.text);
        return rows;
    } catch (const qlang::QueryError& e) {
        if (e.code() == qlang::QueryErrc::BudgetExceeded) steps_total_ += budget.max_steps;
        return query_error(query, query_error_code(e), e.what());
    }
}

std::vector<proto::Message> Session::handle_submission(const proto::SubmitPredictions& submission) {
    auto task = eval::parse_task(submission.task);
    if (!task || submission.task != eval::to_string(*task) ||
        std::find(tasks_.begin(), tasks_.end(), *task) == tasks_.end()) {
        return {fatal(proto::ErrorCode::BadFrame, "task '" + submission.task + "' is not declared for this session")};
    }
    if (submissions_.contains(*task)) {
        return {fatal(proto::ErrorCode::DuplicateSubmission, "task " + submission.task + " already submitted")};
    }
    std::size_t rows = 0;
    try {
        rows = eval::parse_predictions(submission.csv, *task).rows.size();
    } catch (const eval::EvalError& e) {
        return {fatal(proto::ErrorCode::BadFrame, std::string("invalid predictions: ") + e.what())};
    }
    submissions_.emplace(*task, submission.csv);
    audit_.append(id_, AuditKind::Submission, "task=" + submission.task + " rows=" + std::to_string(rows));
    return {proto::SubmitAck{submission.task, rows}};
}

}  // namespace kgate::gateway
