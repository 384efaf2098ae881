// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#include "kgate/proto.hpp"

#include <algorithm>

namespace kgate::proto {

namespace {

using json = nlohmann::json;

struct TypeNameVisitor {
    std::string_view operator()(const Hello&) const { return "HELLO"; }
    std::string_view operator()(const HelloAck&) const { return "HELLO_ACK"; }
    std::string_view operator()(const Query&) const { return "QUERY"; }
    std::string_view operator()(const Rows&) const { return "ROWS"; }
    std::string_view operator()(const QueryError&) const { return "QUERY_ERROR"; }
    std::string_view operator()(const SubmitPredictions&) const { return "SUBMIT_PREDICTIONS"; }
    std::string_view operator()(const SubmitAck&) const { return "SUBMIT_ACK"; }
    std::string_view operator()(const WorkflowDone&) const { return "WORKFLOW_DONE"; }
    std::string_view operator()(const Fatal&) const { return "FATAL"; }
};

[[noreturn]] void bad_frame(const std::string& what) { throw ProtocolError(ErrorCode::BadFrame, what); }

const json& field(const json& body, const char* name) {
    auto it = body.find(name);
    if (it == body.end()) bad_frame(std::string("missing field '") + name + "'");
    return *it;
}

std::string text_field(const json& body, const char* name) {
    const auto& v = field(body, name);
    if (!v.is_string()) bad_frame(std::string("field '") + name + "' must be a string");
    return v.get<std::string>();
}

std::uint64_t uint_field(const json& body, const char* name) {
    const auto& v = field(body, name);
    if (!v.is_number_unsigned()) bad_frame(std::string("field '") + name + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

bool bool_field(const json& body, const char* name) {
    const auto& v = field(body, name);
    if (!v.is_boolean()) bad_frame(std::string("field '") + name + "' must be a boolean");
    return v.get<bool>();
}

std::vector<std::string> text_list_field(const json& body, const char* name) {
    const auto& v = field(body, name);
    if (!v.is_array()) bad_frame(std::string("field '") + name + "' must be an array");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) bad_frame(std::string("field '") + name + "' must hold strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

json limits_to_json(const SessionLimits& l) {
    return {{"max_steps", l.query_budget.max_steps},
            {"max_rows", l.query_budget.max_rows},
            {"wall_clock_ms", l.query_budget.wall_clock_ms},
            {"max_queries", l.max_queries},
            {"session_wall_clock_ms", l.session_wall_clock_ms}};
}

SessionLimits limits_from_json(const json& j) {
    if (!j.is_object()) bad_frame("limits must be an object");
    SessionLimits l;
    l.query_budget.max_steps = uint_field(j, "max_steps");
    l.query_budget.max_rows = uint_field(j, "max_rows");
    l.query_budget.wall_clock_ms = uint_field(j, "wall_clock_ms");
    l.max_queries = uint_field(j, "max_queries");
    l.session_wall_clock_ms = uint_field(j, "session_wall_clock_ms");
    return l;
}

json value_to_json(const qlang::Value& v) {
    struct Visitor {
        json operator()(std::monostate) const { return nullptr; }
        json operator()(std::int64_t i) const { return i; }
        json operator()(double d) const { return d; }
        json operator()(const std::string& s) const { return s; }
        json operator()(const TextList& l) const { return l; }
    };
    return std::visit(Visitor{}, v);
}

qlang::Value value_from_json(const json& j) {
    if (j.is_null()) return std::monostate{};
    if (j.is_number_integer()) {
        if (j.is_number_unsigned() && j.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
            bad_frame("row value out of range");
        }
        return j.get<std::int64_t>();
    }
    if (j.is_number_float()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    if (j.is_array()) {
        TextList list;
        for (const auto& e : j) {
            if (!e.is_string()) bad_frame("list values must hold strings");
            list.push_back(e.get<std::string>());
        }
        return list;
    }
    bad_frame("unsupported row value");
}

struct ToJson {
    json operator()(const Hello& m) const {
        return {{"type", "HELLO"}, {"app_name", m.app_name}, {"protocol_version", m.protocol_version}};
    }
    json operator()(const HelloAck& m) const {
        return {{"type", "HELLO_ACK"}, {"session_id", m.session_id}, {"tasks", m.tasks},
                {"limits", limits_to_json(m.limits)}};
    }
    json operator()(const Query& m) const { return {{"type", "QUERY"}, {"id", m.id}, {"text", m.text}}; }
    json operator()(const Rows& m) const {
        json rows = json::array();
        for (const auto& row : m.rows) {
            json r = json::array();
            for (const auto& v : row) r.push_back(value_to_json(v));
            rows.push_back(std::move(r));
        }
        return {{"type", "ROWS"}, {"id", m.id}, {"columns", m.columns}, {"rows", std::move(rows)},
                {"truncated", m.truncated}};
    }
    json operator()(const QueryError& m) const {
        return {{"type", "QUERY_ERROR"}, {"id", m.id}, {"code", m.code}, {"message", m.message}};
    }
    json operator()(const SubmitPredictions& m) const {
        return {{"type", "SUBMIT_PREDICTIONS"}, {"task", m.task}, {"csv", m.csv}};
    }
    json operator()(const SubmitAck& m) const {
        return {{"type", "SUBMIT_ACK"}, {"task", m.task}, {"row_count", m.row_count}};
    }
    json operator()(const WorkflowDone&) const { return {{"type", "WORKFLOW_DONE"}}; }
    json operator()(const Fatal& m) const {
        return {{"type", "FATAL"}, {"code", m.code}, {"message", m.message}};
    }
};

std::uint32_t read_length(std::span<const std::uint8_t> bytes) {
    return (std::uint32_t{bytes[0]} << 24) | (std::uint32_t{bytes[1]} << 16) | (std::uint32_t{bytes[2]} << 8) |
           std::uint32_t{bytes[3]};
}

}  // namespace

std::string_view type_name(const Message& message) { return std::visit(TypeNameVisitor{}, message); }

Severity severity(ErrorCode code) {
    return code == ErrorCode::SessionLimit ? Severity::QueryFatal : Severity::SessionFatal;
}

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::BadFrame: return "BAD_FRAME";
        case ErrorCode::BadVersion: return "BAD_VERSION";
        case ErrorCode::OutOfOrder: return "OUT_OF_ORDER";
        case ErrorCode::Oversize: return "OVERSIZE";
        case ErrorCode::DuplicateSubmission: return "DUPLICATE_SUBMISSION";
        case ErrorCode::SessionLimit: return "SESSION_LIMIT";
    }
    return "UNKNOWN";
}

std::optional<ErrorCode> parse_error_code(std::string_view text) {
    for (auto code : {ErrorCode::BadFrame, ErrorCode::BadVersion, ErrorCode::OutOfOrder, ErrorCode::Oversize,
                      ErrorCode::DuplicateSubmission, ErrorCode::SessionLimit}) {
        if (to_string(code) == text) return code;
    }
    return std::nullopt;
}

ProtocolError::ProtocolError(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

nlohmann::json to_json(const Message& message) { return std::visit(ToJson{}, message); }

Message from_json(const nlohmann::json& body) {
    if (!body.is_object()) bad_frame("body must be a JSON object");
    const auto type = text_field(body, "type");
    if (type == "HELLO") return Hello{text_field(body, "app_name"), text_field(body, "protocol_version")};
    if (type == "HELLO_ACK") {
        return HelloAck{text_field(body, "session_id"), text_list_field(body, "tasks"),
                        limits_from_json(field(body, "limits"))};
    }
    if (type == "QUERY") return Query{uint_field(body, "id"), text_field(body, "text")};
    if (type == "ROWS") {
        Rows m{uint_field(body, "id"), text_list_field(body, "columns"), {}, bool_field(body, "truncated")};
        const auto& rows = field(body, "rows");
        if (!rows.is_array()) bad_frame("field 'rows' must be an array");
        for (const auto& r : rows) {
            if (!r.is_array() || r.size() != m.columns.size()) bad_frame("row width does not match columns");
            qlang::Row row;
            for (const auto& v : r) row.push_back(value_from_json(v));
            m.rows.push_back(std::move(row));
        }
        return m;
    }
    if (type == "QUERY_ERROR") {
        return QueryError{uint_field(body, "id"), text_field(body, "code"), text_field(body, "message")};
    }
    if (type == "SUBMIT_PREDICTIONS") return SubmitPredictions{text_field(body, "task"), text_field(body, "csv")};
    if (type == "SUBMIT_ACK") return SubmitAck{text_field(body, "task"), uint_field(body, "row_count")};
    if (type == "WORKFLOW_DONE") return WorkflowDone{};
    if (type == "FATAL") return Fatal{text_field(body, "code"), text_field(body, "message")};
    bad_frame("unknown message type '" + type + "'");
}

std::vector<std::uint8_t> encode(const Message& message) {
    std::string body;
    try {
        body = to_json(message).dump();
    } catch (const nlohmann::json::exception& e) {
        bad_frame(std::string("cannot serialize message: ") + e.what());
    }
    if (body.size() > kMaxBodyBytes) {
        throw ProtocolError(ErrorCode::Oversize, "body of " + std::to_string(body.size()) + " bytes exceeds limit");
    }
    const auto n = static_cast<std::uint32_t>(body.size());
    std::vector<std::uint8_t> frame;
    frame.reserve(kHeaderBytes + body.size());
    frame.push_back(static_cast<std::uint8_t>(n >> 24));
    frame.push_back(static_cast<std::uint8_t>(n >> 16));
    frame.push_back(static_cast<std::uint8_t>(n >> 8));
    frame.push_back(static_cast<std::uint8_t>(n));
    frame.insert(frame.end(), body.begin(), body.end());
    return frame;
}

std::variant<NeedMoreBytes, Decoded> decode(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderBytes) return NeedMoreBytes{};
    const std::uint32_t length = read_length(bytes);
    if (length > kMaxBodyBytes) bad_frame("declared length " + std::to_string(length) + " exceeds limit");
    if (bytes.size() < kHeaderBytes + length) return NeedMoreBytes{};

    const auto* first = reinterpret_cast<const char*>(bytes.data() + kHeaderBytes);
    nlohmann::json body;
    try {
        body = nlohmann::json::parse(first, first + length);
    } catch (const nlohmann::json::exception& e) {
        bad_frame(std::string("malformed body: ") + e.what());
    }
    return Decoded{from_json(body), kHeaderBytes + length};
}

void FrameDecoder::feed(std::span<const std::uint8_t> bytes) {
    if (offset_ > 0 && offset_ == buffer_.size()) {
        buffer_.clear();
        offset_ = 0;
    }
    buffer_.insert(buffer_.end(), bytes.begin(), bytes.end());
}

std::optional<Message> FrameDecoder::next() {
    auto result = decode(std::span(buffer_).subspan(offset_));
    if (std::holds_alternative<NeedMoreBytes>(result)) return std::nullopt;
    auto& decoded = std::get<Decoded>(result);
    offset_ += decoded.consumed;
    if (offset_ == buffer_.size()) {
        buffer_.clear();
        offset_ = 0;
    } else if (offset_ > (1u << 20)) {
        buffer_.erase(buffer_.begin(), buffer_.begin() + static_cast<std::ptrdiff_t>(offset_));
        offset_ = 0;
    }
    return std::move(decoded.message);
}

}  // namespace kgate::proto
