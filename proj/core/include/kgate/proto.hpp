// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kgate/query.hpp"

// Framed protocol between the gateway and a sandboxed model app. Each frame is
// a 4-byte big-endian body length followed by that many bytes of UTF-8 JSON;
// the body is one object whose "type" names the message.
namespace kgate::proto {

inline constexpr std::uint32_t kMaxBodyBytes = 16u * 1024u * 1024u;
inline constexpr std::size_t kHeaderBytes = 4;
inline constexpr std::string_view kProtocolVersion = "1";

struct SessionLimits {
    qlang::Budget query_budget;
    std::uint64_t max_queries = 1'000;
    std::uint64_t session_wall_clock_ms = 600'000;
    friend bool operator==(const SessionLimits&, const SessionLimits&) = default;
};

struct Hello {
    std::string app_name;
    std::string protocol_version;
    friend bool operator==(const Hello&, const Hello&) = default;
};

struct HelloAck {
    std::string session_id;
    std::vector<std::string> tasks;
    SessionLimits limits;
    friend bool operator==(const HelloAck&, const HelloAck&) = default;
};

struct Query {
    std::uint64_t id = 0;
    std::string text;
    friend bool operator==(const Query&, const Query&) = default;
};

struct Rows {
    std::uint64_t id = 0;
    std::vector<std::string> columns;
    std::vector<qlang::Row> rows;
    bool truncated = false;
    friend bool operator==(const Rows&, const Rows&) = default;
};

struct QueryError {
    std::uint64_t id = 0;
    std::string code;  // PARSE | TIMEOUT | SESSION_LIMIT | TYPE
    std::string message;
    friend bool operator==(const QueryError&, const QueryError&) = default;
};

struct SubmitPredictions {
    std::string task;
    std::string csv;
    friend bool operator==(const SubmitPredictions&, const SubmitPredictions&) = default;
};

struct SubmitAck {
    std::string task;
    std::uint64_t row_count = 0;
    friend bool operator==(const SubmitAck&, const SubmitAck&) = default;
};

struct WorkflowDone {
    friend bool operator==(const WorkflowDone&, const WorkflowDone&) = default;
};

struct Fatal {
    std::string code;
    std::string message;
    friend bool operator==(const Fatal&, const Fatal&) = default;
};

using Message =
    std::variant<Hello, HelloAck, Query, Rows, QueryError, SubmitPredictions, SubmitAck, WorkflowDone, Fatal>;

/// "HELLO", "QUERY_ERROR", ...
std::string_view type_name(const Message& message);

enum class ErrorCode { BadFrame, BadVersion, OutOfOrder, Oversize, DuplicateSubmission, SessionLimit };

enum class Severity {
    SessionFatal,  // FATAL is sent and the session ends
    QueryFatal,    // QUERY_ERROR is sent and the session continues
};

/// | code                 | severity      |
/// |----------------------|---------------|
/// | BAD_FRAME            | session-fatal |
/// | BAD_VERSION          | session-fatal |
/// | OUT_OF_ORDER         | session-fatal |
/// | OVERSIZE             | session-fatal |
/// | DUPLICATE_SUBMISSION | session-fatal |
/// | SESSION_LIMIT        | query-fatal   |
Severity severity(ErrorCode code);
std::string_view to_string(ErrorCode code);
std::optional<ErrorCode> parse_error_code(std::string_view text);

class ProtocolError : public std::runtime_error {
public:
    ProtocolError(ErrorCode code, const std::string& message);
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

nlohmann::json to_json(const Message& message);
/// Throws ProtocolError(BadFrame) on unknown types or missing/mistyped fields.
Message from_json(const nlohmann::json& body);

/// Throws ProtocolError(Oversize) when the body exceeds kMaxBodyBytes.
std::vector<std::uint8_t> encode(const Message& message);

struct NeedMoreBytes {};

struct Decoded {
    Message message;
    std::size_t consumed = 0;
};

/// Decodes the first frame in `bytes`. Throws ProtocolError(BadFrame) for a
/// declared length above kMaxBodyBytes, invalid UTF-8, or a malformed body.
std::variant<NeedMoreBytes, Decoded> decode(std::span<const std::uint8_t> bytes);

/// Incremental decoder for a byte stream split at arbitrary boundaries.
class FrameDecoder {
public:
    void feed(std::span<const std::uint8_t> bytes);
    std::optional<Message> next();
    std::size_t buffered() const { return buffer_.size() - offset_; }

private:
    std::vector<std::uint8_t> buffer_;
    std::size_t offset_ = 0;
};

}  // namespace kgate::proto
