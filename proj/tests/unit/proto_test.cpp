// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#include <gtest/gtest.h>

#include <thread>

#include "kgate/channel.hpp"
#include "kgate/proto.hpp"
#include "support/generators.hpp"

namespace kgate::proto {
namespace {

using Bytes = std::vector<std::uint8_t>;

ErrorCode protocol_error_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ProtocolError& e) {
        return e.code();
    }
    ADD_FAILURE() << "no ProtocolError thrown";
    return ErrorCode::SessionLimit;
}

Bytes frame_of(std::string_view body) {
    const auto n = static_cast<std::uint32_t>(body.size());
    Bytes out{static_cast<std::uint8_t>(n >> 24), static_cast<std::uint8_t>(n >> 16), static_cast<std::uint8_t>(n >> 8),
              static_cast<std::uint8_t>(n)};
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

std::string random_utf8(testing::Rand& r) {
    static const std::vector<std::string> parts = {"a", "Z", "0", " ", "\"", "\\", "\n", "é", "漢", "🙂", ",", "\t"};
    std::string s;
    for (std::size_t k = testing::pick(r, 8); k > 0; --k) s += testing::pick_from(r, parts);
    return s;
}

qlang::Value random_value(testing::Rand& r) {
    switch (testing::pick(r, 5)) {
        case 0: return std::monostate{};
        case 1: return std::uniform_int_distribution<std::int64_t>(INT64_MIN, INT64_MAX)(r);
        case 2: return std::uniform_real_distribution<double>(-1e9, 1e9)(r);
        case 3: return random_utf8(r);
        default: {
            TextList l;
            for (std::size_t k = testing::pick(r, 3); k > 0; --k) l.push_back(random_utf8(r));
            return l;
        }
    }
}

Message random_message(testing::Rand& r) {
    auto u64 = [&] { return std::uniform_int_distribution<std::uint64_t>(0, UINT64_MAX)(r); };
    switch (testing::pick(r, 9)) {
        case 0: return Hello{random_utf8(r), random_utf8(r)};
        case 1: {
            HelloAck a{random_utf8(r), {"A", "B"}, {}};
            a.limits.query_budget.max_steps = u64();
            a.limits.max_queries = u64();
            return a;
        }
        case 2: return Query{u64(), random_utf8(r)};
        case 3: {
            Rows rows{u64(), {}, {}, testing::coin(r)};
            const std::size_t width = testing::pick(r, 4);
            for (std::size_t c = 0; c < width; ++c) rows.columns.push_back(random_utf8(r));
            for (std::size_t k = testing::pick(r, 4); k > 0; --k) {
                qlang::Row row;
                for (std::size_t c = 0; c < width; ++c) row.push_back(random_value(r));
                rows.rows.push_back(std::move(row));
            }
            return rows;
        }
        case 4: return QueryError{u64(), "TIMEOUT", random_utf8(r)};
        case 5: return SubmitPredictions{"A", random_utf8(r)};
        case 6: return SubmitAck{"B", u64()};
        case 7: return WorkflowDone{};
        default: return Fatal{"BAD_FRAME", random_utf8(r)};
    }
}

TEST(Proto, WorkflowDoneBytes) {
    const std::string body = R"({"type":"WORKFLOW_DONE"})";
    EXPECT_EQ(encode(WorkflowDone{}), frame_of(body));
    EXPECT_EQ(body.size(), 24u);
}

TEST(Proto, RandomRoundTrip) {
    testing::Rand r(17);
    for (int i = 0; i < 2'000; ++i) {
        auto m = random_message(r);
        auto bytes = encode(m);
        auto out = decode(bytes);
        ASSERT_TRUE(std::holds_alternative<Decoded>(out));
        EXPECT_EQ(std::get<Decoded>(out).message, m) << to_json(m).dump();
        EXPECT_EQ(std::get<Decoded>(out).consumed, bytes.size());
    }
}

TEST(Proto, Oversize) {
    SubmitPredictions big{"A", std::string(kMaxBodyBytes, 'x')};
    EXPECT_EQ(protocol_error_of([&] { encode(big); }), ErrorCode::Oversize);
}

TEST(Proto, PartialHeader) {
    Bytes three{0, 0, 0};
    EXPECT_TRUE(std::holds_alternative<NeedMoreBytes>(decode(three)));
    auto full = encode(WorkflowDone{});
    full.pop_back();
    EXPECT_TRUE(std::holds_alternative<NeedMoreBytes>(decode(full)));
}

TEST(Proto, TwoFramesBackToBack) {
    auto a = encode(Query{1, "MATCH (a) RETURN a"});
    auto b = encode(WorkflowDone{});
    Bytes both = a;
    both.insert(both.end(), b.begin(), b.end());
    auto out = std::get<Decoded>(decode(both));
    EXPECT_EQ(out.message, (Message{Query{1, "MATCH (a) RETURN a"}}));
    EXPECT_EQ(Bytes(both.begin() + static_cast<std::ptrdiff_t>(out.consumed), both.end()), b);
}

TEST(Proto, LengthTwoToThe31IsBadFrame) {
    Bytes header{0x80, 0, 0, 0};
    EXPECT_EQ(protocol_error_of([&] { decode(header); }), ErrorCode::BadFrame);
}

TEST(Proto, MalformedBodies) {
    for (std::string body : {"{{}", "[]", R"({"type":"NOPE"})", R"({"type":"QUERY","id":-1,"text":"x"})",
                             R"({"type":"QUERY","id":1})", R"({"type":"HELLO","app_name":3,"protocol_version":"1"})",
                             "\"\xff\xfe\""}) {
        auto frame = frame_of(body);
        EXPECT_EQ(protocol_error_of([&] { decode(frame); }), ErrorCode::BadFrame) << body;
    }
}

TEST(Proto, SplitAtEveryBoundary) {
    testing::Rand r(4);
    std::vector<Message> messages;
    Bytes stream;
    for (int i = 0; i < 20; ++i) {
        messages.push_back(random_message(r));
        auto f = encode(messages.back());
        stream.insert(stream.end(), f.begin(), f.end());
    }
    for (int trial = 0; trial < 50; ++trial) {
        FrameDecoder dec;
        std::vector<Message> got;
        std::size_t pos = 0;
        while (pos < stream.size()) {
            std::size_t chunk = 1 + testing::pick(r, trial == 0 ? 1 : 64);
            chunk = std::min(chunk, stream.size() - pos);
            dec.feed(std::span(stream).subspan(pos, chunk));
            pos += chunk;
            while (auto m = dec.next()) got.push_back(std::move(*m));
        }
        EXPECT_EQ(got, messages);
        EXPECT_EQ(dec.buffered(), 0u);
    }
}

TEST(Proto, Severities) {
    EXPECT_EQ(severity(ErrorCode::SessionLimit), Severity::QueryFatal);
    for (auto c : {ErrorCode::BadFrame, ErrorCode::BadVersion, ErrorCode::OutOfOrder, ErrorCode::Oversize,
                   ErrorCode::DuplicateSubmission}) {
        EXPECT_EQ(severity(c), Severity::SessionFatal);
        EXPECT_EQ(parse_error_code(to_string(c)), c);
    }
    EXPECT_EQ(to_string(ErrorCode::DuplicateSubmission), "DUPLICATE_SUBMISSION");
}

// ------------------------------------------------------------- handshake

HelloAck sample_ack() {
    HelloAck ack{"s1", {"A", "B"}, {}};
    ack.limits.max_queries = 7;
    return ack;
}

TEST(Handshake, AcceptsVersionOne) {
    auto reply = respond_to_hello(Hello{"app", "1"}, sample_ack());
    ASSERT_TRUE(std::holds_alternative<HelloAck>(reply));
    EXPECT_EQ(std::get<HelloAck>(reply), sample_ack());
}

TEST(Handshake, RejectsOtherVersions) {
    auto reply = respond_to_hello(Hello{"app", "0"}, sample_ack());
    ASSERT_TRUE(std::holds_alternative<Fatal>(reply));
    EXPECT_EQ(std::get<Fatal>(reply).code, "BAD_VERSION");
}

TEST(Handshake, QueryFirstIsOutOfOrder) {
    auto reply = respond_to_hello(Query{1, "MATCH (a) RETURN a"}, sample_ack());
    ASSERT_TRUE(std::holds_alternative<Fatal>(reply));
    EXPECT_EQ(std::get<Fatal>(reply).code, "OUT_OF_ORDER");
}

TEST(Handshake, OverSocketPair) {
    auto [gw_end, app_end] = socket_pair();
    std::thread app([&, ch = std::move(app_end)]() mutable {
        MessageStream s(ch);
        auto ack = handshake_app(s, "probe");
        EXPECT_EQ(ack, sample_ack());
    });
    MessageStream s(gw_end);
    EXPECT_EQ(handshake_gateway(s, sample_ack()), (Hello{"probe", "1"}));
    app.join();
}

TEST(Handshake, AppSeesBadVersion) {
    auto [gw_end, app_end] = socket_pair();
    std::thread gw([&, ch = std::move(gw_end)]() mutable {
        MessageStream s(ch);
        EXPECT_EQ(protocol_error_of([&] { handshake_gateway(s, sample_ack()); }), ErrorCode::BadVersion);
    });
    MessageStream s(app_end);
    EXPECT_EQ(protocol_error_of([&] { handshake_app(s, "probe", "0"); }), ErrorCode::BadVersion);
    gw.join();
}

TEST(Channel, CleanEofAndTruncatedFrame) {
    {
        auto [a, b] = socket_pair();
        b.close();
        MessageStream s(a);
        EXPECT_FALSE(s.receive());
    }
    {
        auto [a, b] = socket_pair();
        auto f = encode(WorkflowDone{});
        b.write_all(std::span(f).first(6));
        b.close();
        MessageStream s(a);
        EXPECT_EQ(protocol_error_of([&] { s.receive(); }), ErrorCode::BadFrame);
    }
}

TEST(Channel, ReadDeadline) {
    auto [a, b] = socket_pair();
    MessageStream s(a);
    EXPECT_THROW(s.receive(Clock::now() + std::chrono::milliseconds(20)), ChannelTimeout);
}

TEST(Channel, MovedFromChannelOwnsNothing) {
    auto [a, b] = socket_pair();
    FdChannel moved = std::move(a);
    EXPECT_EQ(a.read_fd(), -1);  // NOLINT(bugprone-use-after-move)
    auto f = encode(WorkflowDone{});
    b.write_all(f);
    MessageStream s(moved);
    EXPECT_EQ(s.receive(), Message{WorkflowDone{}});
}

}  // namespace
}  // namespace kgate::proto
