// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "kgate/proto.hpp"

namespace kgate {

using Clock = std::chrono::steady_clock;
using Deadline = std::optional<Clock::time_point>;

class ChannelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ChannelTimeout : public ChannelError {
public:
    ChannelTimeout() : ChannelError("channel deadline elapsed") {}
};

/// Owned file descriptor, closed on destruction.
class UniqueFd {
public:
    UniqueFd() = default;
    explicit UniqueFd(int fd) : fd_(fd) {}
    UniqueFd(UniqueFd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
    UniqueFd& operator=(UniqueFd&& other) noexcept;
    UniqueFd(const UniqueFd&) = delete;
    UniqueFd& operator=(const UniqueFd&) = delete;
    ~UniqueFd() { reset(); }

    int get() const { return fd_; }
    int release() { return std::exchange(fd_, -1); }
    void reset(int fd = -1);
    explicit operator bool() const { return fd_ >= 0; }

private:
    int fd_ = -1;
};

/// Blocking byte-stream channel over a socket or a pair of pipe ends.
class FdChannel {
public:
    explicit FdChannel(UniqueFd socket);
    /// Separate read and write descriptors, e.g. stdin/stdout of an app.
    FdChannel(UniqueFd read_end, UniqueFd write_end);
    /// Borrows descriptors without closing them.
    static FdChannel borrow(int read_fd, int write_fd);

    FdChannel(FdChannel&& other) noexcept;
    FdChannel& operator=(FdChannel&& other) noexcept;

    /// Returns 0 on end of stream. Throws ChannelTimeout past the deadline.
    std::size_t read_some(std::span<std::uint8_t> buffer, Deadline deadline = std::nullopt);
    void write_all(std::span<const std::uint8_t> bytes);
    void shutdown_write();
    void close();

    int read_fd() const { return read_fd_; }

private:
    FdChannel() = default;

    UniqueFd owned_read_;
    UniqueFd owned_write_;
    int read_fd_ = -1;
    int write_fd_ = -1;
};

std::pair<FdChannel, FdChannel> socket_pair();

/// Message-level view of a channel.
class MessageStream {
public:
    explicit MessageStream(FdChannel& channel) : channel_(channel) {}

    /// std::nullopt on a clean end of stream between frames. Throws
    /// ProtocolError(BadFrame) on a malformed or truncated frame.
    std::optional<proto::Message> receive(Deadline deadline = std::nullopt);
    void send(const proto::Message& message);

    FdChannel& channel() { return channel_; }

private:
    FdChannel& channel_;
    proto::FrameDecoder decoder_;
};

/// App side of the handshake: sends HELLO and returns the gateway's
/// HELLO_ACK. Throws ProtocolError carrying the FATAL code on rejection.
proto::HelloAck handshake_app(MessageStream& stream, const std::string& app_name,
                              const std::string& protocol_version = std::string(proto::kProtocolVersion));

/// Gateway response to the first frame of a session: HELLO_ACK for a
/// supported HELLO, FATAL{BAD_VERSION} or FATAL{OUT_OF_ORDER} otherwise.
proto::Message respond_to_hello(const proto::Message& first, const proto::HelloAck& ack);

/// Gateway side of the handshake. Returns the app's HELLO, or throws
/// ProtocolError after sending FATAL.
proto::Hello handshake_gateway(MessageStream& stream, const proto::HelloAck& ack, Deadline deadline = std::nullopt);

}  // namespace kgate
