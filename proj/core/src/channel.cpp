// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#include "kgate/channel.hpp"

#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstring>

namespace kgate {

namespace {

[[noreturn]] void throw_errno(const char* what) {
    throw ChannelError(std::string(what) + ": " + std::strerror(errno));
}

}  // namespace

UniqueFd& UniqueFd::operator=(UniqueFd&& other) noexcept {
    if (this != &other) reset(other.release());
    return *this;
}

void UniqueFd::reset(int fd) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = fd;
}

FdChannel::FdChannel(UniqueFd socket) : owned_read_(std::move(socket)) {
    read_fd_ = write_fd_ = owned_read_.get();
}

FdChannel::FdChannel(UniqueFd read_end, UniqueFd write_end)
    : owned_read_(std::move(read_end)), owned_write_(std::move(write_end)) {
    read_fd_ = owned_read_.get();
    write_fd_ = owned_write_.get();
}

FdChannel::FdChannel(FdChannel&& other) noexcept
    : owned_read_(std::move(other.owned_read_)),
      owned_write_(std::move(other.owned_write_)),
      read_fd_(std::exchange(other.read_fd_, -1)),
      write_fd_(std::exchange(other.write_fd_, -1)) {}

FdChannel& FdChannel::operator=(FdChannel&& other) noexcept {
    if (this != &other) {
        owned_read_ = std::move(other.owned_read_);
        owned_write_ = std::move(other.owned_write_);
        read_fd_ = std::exchange(other.read_fd_, -1);
        write_fd_ = std::exchange(other.write_fd_, -1);
    }
    return *this;
}

FdChannel FdChannel::borrow(int read_fd, int write_fd) {
    FdChannel ch;
    ch.read_fd_ = read_fd;
    ch.write_fd_ = write_fd;
    return ch;
}

std::size_t FdChannel::read_some(std::span<std::uint8_t> buffer, Deadline deadline) {
    if (read_fd_ < 0) return 0;
    for (;;) {
        if (deadline) {
            auto left = std::chrono::duration_cast<std::chrono::milliseconds>(*deadline - Clock::now()).count();
            if (left < 0) left = 0;
            pollfd pfd{read_fd_, POLLIN, 0};
            int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left, 60'000)));
            if (rc < 0) {
                if (errno == EINTR) continue;
                throw_errno("poll");
            }
            if (rc == 0) {
                if (Clock::now() >= *deadline) throw ChannelTimeout();
                continue;
            }
        }
        ssize_t n = ::read(read_fd_, buffer.data(), buffer.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            if (errno == ECONNRESET) return 0;
            throw_errno("read");
        }
        return static_cast<std::size_t>(n);
    }
}

void FdChannel::write_all(std::span<const std::uint8_t> bytes) {
    if (write_fd_ < 0) throw ChannelError("write on closed channel");
    std::size_t done = 0;
    bool socket = true;
    while (done < bytes.size()) {
        ssize_t n = socket ? ::send(write_fd_, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL)
                           : ::write(write_fd_, bytes.data() + done, bytes.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            if (errno == ENOTSOCK && socket) {
                socket = false;
                continue;
            }
            throw_errno("write");
        }
        done += static_cast<std::size_t>(n);
    }
}

void FdChannel::shutdown_write() {
    if (write_fd_ < 0) return;
    if (::shutdown(write_fd_, SHUT_WR) < 0 && errno == ENOTSOCK && owned_write_) {
        owned_write_.reset();
        write_fd_ = -1;
    }
}

void FdChannel::close() {
    owned_read_.reset();
    owned_write_.reset();
    read_fd_ = write_fd_ = -1;
}

std::pair<FdChannel, FdChannel> socket_pair() {
    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, fds) < 0) throw_errno("socketpair");
    return {FdChannel(UniqueFd(fds[0])), FdChannel(UniqueFd(fds[1]))};
}

std::optional<proto::Message> MessageStream::receive(Deadline deadline) {
    std::array<std::uint8_t, 64 * 1024> buf;
    for (;;) {
        if (auto m = decoder_.next()) return m;
        std::size_t n = channel_.read_some(buf, deadline);
        if (n == 0) {
            if (decoder_.buffered() > 0) {
                throw proto::ProtocolError(proto::ErrorCode::BadFrame, "stream ended inside a frame");
            }
            return std::nullopt;
        }
        decoder_.feed(std::span(buf.data(), n));
    }
}

void MessageStream::send(const proto::Message& message) { channel_.write_all(proto::encode(message)); }

proto::HelloAck handshake_app(MessageStream& stream, const std::string& app_name,
                              const std::string& protocol_version) {
    stream.send(proto::Hello{app_name, protocol_version});
    auto reply = stream.receive();
    if (!reply) throw ChannelError("gateway closed the channel during handshake");
    if (auto* ack = std::get_if<proto::HelloAck>(&*reply)) return *ack;
    if (auto* fatal = std::get_if<proto::Fatal>(&*reply)) {
        throw proto::ProtocolError(proto::parse_error_code(fatal->code).value_or(proto::ErrorCode::BadFrame),
                                   fatal->message);
    }
    throw proto::ProtocolError(proto::ErrorCode::OutOfOrder,
                               "expected HELLO_ACK, got " + std::string(proto::type_name(*reply)));
}

proto::Message respond_to_hello(const proto::Message& first, const proto::HelloAck& ack) {
    const auto* hello = std::get_if<proto::Hello>(&first);
    if (hello == nullptr) {
        return proto::Fatal{"OUT_OF_ORDER", "expected HELLO, got " + std::string(proto::type_name(first))};
    }
    if (hello->protocol_version != proto::kProtocolVersion) {
        return proto::Fatal{"BAD_VERSION", "unsupported protocol version '" + hello->protocol_version + "'"};
    }
    return ack;
}

proto::Hello handshake_gateway(MessageStream& stream, const proto::HelloAck& ack, Deadline deadline) {
    std::optional<proto::Message> first;
    try {
        first = stream.receive(deadline);
    } catch (const proto::ProtocolError& e) {
        stream.send(proto::Fatal{std::string(proto::to_string(e.code())), e.what()});
        throw;
    }
    if (!first) throw ChannelError("app closed the channel before HELLO");
    auto reply = respond_to_hello(*first, ack);
    stream.send(reply);
    if (auto* fatal = std::get_if<proto::Fatal>(&reply)) {
        throw proto::ProtocolError(*proto::parse_error_code(fatal->code), fatal->message);
    }
    return std::get<proto::Hello>(*first);
}

}  // namespace kgate
