// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kgate/channel.hpp"

namespace kgate {

/// A running app. The gateway talks to it only through channel().
class AppProcess {
public:
    virtual ~AppProcess() = default;
    virtual FdChannel& channel() = 0;
    /// Exit code once the app has finished, std::nullopt if still running at
    /// the deadline. Signals map to 128 + signal number.
    virtual std::optional<int> wait_for(Deadline deadline) = 0;
    /// Forcibly stops the app and reaps it.
    virtual void kill() = 0;
};

class LaunchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Launcher {
public:
    virtual ~Launcher() = default;
    /// Throws LaunchError when the app cannot be started at all.
    virtual std::unique_ptr<AppProcess> launch(const std::string& entrypoint) = 0;
};

/// Splits an entrypoint on ASCII whitespace.
std::vector<std::string> split_command(const std::string& entrypoint);

/// Forks and execs the entrypoint with one end of a socket pair on its stdin
/// and stdout. The environment is cleared except PATH and every other
/// inherited descriptor above stderr is closed. A failed exec exits 127.
class ProcessLauncher : public Launcher {
public:
    std::unique_ptr<AppProcess> launch(const std::string& entrypoint) override;
};

/// Runs an in-process function over a socket pair. For tests and embedding.
class ThreadLauncher : public Launcher {
public:
    using AppFn = std::function<int(FdChannel&)>;
    explicit ThreadLauncher(AppFn app) : app_(std::move(app)) {}
    std::unique_ptr<AppProcess> launch(const std::string& entrypoint) override;

private:
    AppFn app_;
};

/// Wraps a peer that is already connected, such as an accepted socket. The
/// peer has no exit code of its own; it reports 0 once the stream is closed.
class ConnectedLauncher : public Launcher {
public:
    explicit ConnectedLauncher(FdChannel channel) : channel_(std::move(channel)) {}
    std::unique_ptr<AppProcess> launch(const std::string& entrypoint) override;

private:
    std::optional<FdChannel> channel_;
};

}  // namespace kgate
