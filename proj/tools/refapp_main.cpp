// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

// Reference app. Speaks the protocol on stdin/stdout, or on a unix socket
// with --connect. Nothing else may be written to stdout.

#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <cerrno>
#include <cstring>
#include <iostream>

#include "kgate/refapp.hpp"

int main(int argc, char** argv) {
    kgate::refapp::BaselineOptions options;
    std::string connect;
    bool skip_a = false, skip_b = false, no_done = false;

    CLI::App app{"kgate-refapp: constant-prediction baseline", "kgate-refapp"};
    app.add_option("--app-name", options.app_name)->capture_default_str();
    app.add_option("--connect", connect, "Unix socket of a serving gateway");
    app.add_option("--extra-queries", options.extra_queries, "Additional read-only queries");
    app.add_flag("--random-predictions", options.random_predictions);
    app.add_option("--seed", options.seed);
    app.add_flag("--skip-a", skip_a);
    app.add_flag("--skip-b", skip_b);
    app.add_flag("--no-workflow-done", no_done);
    app.add_flag("--inject-parse-error", options.inject_parse_error);
    app.add_option("--exit-code", options.exit_code);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Help and usage go to stderr: stdout is the protocol channel.
        return app.exit(e, std::cerr, std::cerr) == 0 ? 0 : 2;
    }
    options.submit_a = !skip_a;
    options.submit_b = !skip_b;
    options.send_workflow_done = !no_done;

    if (connect.empty()) {
        auto channel = kgate::FdChannel::borrow(STDIN_FILENO, STDOUT_FILENO);
        return kgate::refapp::run_baseline(channel, options);
    }

    int fd = ::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    std::strncpy(addr.sun_path, connect.c_str(), sizeof(addr.sun_path) - 1);
    if (fd < 0 || ::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
        std::cerr << "kgate-refapp: cannot connect to " << connect << ": " << std::strerror(errno) << "\n";
        return 2;
    }
    kgate::FdChannel channel{kgate::UniqueFd(fd)};
    return kgate::refapp::run_baseline(channel, options);
}
