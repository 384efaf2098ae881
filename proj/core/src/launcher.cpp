// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#include "kgate/launcher.hpp"

#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <future>
#include <thread>

namespace kgate {

namespace {

int decode_status(int status) {
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
    return 255;
}

class ChildProcess : public AppProcess {
public:
    ChildProcess(pid_t pid, FdChannel channel) : pid_(pid), channel_(std::move(channel)) {}
    ~ChildProcess() override {
        if (!exit_code_) kill();
    }

    FdChannel& channel() override { return channel_; }

    std::optional<int> wait_for(Deadline deadline) override {
        using namespace std::chrono_literals;
        auto delay = 1ms;
        while (!exit_code_) {
            int status = 0;
            pid_t rc = ::waitpid(pid_, &status, WNOHANG);
            if (rc == pid_) {
                exit_code_ = decode_status(status);
                break;
            }
            if (rc < 0 && errno != EINTR) {
                exit_code_ = 255;
                break;
            }
            if (deadline && Clock::now() >= *deadline) return std::nullopt;
            std::this_thread::sleep_for(delay);
            delay = std::min(delay * 2, std::chrono::milliseconds(20));
        }
        return exit_code_;
    }

    void kill() override {
        if (exit_code_) return;
        ::kill(pid_, SIGKILL);
        int status = 0;
        while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
        }
        exit_code_ = decode_status(status);
    }

private:
    pid_t pid_;
    FdChannel channel_;
    std::optional<int> exit_code_;
};

class ThreadProcess : public AppProcess {
public:
    ThreadProcess(FdChannel gateway_end, FdChannel app_end, const ThreadLauncher::AppFn& app)
        : channel_(std::move(gateway_end)), app_end_(std::move(app_end)) {
        auto task = std::packaged_task<int()>([this, app] {
            int code = 1;
            try {
                code = app(app_end_);
            } catch (...) {
                code = 1;
            }
            app_end_.close();
            return code;
        });
        result_ = task.get_future();
        thread_ = std::thread(std::move(task));
    }
    ~ThreadProcess() override { kill(); }

    FdChannel& channel() override { return channel_; }

    std::optional<int> wait_for(Deadline deadline) override {
        if (!exit_code_) {
            if (deadline && result_.wait_until(*deadline) != std::future_status::ready) return std::nullopt;
            finish();
        }
        return exit_code_;
    }

    void kill() override {
        if (exit_code_) return;
        // A thread cannot be killed; cutting the channel makes its next read
        // or write fail.
        ::shutdown(channel_.read_fd(), SHUT_RDWR);
        finish();
    }

private:
    void finish() {
        exit_code_ = result_.get();
        thread_.join();
    }

    FdChannel channel_;
    FdChannel app_end_;
    std::future<int> result_;
    std::thread thread_;
    std::optional<int> exit_code_;
};

class ConnectedPeer : public AppProcess {
public:
    explicit ConnectedPeer(FdChannel channel) : channel_(std::move(channel)) {}
    FdChannel& channel() override { return channel_; }
    std::optional<int> wait_for(Deadline) override { return 0; }
    void kill() override { channel_.close(); }

private:
    FdChannel channel_;
};

}  // namespace

std::vector<std::string> split_command(const std::string& entrypoint) {
    std::vector<std::string> out;
    std::string current;
    for (char c : entrypoint) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
            if (!current.empty()) out.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

std::unique_ptr<AppProcess> ProcessLauncher::launch(const std::string& entrypoint) {
    auto args = split_command(entrypoint);
    if (args.empty()) throw LaunchError("empty entrypoint");

    // Everything the child needs is prepared before fork.
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    const char* path = std::getenv("PATH");
    std::string path_var = std::string("PATH=") + (path ? path : "/usr/bin:/bin");
    char* envp[] = {path_var.data(), nullptr};

    auto [gateway_end, app_end] = socket_pair();
    const int child_fd = app_end.read_fd();

    pid_t pid = ::fork();
    if (pid < 0) throw LaunchError(std::string("fork: ") + std::strerror(errno));
    if (pid == 0) {
        if (::dup2(child_fd, STDIN_FILENO) < 0 || ::dup2(child_fd, STDOUT_FILENO) < 0) ::_exit(127);
        ::closefrom(STDERR_FILENO + 1);
        ::execvpe(argv[0], argv.data(), envp);
        ::_exit(127);
    }
    app_end.close();
    return std::make_unique<ChildProcess>(pid, std::move(gateway_end));
}

std::unique_ptr<AppProcess> ThreadLauncher::launch(const std::string&) {
    auto [gateway_end, app_end] = socket_pair();
    return std::make_unique<ThreadProcess>(std::move(gateway_end), std::move(app_end), app_);
}

std::unique_ptr<AppProcess> ConnectedLauncher::launch(const std::string&) {
    if (!channel_) throw LaunchError("connected peer already used");
    auto process = std::make_unique<ConnectedPeer>(std::move(*channel_));
    channel_.reset();
    return process;
}

}  // namespace kgate
