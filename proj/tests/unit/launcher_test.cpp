// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#include <gtest/gtest.h>

#include "kgate/gateway.hpp"
#include "kgate/launcher.hpp"
#include "support/fixtures.hpp"

namespace kgate {
namespace {

using Strings = std::vector<std::string>;

TEST(SplitCommand, Whitespace) {
    EXPECT_EQ(split_command("  /bin/app  --x\t1\n"), (Strings{"/bin/app", "--x", "1"}));
    EXPECT_EQ(split_command(""), Strings{});
    EXPECT_EQ(split_command(" \t "), Strings{});
    EXPECT_EQ(split_command("a\"b c\""), (Strings{"a\"b", "c\""}));
}

TEST(ProcessLauncher, MissingBinaryExits127) {
    ProcessLauncher launcher;
    auto app = launcher.launch("/nonexistent/kgate-app");
    EXPECT_EQ(app->wait_for(Clock::now() + std::chrono::seconds(5)), 127);
}

TEST(ProcessLauncher, ExitCodeAndSignal) {
    ProcessLauncher launcher;
    auto failing = launcher.launch("/bin/false");
    EXPECT_EQ(failing->wait_for(Clock::now() + std::chrono::seconds(5)), 1);

    auto sleeper = launcher.launch("/bin/sleep 30");
    EXPECT_EQ(sleeper->wait_for(Clock::now() + std::chrono::milliseconds(20)), std::nullopt);
    sleeper->kill();
    EXPECT_EQ(sleeper->wait_for(std::nullopt), 128 + 9);
}

TEST(ProcessLauncher, EmptyEntrypointIsLaunchError) {
    ProcessLauncher launcher;
    EXPECT_THROW(launcher.launch("   "), LaunchError);
}

TEST(ProcessLauncher, EnvironmentIsCleared) {
    ::setenv("KGATE_SECRET_FOR_TEST", "x", 1);
    ProcessLauncher launcher;
    // printenv exits 1 when the variable is absent.
    auto app = launcher.launch("printenv KGATE_SECRET_FOR_TEST");
    EXPECT_EQ(app->wait_for(Clock::now() + std::chrono::seconds(5)), 1);
    auto path = launcher.launch("printenv PATH");
    EXPECT_EQ(path->wait_for(Clock::now() + std::chrono::seconds(5)), 0);
}

gateway::WorkflowResult run_process(const std::string& entrypoint, AuditLog& log) {
    gateway::Gateway gw(testing::default_graph(), {}, log);
    ProcessLauncher launcher;
    return gw.run_workflow({"kgate-refapp", "1.0", {"A", "B"}, entrypoint, std::nullopt}, launcher);
}

TEST(ProcessLauncher, RefappBinaryReleases) {
    auto log = testing::file_audit_log("launcher-refapp");
    auto r = run_process(KGATE_REFAPP_PATH, *log);
    EXPECT_EQ(r.report.state.state, WorkflowState::Released);
    EXPECT_EQ(*r.report.task_a->f1, 198.0 / 199.0);
    EXPECT_TRUE(replay(log->entries()).ok());
}

TEST(ProcessLauncher, BadEntrypointIsAppCrash) {
    auto log = testing::file_audit_log("launcher-bad");
    auto r = run_process("/nonexistent/kgate-app", *log);
    EXPECT_EQ(r.report.state, (StateTag{WorkflowState::Failed, FailureReason::AppCrash}));
    EXPECT_TRUE(replay(log->entries()).ok());
}

TEST(ProcessLauncher, NonzeroExitAfterSubmittingStillEvaluates) {
    auto log = testing::file_audit_log("launcher-exit");
    auto r = run_process(std::string(KGATE_REFAPP_PATH) + " --exit-code 4", *log);
    EXPECT_EQ(r.report.state.state, WorkflowState::Released);
}

TEST(ProcessLauncher, SkippedTasksAreNotScored) {
    auto log = testing::file_audit_log("launcher-skip");
    auto r = run_process(std::string(KGATE_REFAPP_PATH) + " --skip-b", *log);
    EXPECT_EQ(r.report.state.state, WorkflowState::Released);
    EXPECT_TRUE(r.report.task_a);
    EXPECT_FALSE(r.report.task_b);
}

}  // namespace
}  // namespace kgate
