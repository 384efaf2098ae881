// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kgate/channel.hpp"
#include "kgate/proto.hpp"

// Reference app: a constant-prediction baseline that speaks the protocol end
// to end. It predicts the Task A majority label and the most frequent Task B
// letter for every subject.
namespace kgate::refapp {

inline constexpr std::string_view kDiseaseQuery =
    "MATCH (b:Biological_Sample)-[:HAS_DISEASE]->(d:Disease) RETURN b, d.name, d.synonyms";
inline constexpr std::string_view kSubjectQuery = "MATCH (s:Subject) RETURN s.subject_id";

struct BaselineModel {
    std::size_t diseased_samples = 0;
    std::size_t control_samples = 0;
    std::map<char, std::size_t> letter_counts;

    /// "1" when diseased samples outnumber control ones, else "0".
    std::string task_a_label() const;
    /// Most frequent letter, ties to the alphabetically first, 'A' without data.
    char task_b_label() const;
};

/// Fits on the rows of kDiseaseQuery (columns b, d.name, d.synonyms). A
/// sample linked to control counts as control; otherwise it counts as
/// diseased and contributes the first letter of its smallest ICD-10 code.
BaselineModel fit(const proto::Rows& disease_rows);

/// Knobs for tests that need misbehaving or noisy apps. The defaults give
/// the plain baseline.
struct BaselineOptions {
    std::string app_name = "kgate-refapp";
    std::string protocol_version = std::string(proto::kProtocolVersion);
    bool submit_a = true;
    bool submit_b = true;
    /// Extra read-only queries issued after the two the model needs.
    std::size_t extra_queries = 0;
    bool inject_parse_error = false;
    bool inject_type_error = false;
    /// An unlabeled two-hop pattern that exhausts small step budgets.
    bool inject_expensive_query = false;
    /// Random labels, randomly dropped subjects, and one unknown subject.
    bool random_predictions = false;
    std::uint64_t seed = 0;
    bool send_workflow_done = true;
    /// Writes a frame whose body is not JSON instead of submitting.
    bool send_malformed_frame = false;
    bool submit_twice = false;
    int exit_code = 0;
};

/// Runs one session over `channel`. Returns the process exit code: the
/// configured exit_code on success, 1 on a FATAL from the gateway, 2 on a
/// broken channel.
int run_baseline(FdChannel& channel, const BaselineOptions& options = {});

/// The query texts the baseline sends, in order, for the given options.
std::vector<std::string> planned_queries(const BaselineOptions& options);

}  // namespace kgate::refapp
