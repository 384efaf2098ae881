// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#pragma once

#include <cstddef>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kgate/graph.hpp"

// Ground truth and scoring for the two prediction tasks:
//   Task A  diseased (1) vs control (0) per subject, scored by F1.
//   Task B  first letter of the ICD-10 code, scored by macro-averaged recall.
namespace kgate::eval {

enum class Task { A, B };

std::string_view to_string(Task task);
std::optional<Task> parse_task(std::string_view text);

struct Prediction {
    std::string subject_id;
    std::string label;
    friend bool operator==(const Prediction&, const Prediction&) = default;
};

struct PredictionTable {
    Task task = Task::A;
    std::vector<Prediction> rows;
    std::size_t source_rows = 0;
};

struct GroundTruth {
    Task task = Task::A;
    std::map<std::string, std::string> labels;  // subject_id -> "0"/"1" or "A".."Z"
    std::set<std::string> excluded;
};

struct BinaryCounts {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::size_t total() const { return tp + fp + tn + fn; }
    friend bool operator==(const BinaryCounts&, const BinaryCounts&) = default;
};

struct ClassCounts {
    std::size_t tp = 0, fn = 0;
    friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

struct ConfusionCounts {
    Task task = Task::A;
    BinaryCounts binary;                   // Task A
    std::map<char, ClassCounts> per_class;  // Task B, classes present in the truth
    std::size_t correct = 0;
    std::size_t n_scored = 0;   // truth subjects, including missing ones
    std::size_t n_missing = 0;  // truth subjects without a prediction row
    std::size_t ignored_excluded = 0;
    std::size_t ignored_unknown = 0;
};

/// Task A fills precision/recall/f1; Task B fills macro_recall.
struct MetricsReport {
    Task task = Task::A;
    double accuracy = 0.0;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::optional<double> macro_recall;
    std::size_t n_scored = 0;
    std::size_t n_missing = 0;
    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

enum class EvalErrc {
    MissingHeader,
    MalformedRow,
    BadLabel,
    DuplicateSubject,
    NoControlNode,
    AmbiguousLabel,
    TaskMismatch,
    EmptyTruth,
};

std::string_view to_string(EvalErrc code);

class EvalError : public std::runtime_error {
public:
    EvalError(EvalErrc code, const std::string& message, std::size_t line = 0);
    EvalErrc code() const noexcept { return code_; }
    std::size_t line() const noexcept { return line_; }

private:
    EvalErrc code_;
    std::size_t line_;
};

/// Header "subject_id,prediction" is required. Task B labels are uppercased.
PredictionTable parse_predictions(std::string_view csv, Task task);
std::string format_predictions(const PredictionTable& table);

GroundTruth ground_truth_task_a(const PropertyGraph& graph);
GroundTruth ground_truth_task_b(const PropertyGraph& graph);
GroundTruth ground_truth(const PropertyGraph& graph, Task task);

/// Truth subjects missing from the predictions count as wrong: for Task A a
/// missing positive is a false negative and a missing negative a false
/// positive. Rows for excluded or unknown subjects are ignored but tallied.
ConfusionCounts confusion(const PredictionTable& predictions, const GroundTruth& truth);

// Zero denominators yield 0.
double precision(const BinaryCounts& counts);
double recall_binary(const BinaryCounts& counts);
double f1_binary(const BinaryCounts& counts);
double accuracy(const BinaryCounts& counts);

/// Unweighted mean of per-class recall over classes present in the truth.
/// Throws EvalError(EmptyTruth) when nothing is scored.
double macro_recall(const ConfusionCounts& counts);
double macro_recall(const PredictionTable& predictions, const GroundTruth& truth);

/// Task B with an empty truth reports zeros instead of throwing.
MetricsReport evaluate(const PredictionTable& predictions, const GroundTruth& truth);

/// F1 of Task A plus macro recall of Task B; an absent task contributes 0.
double score_total(const std::optional<MetricsReport>& task_a, const std::optional<MetricsReport>& task_b);

nlohmann::json to_json(const MetricsReport& report);
MetricsReport metrics_from_json(const nlohmann::json& j);

}  // namespace kgate::eval
