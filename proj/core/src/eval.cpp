// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#include "kgate/eval.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "kgate/csv.hpp"

namespace kgate::eval {

namespace {

constexpr std::string_view kIcd10Prefix = "ICD10:";

double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

/// subject_id of the Subject a sample belongs to, if any.
std::optional<std::string> owner_of(const PropertyGraph& g, NodeId sample) {
    auto owners = g.neighbors(sample, EdgeType::BelongsToSubject, Direction::Out);
    if (owners.empty()) return std::nullopt;
    const auto& props = g.node(owners.front().node).properties;
    return std::get<std::string>(props.at("subject_id"));
}

bool is_control(const PropertyGraph& g, NodeId disease) {
    const auto& props = g.node(disease).properties;
    auto it = props.find("name");
    return it != props.end() && std::get<std::string>(it->second) == kControlDiseaseName;
}

void require_control(const PropertyGraph& g) {
    for (auto id : g.nodes_by_label(NodeLabel::Disease)) {
        if (is_control(g, id)) return;
    }
    throw EvalError(EvalErrc::NoControlNode, "graph has no Disease named \"control\"");
}

/// Merges one sample's label into its subject's entry.
void assign(GroundTruth& truth, const std::string& subject, const std::string& label) {
    auto [it, fresh] = truth.labels.emplace(subject, label);
    if (!fresh && it->second != label) {
        throw EvalError(EvalErrc::AmbiguousLabel, "subject '" + subject + "' has samples with labels " +
                                                      it->second + " and " + label);
    }
    truth.excluded.erase(subject);
}

void exclude(GroundTruth& truth, const std::string& subject) {
    if (!truth.labels.contains(subject)) truth.excluded.insert(subject);
}

}  // namespace

std::string_view to_string(Task task) { return task == Task::A ? "A" : "B"; }

std::optional<Task> parse_task(std::string_view text) {
    if (text == "A" || text == "a") return Task::A;
    if (text == "B" || text == "b") return Task::B;
    return std::nullopt;
}

std::string_view to_string(EvalErrc code) {
    switch (code) {
        case EvalErrc::MissingHeader: return "MissingHeader";
        case EvalErrc::MalformedRow: return "MalformedRow";
        case EvalErrc::BadLabel: return "BadLabel";
        case EvalErrc::DuplicateSubject: return "DuplicateSubject";
        case EvalErrc::NoControlNode: return "NoControlNode";
        case EvalErrc::AmbiguousLabel: return "AmbiguousLabel";
        case EvalErrc::TaskMismatch: return "TaskMismatch";
        case EvalErrc::EmptyTruth: return "EmptyTruth";
    }
    return "Unknown";
}

EvalError::EvalError(EvalErrc code, const std::string& message, std::size_t line)
    : std::runtime_error(std::string(to_string(code)) + (line ? " at line " + std::to_string(line) : "") + ": " +
                         message),
      code_(code),
      line_(line) {}

PredictionTable parse_predictions(std::string_view text, Task task) {
    std::vector<csv::Record> records;
    try {
        records = csv::parse(text);
    } catch (const csv::CsvError& e) {
        throw EvalError(EvalErrc::MalformedRow, e.what(), e.line());
    }
    if (records.empty() || records.front().fields != std::vector<std::string>{"subject_id", "prediction"}) {
        throw EvalError(EvalErrc::MissingHeader, "first row must be \"subject_id,prediction\"", 1);
    }

    PredictionTable table;
    table.task = task;
    table.source_rows = records.size() - 1;
    std::unordered_set<std::string> seen;
    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        if (rec.fields.size() != 2 || rec.fields[0].empty()) {
            throw EvalError(EvalErrc::MalformedRow, "expected subject_id,prediction", rec.line);
        }
        std::string label = rec.fields[1];
        if (task == Task::A) {
            if (label != "0" && label != "1") throw EvalError(EvalErrc::BadLabel, "Task A labels are 0 or 1", rec.line);
        } else {
            if (label.size() != 1 || !std::isalpha(static_cast<unsigned char>(label[0]))) {
                throw EvalError(EvalErrc::BadLabel, "Task B labels are single letters A-Z", rec.line);
            }
            label[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
        }
        if (!seen.insert(rec.fields[0]).second) {
            throw EvalError(EvalErrc::DuplicateSubject, "subject '" + rec.fields[0] + "' appears twice", rec.line);
        }
        table.rows.push_back({rec.fields[0], std::move(label)});
    }
    return table;
}

std::string format_predictions(const PredictionTable& table) {
    std::string out = "subject_id,prediction\n";
    for (const auto& row : table.rows) out += csv::quote(row.subject_id) + "," + row.label + "\n";
    return out;
}

GroundTruth ground_truth_task_a(const PropertyGraph& g) {
    require_control(g);
    GroundTruth truth;
    truth.task = Task::A;
    for (auto bs : g.nodes_by_label(NodeLabel::BiologicalSample)) {
        auto subject = owner_of(g, bs);
        if (!subject) continue;
        auto diseases = g.neighbors(bs, EdgeType::HasDisease, Direction::Out);
        if (diseases.empty()) {
            exclude(truth, *subject);
            continue;
        }
        bool control = false, diseased = false;
        for (const auto& row : diseases) (is_control(g, row.node) ? control : diseased) = true;
        if (control && diseased) {
            throw EvalError(EvalErrc::AmbiguousLabel,
                            "sample of subject '" + *subject + "' is linked to control and to a disease");
        }
        assign(truth, *subject, diseased ? "1" : "0");
    }
    return truth;
}

GroundTruth ground_truth_task_b(const PropertyGraph& g) {
    require_control(g);
    GroundTruth truth;
    truth.task = Task::B;
    for (auto bs : g.nodes_by_label(NodeLabel::BiologicalSample)) {
        auto subject = owner_of(g, bs);
        if (!subject) continue;
        auto diseases = g.neighbors(bs, EdgeType::HasDisease, Direction::Out);
        const bool control = std::any_of(diseases.begin(), diseases.end(),
                                         [&](const Adjacency& row) { return is_control(g, row.node); });
        std::optional<std::string> smallest;
        if (!control) {
            for (const auto& row : diseases) {
                const auto& props = g.node(row.node).properties;
                auto it = props.find("synonyms");
                if (it == props.end()) continue;
                for (const auto& syn : std::get<TextList>(it->second)) {
                    if (!syn.starts_with(kIcd10Prefix) || syn.size() == kIcd10Prefix.size()) continue;
                    auto code = syn.substr(kIcd10Prefix.size());
                    if (!std::isalpha(static_cast<unsigned char>(code.front()))) continue;
                    if (!smallest || code < *smallest) smallest = code;
                }
            }
        }
        if (!smallest) {
            exclude(truth, *subject);
            continue;
        }
        assign(truth, *subject,
               std::string(1, static_cast<char>(std::toupper(static_cast<unsigned char>(smallest->front())))));
    }
    return truth;
}

GroundTruth ground_truth(const PropertyGraph& graph, Task task) {
    return task == Task::A ? ground_truth_task_a(graph) : ground_truth_task_b(graph);
}

ConfusionCounts confusion(const PredictionTable& predictions, const GroundTruth& truth) {
    if (predictions.task != truth.task) {
        throw EvalError(EvalErrc::TaskMismatch, "predictions are for task " + std::string(to_string(predictions.task)) +
                                                    ", truth for task " + std::string(to_string(truth.task)));
    }
    ConfusionCounts c;
    c.task = truth.task;

    std::map<std::string_view, std::string_view> predicted;
    for (const auto& row : predictions.rows) {
        if (truth.labels.contains(row.subject_id)) {
            predicted.emplace(row.subject_id, row.label);
        } else if (truth.excluded.contains(row.subject_id)) {
            ++c.ignored_excluded;
        } else {
            ++c.ignored_unknown;
        }
    }

    for (const auto& [subject, label] : truth.labels) {
        ++c.n_scored;
        auto it = predicted.find(subject);
        const bool missing = it == predicted.end();
        if (missing) ++c.n_missing;
        const bool hit = !missing && it->second == label;
        if (hit) ++c.correct;

        if (truth.task == Task::A) {
            const bool positive = label == "1";
            if (positive) {
                ++(hit ? c.binary.tp : c.binary.fn);
            } else {
                ++(hit ? c.binary.tn : c.binary.fp);
            }
        } else {
            auto& cls = c.per_class[label.front()];
            ++(hit ? cls.tp : cls.fn);
        }
    }
    return c;
}

double precision(const BinaryCounts& c) { return ratio(c.tp, c.tp + c.fp); }
double recall_binary(const BinaryCounts& c) { return ratio(c.tp, c.tp + c.fn); }

// 2PR/(P+R) rewritten over the counts, so the result is one correctly
// rounded division.
double f1_binary(const BinaryCounts& c) { return ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn); }

double accuracy(const BinaryCounts& c) { return ratio(c.tp + c.tn, c.total()); }

double macro_recall(const ConfusionCounts& c) {
    if (c.per_class.empty()) throw EvalError(EvalErrc::EmptyTruth, "no scored subjects");
    double sum = 0.0;
    for (const auto& [_, cls] : c.per_class) sum += ratio(cls.tp, cls.tp + cls.fn);
    return sum / static_cast<double>(c.per_class.size());
}

double macro_recall(const PredictionTable& predictions, const GroundTruth& truth) {
    return macro_recall(confusion(predictions, truth));
}

MetricsReport evaluate(const PredictionTable& predictions, const GroundTruth& truth) {
    const auto c = confusion(predictions, truth);
    MetricsReport m;
    m.task = c.task;
    m.n_scored = c.n_scored;
    m.n_missing = c.n_missing;
    if (c.task == Task::A) {
        m.accuracy = accuracy(c.binary);
        m.precision = precision(c.binary);
        m.recall = recall_binary(c.binary);
        m.f1 = f1_binary(c.binary);
    } else {
        m.accuracy = ratio(c.correct, c.n_scored);
        m.macro_recall = c.per_class.empty() ? 0.0 : macro_recall(c);
    }
    return m;
}

double score_total(const std::optional<MetricsReport>& task_a, const std::optional<MetricsReport>& task_b) {
    const double a = task_a ? task_a->f1.value_or(0.0) : 0.0;
    const double b = task_b ? task_b->macro_recall.value_or(0.0) : 0.0;
    return a + b;
}

nlohmann::json to_json(const MetricsReport& m) {
    nlohmann::json j{{"task", to_string(m.task)}, {"accuracy", m.accuracy}};
    if (m.precision) j["precision"] = *m.precision;
    if (m.recall) j["recall"] = *m.recall;
    if (m.f1) j["f1"] = *m.f1;
    if (m.macro_recall) j["macro_recall"] = *m.macro_recall;
    j["n_scored"] = m.n_scored;
    j["n_missing"] = m.n_missing;
    return j;
}

MetricsReport metrics_from_json(const nlohmann::json& j) {
    MetricsReport m;
    auto task = parse_task(j.at("task").get<std::string>());
    if (!task) throw std::invalid_argument("unknown task");
    m.task = *task;
    m.accuracy = j.at("accuracy").get<double>();
    if (j.contains("precision")) m.precision = j["precision"].get<double>();
    if (j.contains("recall")) m.recall = j["recall"].get<double>();
    if (j.contains("f1")) m.f1 = j["f1"].get<double>();
    if (j.contains("macro_recall")) m.macro_recall = j["macro_recall"].get<double>();
    m.n_scored = j.at("n_scored").get<std::size_t>();
    m.n_missing = j.at("n_missing").get<std::size_t>();
    return m;
}

}  // namespace kgate::eval
