// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#include "kgate/refapp.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "kgate/csv.hpp"
#include "kgate/graph.hpp"
#include "kgate/rng.hpp"

namespace kgate::refapp {

namespace {

constexpr std::string_view kIcd10Prefix = "ICD10:";

const char* const kExtraQueries[] = {
    "MATCH (b:Biological_Sample)-[:BELONGS_TO_SUBJECT]->(s:Subject) RETURN b, s.subject_id",
    "MATCH (g:Gene) RETURN g.name LIMIT 5",
    "MATCH (b:Biological_Sample)-[r:HAS_PROTEIN]->(p:Protein) WHERE r.score > 10 RETURN b, p.name LIMIT 20",
    "MATCH (d:Disease) WHERE d.name = \"control\" RETURN d",
    "MATCH (b:Biological_Sample)-[:HAS_PHENOTYPE]->(p:Phenotype) RETURN p.name LIMIT 10",
};

constexpr std::string_view kParseErrorQuery = "MATCH (b:Biological_Sample RETURN b";
constexpr std::string_view kTypeErrorQuery = "MATCH (d:Disease) WHERE d.name > 3 RETURN d";
constexpr std::string_view kExpensiveQuery = "MATCH (a)-[]->(b)<-[]-(c) RETURN a, c";

struct ChannelBroken {};
struct GatewayFatal {};

class Client {
public:
    explicit Client(FdChannel& channel) : stream_(channel) {}

    proto::Message request(const proto::Message& m) {
        send(m);
        return receive();
    }

    void send(const proto::Message& m) {
        try {
            stream_.send(m);
        } catch (const std::exception&) {
            throw ChannelBroken{};
        }
    }

    proto::Message receive() {
        std::optional<proto::Message> reply;
        try {
            reply = stream_.receive();
        } catch (const std::exception&) {
            throw ChannelBroken{};
        }
        if (!reply) throw ChannelBroken{};
        if (std::holds_alternative<proto::Fatal>(*reply)) throw GatewayFatal{};
        return *reply;
    }

    /// Rows for a successful query, std::nullopt for QUERY_ERROR.
    std::optional<proto::Rows> query(std::string_view text) {
        auto reply = request(proto::Query{++last_id_, std::string(text)});
        if (auto* rows = std::get_if<proto::Rows>(&reply)) return std::move(*rows);
        if (std::holds_alternative<proto::QueryError>(reply)) return std::nullopt;
        throw GatewayFatal{};
    }

    MessageStream& stream() { return stream_; }

private:
    MessageStream stream_;
    std::uint64_t last_id_ = 0;
};

std::vector<std::string> subject_ids(const std::optional<proto::Rows>& rows) {
    std::set<std::string> ids;
    if (rows) {
        for (const auto& row : rows->rows) {
            if (!row.empty()) {
                if (const auto* s = std::get_if<std::string>(&row[0])) ids.insert(*s);
            }
        }
    }
    return {ids.begin(), ids.end()};
}

std::string predictions_csv(const std::vector<std::string>& subjects, std::string_view label) {
    std::string out = "subject_id,prediction\n";
    for (const auto& s : subjects) out += csv::quote(s) + "," + std::string(label) + "\n";
    return out;
}

std::string random_csv(const std::vector<std::string>& subjects, bool task_a, Rng& rng) {
    std::string out = "subject_id,prediction\n";
    for (const auto& s : subjects) {
        if (rng.below(10) == 0) continue;
        std::string label = task_a ? std::to_string(rng.below(2)) : std::string(1, static_cast<char>('A' + rng.below(26)));
        out += csv::quote(s) + "," + label + "\n";
    }
    out += std::string("ZZ-unknown,") + (task_a ? "1" : "Q") + "\n";
    return out;
}

}  // namespace

std::string BaselineModel::task_a_label() const { return diseased_samples > control_samples ? "1" : "0"; }

char BaselineModel::task_b_label() const {
    char best = 'A';
    std::size_t best_count = 0;
    for (const auto& [letter, n] : letter_counts) {
        if (n > best_count) {
            best = letter;
            best_count = n;
        }
    }
    return best;
}

BaselineModel fit(const proto::Rows& disease_rows) {
    struct SampleInfo {
        bool control = false;
        std::optional<std::string> smallest_icd10;
    };
    std::map<std::int64_t, SampleInfo> samples;
    for (const auto& row : disease_rows.rows) {
        if (row.size() < 3) continue;
        const auto* id = std::get_if<std::int64_t>(&row[0]);
        if (id == nullptr) continue;
        auto& info = samples[*id];
        if (const auto* name = std::get_if<std::string>(&row[1]); name && *name == kControlDiseaseName) {
            info.control = true;
        }
        if (const auto* synonyms = std::get_if<TextList>(&row[2])) {
            for (const auto& syn : *synonyms) {
                if (!syn.starts_with(kIcd10Prefix) || syn.size() == kIcd10Prefix.size()) continue;
                auto code = syn.substr(kIcd10Prefix.size());
                if (!std::isalpha(static_cast<unsigned char>(code.front()))) continue;
                if (!info.smallest_icd10 || code < *info.smallest_icd10) info.smallest_icd10 = code;
            }
        }
    }

    BaselineModel model;
    for (const auto& [_, info] : samples) {
        if (info.control) {
            ++model.control_samples;
            continue;
        }
        ++model.diseased_samples;
        if (info.smallest_icd10) {
            ++model.letter_counts[static_cast<char>(std::toupper(static_cast<unsigned char>(info.smallest_icd10->front())))];
        }
    }
    return model;
}

std::vector<std::string> planned_queries(const BaselineOptions& o) {
    std::vector<std::string> out{std::string(kDiseaseQuery), std::string(kSubjectQuery)};
    for (std::size_t i = 0; i < o.extra_queries; ++i) out.emplace_back(kExtraQueries[i % std::size(kExtraQueries)]);
    if (o.inject_parse_error) out.emplace_back(kParseErrorQuery);
    if (o.inject_type_error) out.emplace_back(kTypeErrorQuery);
    if (o.inject_expensive_query) out.emplace_back(kExpensiveQuery);
    return out;
}

int run_baseline(FdChannel& channel, const BaselineOptions& o) {
    Client client(channel);
    try {
        auto reply = client.request(proto::Hello{o.app_name, o.protocol_version});
        const auto* ack = std::get_if<proto::HelloAck>(&reply);
        if (ack == nullptr) return 1;
        const auto declared = [&](std::string_view task) {
            return std::find(ack->tasks.begin(), ack->tasks.end(), task) != ack->tasks.end();
        };

        std::optional<proto::Rows> disease_rows, subject_rows;
        const auto queries = planned_queries(o);
        for (std::size_t i = 0; i < queries.size(); ++i) {
            auto rows = client.query(queries[i]);
            if (i == 0) disease_rows = std::move(rows);
            if (i == 1) subject_rows = std::move(rows);
        }

        if (o.send_malformed_frame) {
            const std::uint8_t bad[] = {0, 0, 0, 3, '{', '{', '}'};
            channel.write_all(bad);
            client.receive();
            return 1;
        }

        const auto model = disease_rows ? fit(*disease_rows) : BaselineModel{};
        const auto subjects = subject_ids(subject_rows);
        Rng rng(o.seed);

        auto submit = [&](std::string_view task, bool wanted, bool task_a) {
            if (!wanted || !declared(task)) return;
            std::string csv;
            if (o.random_predictions) {
                csv = random_csv(subjects, task_a, rng);
            } else {
                csv = predictions_csv(subjects, task_a ? model.task_a_label() : std::string(1, model.task_b_label()));
            }
            proto::SubmitPredictions msg{std::string(task), csv};
            client.request(msg);
            if (o.submit_twice) client.request(msg);
        };
        submit("A", o.submit_a, true);
        submit("B", o.submit_b, false);

        if (o.send_workflow_done) client.send(proto::WorkflowDone{});
        return o.exit_code;
    } catch (const GatewayFatal&) {
        return 1;
    } catch (const ChannelBroken&) {
        return 2;
    }
}

}  // namespace kgate::refapp
