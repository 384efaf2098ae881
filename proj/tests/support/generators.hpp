// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#pragma once

// Random inputs for property tests: schema-conforming graphs, valid queries
// against them, and arbitrary syntactically valid ASTs.

#include <algorithm>
#include <cctype>
#include <climits>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kgate/graph.hpp"
#include "kgate/query.hpp"

namespace kgate::testing {

using Rand = std::mt19937_64;

inline std::size_t pick(Rand& r, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(r); }
inline bool coin(Rand& r, double p = 0.5) { return std::bernoulli_distribution(p)(r); }

template <typename T>
const T& pick_from(Rand& r, const std::vector<T>& v) {
    return v[pick(r, v.size())];
}

inline const std::vector<std::string>& name_pool() {
    static const std::vector<std::string> pool = {"alpha", "beta", "control", "gamma delta", "Asthma", "beta-2"};
    return pool;
}

inline const std::vector<std::string>& synonym_pool() {
    static const std::vector<std::string> pool = {"ICD10:A01.1", "ICD10:J45.0", "ICD9:123.4", "ICD10:B20", "X"};
    return pool;
}

inline const std::vector<double>& score_pool() {
    static const std::vector<double> pool = {1.0, 2.5, 7.25, 10.0, 19.99, 20.0};
    return pool;
}

/// A schema-conforming graph with at most `max_nodes` nodes. Property values
/// come from small pools so random conditions match often.
inline PropertyGraph random_graph(Rand& r, std::size_t max_nodes = 50) {
    PropertyGraph g;
    const std::size_t total = 1 + pick(r, max_nodes);
    std::vector<NodeId> subjects, samples, diseases, genes, proteins, phenotypes;
    for (std::size_t i = 0; i < total; ++i) {
        const auto label = kAllLabels[pick(r, kAllLabels.size())];
        Properties props;
        if (label == NodeLabel::Subject) props["subject_id"] = "S" + std::to_string(1000 + i);
        if (label == NodeLabel::Disease || coin(r, 0.6)) {
            if (label != NodeLabel::Subject || coin(r)) props["name"] = pick_from(r, name_pool());
        }
        if (label == NodeLabel::Disease && coin(r, 0.7)) {
            TextList syns;
            for (std::size_t k = pick(r, 3); k > 0; --k) syns.push_back(pick_from(r, synonym_pool()));
            props["synonyms"] = syns;
        }
        if (coin(r, 0.3)) props["rank"] = static_cast<std::int64_t>(pick(r, 5));
        if (coin(r, 0.2)) props["weight"] = static_cast<double>(pick(r, 7)) / 2.0;
        auto id = g.add_node(label, std::move(props));
        switch (label) {
            case NodeLabel::Subject: subjects.push_back(id); break;
            case NodeLabel::BiologicalSample: samples.push_back(id); break;
            case NodeLabel::Disease: diseases.push_back(id); break;
            case NodeLabel::Gene: genes.push_back(id); break;
            case NodeLabel::Protein: proteins.push_back(id); break;
            case NodeLabel::Phenotype: phenotypes.push_back(id); break;
        }
    }
    auto link = [&](NodeId bs, EdgeType type, const std::vector<NodeId>& targets, std::size_t max_links) {
        if (targets.empty()) return;
        for (std::size_t k = pick(r, max_links + 1); k > 0; --k) {
            auto dst = pick_from(r, targets);
            bool exists = false;
            for (const auto& row : g.neighbors(bs, type, Direction::Out)) exists = exists || row.node == dst;
            if (exists) continue;
            Properties props;
            if (requires_score(type) || coin(r, 0.2)) props["score"] = pick_from(r, score_pool());
            g.add_edge(bs, type, dst, std::move(props));
        }
    };
    for (auto bs : samples) {
        link(bs, EdgeType::BelongsToSubject, subjects, 1);
        link(bs, EdgeType::HasDisease, diseases, 2);
        link(bs, EdgeType::HasDamage, genes, 3);
        link(bs, EdgeType::HasProtein, proteins, 3);
        link(bs, EdgeType::HasPhenotype, phenotypes, 2);
    }
    return g;
}

inline qlang::Literal random_number(Rand& r) {
    if (coin(r)) return static_cast<std::int64_t>(pick(r, 22));
    return pick_from(r, score_pool());
}

/// A condition that passes check_schema for `var`.
inline qlang::Condition random_condition(Rand& r, const std::string& var) {
    using qlang::CompareOp;
    static const std::vector<std::string> keys = {"name", "synonyms", "score", "subject_id", "rank", "weight"};
    static const std::vector<CompareOp> numeric_ops = {CompareOp::Eq, CompareOp::Ne, CompareOp::Lt,
                                                       CompareOp::Le, CompareOp::Gt, CompareOp::Ge};
    qlang::Condition c;
    c.var = var;
    c.key = pick_from(r, keys);
    if (c.key == "name" || c.key == "subject_id") {
        const int mode = static_cast<int>(pick(r, 3));
        c.op = mode == 0 ? CompareOp::Eq : mode == 1 ? CompareOp::Ne : CompareOp::Contains;
        c.literal = c.op == CompareOp::Contains ? std::string(coin(r) ? "a" : "ta") : pick_from(r, name_pool());
        if (c.key == "subject_id" && coin(r)) c.literal = std::string("S100") + std::to_string(pick(r, 10));
    } else if (c.key == "synonyms") {
        c.op = CompareOp::Contains;
        c.literal = pick_from(r, synonym_pool());
    } else {
        c.op = pick_from(r, numeric_ops);
        c.literal = random_number(r);
    }
    return c;
}

/// A query that passes parse-time and schema checks. Half the patterns are
/// drawn freely, so they often legitimately return nothing; the other half
/// follow schema rules out of a Biological_Sample, with each label and edge
/// type kept or dropped at random.
inline qlang::QueryAst random_valid_query(Rand& r) {
    qlang::QueryAst ast;
    const std::size_t n_nodes = 1 + pick(r, qlang::kMaxPatternNodes);
    const bool shaped = coin(r);
    // Shaped patterns: (x)<-[a]-(sample)-[b]->(y), trimmed to n_nodes.
    std::vector<SchemaRule> rules;
    for (std::size_t i = 0; i < 2; ++i) rules.push_back(kSchemaRules[pick(r, kSchemaRules.size())]);
    const std::size_t sample_slot = n_nodes == 3 ? 1 : pick(r, n_nodes);

    std::vector<std::string> vars;
    for (std::size_t i = 0; i < n_nodes; ++i) {
        qlang::NodePattern n{"v" + std::to_string(i), std::nullopt};
        if (coin(r, 0.7)) {
            NodeLabel label = kAllLabels[pick(r, kAllLabels.size())];
            if (shaped) label = i == sample_slot ? NodeLabel::BiologicalSample : rules[i < sample_slot ? 0 : 1].dst;
            n.label = std::string(to_string(label));
        }
        vars.push_back(n.var);
        ast.nodes.push_back(std::move(n));
    }
    for (std::size_t i = 0; i + 1 < n_nodes; ++i) {
        qlang::EdgePattern e;
        if (coin(r, 0.4)) {
            e.var = "e" + std::to_string(i);
            vars.push_back(*e.var);
        }
        const bool toward_sample = i < sample_slot;
        if (coin(r, 0.7)) {
            EdgeType type = kAllEdgeTypes[pick(r, kAllEdgeTypes.size())];
            if (shaped) type = rules[toward_sample ? 0 : 1].type;
            e.type = std::string(to_string(type));
        }
        if (shaped) {
            e.direction = toward_sample ? qlang::EdgeDirection::Reverse : qlang::EdgeDirection::Forward;
        } else {
            e.direction = coin(r) ? qlang::EdgeDirection::Forward : qlang::EdgeDirection::Reverse;
        }
        ast.edges.push_back(std::move(e));
    }
    for (std::size_t k = pick(r, 3); k > 0; --k) ast.where.push_back(random_condition(r, pick_from(r, vars)));
    for (std::size_t k = 1 + pick(r, 3); k > 0; --k) {
        qlang::ReturnItem item{pick_from(r, vars), std::nullopt};
        if (coin(r)) {
            static const std::vector<std::string> keys = {"name", "synonyms", "score", "subject_id", "rank", "absent"};
            item.key = pick_from(r, keys);
        }
        ast.returns.push_back(std::move(item));
    }
    if (coin(r, 0.3)) ast.limit = static_cast<std::int64_t>(1 + pick(r, 20));
    return ast;
}

inline std::string random_identifier(Rand& r) {
    static const std::string first = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_";
    static const std::string rest = first + "0123456789";
    static const std::vector<std::string> keywords = {"MATCH", "WHERE", "AND", "RETURN", "LIMIT", "CONTAINS"};
    for (;;) {
        std::string s(1, first[pick(r, first.size())]);
        for (std::size_t k = pick(r, 8); k > 0; --k) s += rest[pick(r, rest.size())];
        std::string up = s;
        for (auto& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (std::find(keywords.begin(), keywords.end(), up) == keywords.end()) return s;
    }
}

inline std::string random_text(Rand& r) {
    static const std::string chars = "abcXYZ 019_-:.\"\\\n\t()[]<>=,é";
    std::string s;
    for (std::size_t k = pick(r, 10); k > 0; --k) s += chars[pick(r, chars.size())];
    return s;
}

inline qlang::Literal random_literal(Rand& r) {
    switch (pick(r, 3)) {
        case 0: return random_text(r);
        case 1: return std::uniform_int_distribution<std::int64_t>(INT64_MIN, INT64_MAX)(r);
        default: {
            double d = std::uniform_real_distribution<double>(-1e6, 1e6)(r);
            if (coin(r, 0.2)) d = std::ldexp(d, static_cast<int>(pick(r, 200)) - 100);
            if (coin(r, 0.1)) d = std::round(d);
            return d;
        }
    }
}

/// An arbitrary AST that parse() accepts: free-form identifiers as labels,
/// edge types, variables and keys; any literal with any operator.
inline qlang::QueryAst random_ast(Rand& r) {
    qlang::QueryAst ast;
    std::vector<std::string> vars;
    auto fresh = [&] {
        for (;;) {
            auto v = random_identifier(r);
            if (std::find(vars.begin(), vars.end(), v) == vars.end()) {
                vars.push_back(v);
                return v;
            }
        }
    };
    const std::size_t n_nodes = 1 + pick(r, qlang::kMaxPatternNodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        qlang::NodePattern n{fresh(), std::nullopt};
        if (coin(r)) n.label = random_identifier(r);
        ast.nodes.push_back(std::move(n));
    }
    for (std::size_t i = 0; i + 1 < n_nodes; ++i) {
        qlang::EdgePattern e;
        if (coin(r)) e.var = fresh();
        if (coin(r)) e.type = random_identifier(r);
        e.direction = coin(r) ? qlang::EdgeDirection::Forward : qlang::EdgeDirection::Reverse;
        ast.edges.push_back(std::move(e));
    }
    static const std::vector<qlang::CompareOp> ops = {qlang::CompareOp::Eq, qlang::CompareOp::Ne, qlang::CompareOp::Lt,
                                                      qlang::CompareOp::Le, qlang::CompareOp::Gt, qlang::CompareOp::Ge,
                                                      qlang::CompareOp::Contains};
    for (std::size_t k = pick(r, 4); k > 0; --k) {
        ast.where.push_back({pick_from(r, vars), random_identifier(r), pick_from(r, ops), random_literal(r)});
    }
    for (std::size_t k = 1 + pick(r, 4); k > 0; --k) {
        qlang::ReturnItem item{pick_from(r, vars), std::nullopt};
        if (coin(r)) item.key = random_identifier(r);
        ast.returns.push_back(std::move(item));
    }
    if (coin(r, 0.4)) ast.limit = std::uniform_int_distribution<std::int64_t>(1, INT64_MAX)(r);
    return ast;
}

/// Truth and predictions for one task over at most 200 subjects. About a
/// tenth of subjects are excluded from the truth, some are left without a
/// prediction, and a few predictions name unknown subjects. The truth is
/// never empty.
struct RandomCase {
    std::map<std::string, std::string> labels;
    std::map<std::string, std::string> predictions;
    std::set<std::string> excluded;
};

inline RandomCase random_metric_case(Rand& r, bool task_a) {
    RandomCase c;
    const std::size_t n = 1 + pick(r, 200);
    const std::size_t classes = 1 + pick(r, 6);
    auto label = [&] {
        return task_a ? std::string(coin(r) ? "1" : "0") : std::string(1, static_cast<char>('A' + pick(r, classes)));
    };
    for (std::size_t i = 0; i < n; ++i) {
        auto id = "S" + std::to_string(i);
        if (i > 0 && coin(r, 0.1)) {
            c.excluded.insert(id);
        } else {
            c.labels[id] = label();
        }
        if (!coin(r, 0.15)) c.predictions[id] = label();
    }
    for (std::size_t k = pick(r, 3); k > 0; --k) c.predictions["U" + std::to_string(k)] = label();
    return c;
}

}  // namespace kgate::testing
