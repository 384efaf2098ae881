// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#pragma once

// Reference implementations that share no code with the library beyond the
// graph container. They are slow on purpose.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "kgate/graph.hpp"
#include "kgate/query.hpp"

namespace kgate::testing {

struct OracleResult {
    std::vector<qlang::Row> rows;
    bool truncated = false;
    std::size_t total = 0;  // matches before LIMIT
};

namespace detail {

inline bool oracle_holds(const Properties& props, const qlang::Condition& c) {
    auto it = props.find(c.key);
    if (it == props.end()) return false;
    const auto& v = it->second;
    const bool lit_text = std::holds_alternative<std::string>(c.literal);
    if (c.op == qlang::CompareOp::Contains) {
        if (!lit_text) return false;
        const auto& needle = std::get<std::string>(c.literal);
        if (v.index() == 0) return std::get<std::string>(v).find(needle) != std::string::npos;
        if (v.index() == 3) {
            for (const auto& s : std::get<TextList>(v)) {
                if (s == needle) return true;
            }
        }
        return false;
    }
    // -1, 0, +1 comparison, or nullopt when the operands are incomparable.
    std::optional<int> cmp;
    if (lit_text) {
        if (v.index() != 0) return false;
        if (c.op != qlang::CompareOp::Eq && c.op != qlang::CompareOp::Ne) return false;
        const auto& a = std::get<std::string>(v);
        const auto& b = std::get<std::string>(c.literal);
        cmp = a == b ? 0 : 1;
    } else if (v.index() == 1 && std::holds_alternative<std::int64_t>(c.literal)) {
        auto a = std::get<std::int64_t>(v);
        auto b = std::get<std::int64_t>(c.literal);
        cmp = a < b ? -1 : (a > b ? 1 : 0);
    } else if (v.index() == 1 || v.index() == 2) {
        double a = v.index() == 1 ? static_cast<double>(std::get<std::int64_t>(v)) : std::get<double>(v);
        double b = std::holds_alternative<double>(c.literal) ? std::get<double>(c.literal)
                                                             : static_cast<double>(std::get<std::int64_t>(c.literal));
        if (a < b) cmp = -1;
        else if (a > b) cmp = 1;
        else if (a == b) cmp = 0;
        else return false;  // NaN never matches
    } else {
        return false;
    }
    switch (c.op) {
        case qlang::CompareOp::Eq: return *cmp == 0;
        case qlang::CompareOp::Ne: return *cmp != 0;
        case qlang::CompareOp::Lt: return *cmp < 0;
        case qlang::CompareOp::Le: return *cmp <= 0;
        case qlang::CompareOp::Gt: return *cmp > 0;
        case qlang::CompareOp::Ge: return *cmp >= 0;
        case qlang::CompareOp::Contains: break;
    }
    return false;
}

inline qlang::Value oracle_project(const Properties& props, const std::string& key) {
    auto it = props.find(key);
    if (it == props.end()) return std::monostate{};
    const auto& v = it->second;
    switch (v.index()) {
        case 0: return std::get<std::string>(v);
        case 1: return std::get<std::int64_t>(v);
        case 2: return std::get<double>(v);
        default: return std::get<TextList>(v);
    }
}

}  // namespace detail

/// Enumerates every tuple of nodes, then every combination of connecting
/// edges, filters, sorts by (nodes..., edges...) and applies LIMIT. Assumes
/// the AST already passed check_schema.
inline OracleResult oracle_evaluate(const PropertyGraph& g, const qlang::QueryAst& ast) {
    const std::size_t k = ast.nodes.size();
    const std::size_t n = g.node_count();

    // (src, dst) -> edge ids, by a full scan.
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::vector<std::uint64_t>> between;
    for (const auto& e : g.edges()) between[{e.src.value, e.dst.value}].push_back(e.id.value);

    auto node_ok = [&](std::size_t slot, std::uint64_t id) {
        const auto& node = g.node(NodeId{id});
        if (ast.nodes[slot].label && std::string(to_string(node.label)) != *ast.nodes[slot].label) return false;
        for (const auto& c : ast.where) {
            if (c.var == ast.nodes[slot].var && !detail::oracle_holds(node.properties, c)) return false;
        }
        return true;
    };
    auto edge_ok = [&](std::size_t slot, std::uint64_t id) {
        const auto& edge = g.edge(EdgeId{id});
        if (ast.edges[slot].type && std::string(to_string(edge.type)) != *ast.edges[slot].type) return false;
        for (const auto& c : ast.where) {
            if (ast.edges[slot].var && c.var == *ast.edges[slot].var && !detail::oracle_holds(edge.properties, c)) {
                return false;
            }
        }
        return true;
    };

    // Per-slot candidates; the cartesian product of these is every tuple
    // that survives the node-local filters.
    std::vector<std::vector<std::uint64_t>> candidates(k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::uint64_t id = 0; id < n; ++id) {
            if (node_ok(i, id)) candidates[i].push_back(id);
        }
    }

    using Key = std::vector<std::uint64_t>;  // nodes then edges
    std::vector<Key> matches;
    std::size_t combos = 1;
    for (const auto& c : candidates) combos *= c.size();
    std::vector<std::uint64_t> ids(k, 0);
    for (std::size_t c = 0; c < combos; ++c) {
        std::size_t rest = c;
        for (std::size_t i = k; i-- > 0;) {
            ids[i] = candidates[i][rest % candidates[i].size()];
            rest /= candidates[i].size();
        }
        // Every combination of one qualifying edge per hop.
        std::vector<std::vector<std::uint64_t>> options(k - 1);
        for (std::size_t i = 0; i + 1 < k; ++i) {
            auto src = ids[i], dst = ids[i + 1];
            if (ast.edges[i].direction == qlang::EdgeDirection::Reverse) std::swap(src, dst);
            auto it = between.find({src, dst});
            if (it == between.end()) continue;
            for (auto e : it->second) {
                if (edge_ok(i, e)) options[i].push_back(e);
            }
        }
        std::vector<Key> partial{Key(ids.begin(), ids.end())};
        for (const auto& opts : options) {
            std::vector<Key> next;
            for (const auto& p : partial) {
                for (auto e : opts) {
                    next.push_back(p);
                    next.back().push_back(e);
                }
            }
            partial = std::move(next);
        }
        for (auto& key : partial) matches.push_back(std::move(key));
    }
    std::sort(matches.begin(), matches.end());

    OracleResult out;
    out.total = matches.size();
    std::size_t keep = matches.size();
    if (ast.limit && static_cast<std::uint64_t>(*ast.limit) < keep) {
        keep = static_cast<std::size_t>(*ast.limit);
        out.truncated = true;
    }
    for (std::size_t m = 0; m < keep; ++m) {
        const auto& key = matches[m];
        qlang::Row row;
        for (const auto& item : ast.returns) {
            std::optional<std::uint64_t> node_id, edge_id;
            for (std::size_t i = 0; i < k; ++i) {
                if (ast.nodes[i].var == item.var) node_id = key[i];
            }
            for (std::size_t i = 0; i + 1 < k; ++i) {
                if (ast.edges[i].var && *ast.edges[i].var == item.var) edge_id = key[k + i];
            }
            if (!item.key) {
                row.emplace_back(static_cast<std::int64_t>(node_id ? *node_id : *edge_id));
            } else if (node_id) {
                row.push_back(detail::oracle_project(g.node(NodeId{*node_id}).properties, *item.key));
            } else {
                row.push_back(detail::oracle_project(g.edge(EdgeId{*edge_id}).properties, *item.key));
            }
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

/// Task A counts from first principles: truth maps subject -> "0"/"1",
/// predictions subject -> label. Missing subjects take the wrong label.
struct OracleBinary {
    double precision = 0, recall = 0, f1 = 0, accuracy = 0;
};

inline OracleBinary oracle_task_a(const std::map<std::string, std::string>& truth,
                                  const std::map<std::string, std::string>& predictions) {
    double tp = 0, fp = 0, tn = 0, fn = 0;
    for (const auto& [subject, label] : truth) {
        auto it = predictions.find(subject);
        std::string predicted = it != predictions.end() ? it->second : (label == "1" ? "0" : "1");
        if (label == "1") (predicted == "1" ? tp : fn) += 1;
        else (predicted == "1" ? fp : tn) += 1;
    }
    OracleBinary out;
    out.precision = tp + fp > 0 ? tp / (tp + fp) : 0;
    out.recall = tp + fn > 0 ? tp / (tp + fn) : 0;
    out.f1 = 2 * tp + fp + fn > 0 ? 2 * tp / (2 * tp + fp + fn) : 0;
    out.accuracy = truth.empty() ? 0 : (tp + tn) / static_cast<double>(truth.size());
    return out;
}

inline double oracle_macro_recall(const std::map<std::string, std::string>& truth,
                                  const std::map<std::string, std::string>& predictions) {
    std::map<std::string, std::pair<double, double>> per_class;  // hits, support
    for (const auto& [subject, label] : truth) {
        auto& [hits, support] = per_class[label];
        support += 1;
        auto it = predictions.find(subject);
        if (it != predictions.end() && it->second == label) hits += 1;
    }
    if (per_class.empty()) return 0;
    double sum = 0;
    for (const auto& [_, hs] : per_class) sum += hs.first / hs.second;
    return sum / static_cast<double>(per_class.size());
}

/// Every identifier an egress scan must refuse, gathered by brute force.
inline std::vector<std::string> oracle_forbidden(const PropertyGraph& g) {
    std::set<std::string> out;
    for (const auto& node : g.nodes()) {
        out.insert("n" + std::to_string(node.id.value));
        for (const char* key : {"subject_id", "name"}) {
            if (key == std::string("name") && node.label != NodeLabel::Disease) continue;
            auto it = node.properties.find(key);
            if (it != node.properties.end() && it->second.index() == 0) out.insert(std::get<std::string>(it->second));
        }
    }
    return {out.begin(), out.end()};
}

/// Plain substring search for every forbidden string. For node ids this
/// also catches "n12" inside "n123", the same as a prefix rule would.
inline bool oracle_leaks(const std::string& text, const PropertyGraph& g) {
    for (const auto& f : oracle_forbidden(g)) {
        if (!f.empty() && text.find(f) != std::string::npos) return true;
    }
    return false;
}

}  // namespace kgate::testing
