// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#include <algorithm>
#include <chrono>

#include "kgate/query.hpp"

namespace kgate::qlang {

namespace {

bool is_ordering(CompareOp op) {
    return op == CompareOp::Lt || op == CompareOp::Le || op == CompareOp::Gt || op == CompareOp::Ge;
}

[[noreturn]] void mismatch(const Condition& c, const std::string& why) {
    throw QueryError(QueryErrc::TypeMismatch,
                     c.var + "." + c.key + " " + std::string(to_string(c.op)) + ": " + why);
}

template <typename T>
bool compare(const T& lhs, CompareOp op, const T& rhs) {
    switch (op) {
        case CompareOp::Eq: return lhs == rhs;
        case CompareOp::Ne: return lhs != rhs;
        case CompareOp::Lt: return lhs < rhs;
        case CompareOp::Le: return lhs <= rhs;
        case CompareOp::Gt: return lhs > rhs;
        case CompareOp::Ge: return lhs >= rhs;
        case CompareOp::Contains: return false;
    }
    return false;
}

/// Conditions on a property of the wrong runtime type, or on a missing
/// property, are false. Statically known mismatches never get this far.
bool holds(const Properties& props, const Condition& c) {
    auto it = props.find(c.key);
    if (it == props.end()) return false;
    const PropertyValue& value = it->second;

    if (c.op == CompareOp::Contains) {
        const auto& needle = std::get<std::string>(c.literal);
        if (const auto* s = std::get_if<std::string>(&value)) return s->find(needle) != std::string::npos;
        if (const auto* list = std::get_if<TextList>(&value)) {
            return std::find(list->begin(), list->end(), needle) != list->end();
        }
        return false;
    }

    if (const auto* text = std::get_if<std::string>(&c.literal)) {
        const auto* s = std::get_if<std::string>(&value);
        if (s == nullptr || is_ordering(c.op)) return false;
        return compare(*s, c.op, *text);
    }

    const bool lit_int = std::holds_alternative<std::int64_t>(c.literal);
    if (const auto* i = std::get_if<std::int64_t>(&value)) {
        if (lit_int) return compare(*i, c.op, std::get<std::int64_t>(c.literal));
        return compare(static_cast<double>(*i), c.op, std::get<double>(c.literal));
    }
    if (const auto* d = std::get_if<double>(&value)) {
        double rhs = lit_int ? static_cast<double>(std::get<std::int64_t>(c.literal)) : std::get<double>(c.literal);
        return compare(*d, c.op, rhs);
    }
    return false;
}

Value project(const Properties& props, const std::string& key) {
    auto it = props.find(key);
    if (it == props.end()) return std::monostate{};
    return std::visit([](const auto& v) -> Value { return v; }, it->second);
}

struct Binding {
    bool is_edge = false;
    std::size_t slot = 0;  // index into nodes or edges of the pattern
};

class Matcher {
public:
    Matcher(const PropertyGraph& graph, const QueryAst& ast, const Budget& budget)
        : graph_(graph), ast_(ast), budget_(budget), deadline_(std::chrono::steady_clock::now() +
                                                               std::chrono::milliseconds(budget.wall_clock_ms)) {
        for (const auto& n : ast.nodes) labels_.push_back(n.label ? parse_label(*n.label) : std::nullopt);
        for (const auto& e : ast.edges) types_.push_back(e.type ? parse_edge_type(*e.type) : std::nullopt);

        node_conditions_.resize(ast.nodes.size());
        edge_conditions_.resize(ast.edges.size());
        for (const auto& c : ast.where) {
            auto b = lookup(c.var);
            (b.is_edge ? edge_conditions_[b.slot] : node_conditions_[b.slot]).push_back(&c);
        }
        for (const auto& r : ast.returns) {
            table_.columns.push_back(r.column());
            projections_.push_back(lookup(r.var));
        }
        bound_nodes_.resize(ast.nodes.size());
        bound_edges_.resize(ast.edges.size());
    }

    ResultTable run() {
        if (labels_[0]) {
            for (auto id : graph_.nodes_by_label(*labels_[0])) {
                if (!try_node(0, id)) break;
            }
        } else {
            for (std::uint64_t i = 0; i < graph_.node_count(); ++i) {
                if (!try_node(0, NodeId{i})) break;
            }
        }
        return std::move(table_);
    }

private:
    Binding lookup(const std::string& var) const {
        for (std::size_t i = 0; i < ast_.nodes.size(); ++i) {
            if (ast_.nodes[i].var == var) return {false, i};
        }
        for (std::size_t i = 0; i < ast_.edges.size(); ++i) {
            if (ast_.edges[i].var == var) return {true, i};
        }
        throw QueryError(QueryErrc::UnboundVariable, "variable '" + var + "' is not bound in MATCH");
    }

    void step() {
        if (table_.steps_used >= budget_.max_steps) {
            throw QueryError(BudgetKind::Steps, "query exceeded " + std::to_string(budget_.max_steps) + " steps");
        }
        if ((table_.steps_used & 0x3ff) == 0 && std::chrono::steady_clock::now() >= deadline_) {
            throw QueryError(BudgetKind::WallClock,
                             "query exceeded " + std::to_string(budget_.wall_clock_ms) + " ms");
        }
        ++table_.steps_used;
    }

    /// Returns false once the scan must stop (LIMIT reached).
    bool try_node(std::size_t slot, NodeId id) {
        step();
        const Node& node = graph_.node(id);
        if (labels_[slot] && node.label != *labels_[slot]) return true;
        for (const auto* c : node_conditions_[slot]) {
            if (!holds(node.properties, *c)) return true;
        }
        bound_nodes_[slot] = id;
        if (slot + 1 == ast_.nodes.size()) return emit();
        return expand(slot);
    }

    bool expand(std::size_t slot) {
        const auto& pattern = ast_.edges[slot];
        const auto dir = pattern.direction == EdgeDirection::Forward ? Direction::Out : Direction::In;
        std::span<const Adjacency> rows;
        std::vector<Adjacency> merged;
        if (types_[slot]) {
            rows = graph_.neighbors(bound_nodes_[slot], *types_[slot], dir);
        } else {
            for (auto type : kAllEdgeTypes) {
                auto part = graph_.neighbors(bound_nodes_[slot], type, dir);
                merged.insert(merged.end(), part.begin(), part.end());
            }
            std::sort(merged.begin(), merged.end(), [](const Adjacency& a, const Adjacency& b) {
                return std::tie(a.node, a.edge) < std::tie(b.node, b.edge);
            });
            rows = merged;
        }
        for (const auto& row : rows) {
            step();
            const Edge& edge = graph_.edge(row.edge);
            bool ok = true;
            for (const auto* c : edge_conditions_[slot]) {
                if (!holds(edge.properties, *c)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            bound_edges_[slot] = row.edge;
            if (!try_node(slot + 1, row.node)) return false;
        }
        return true;
    }

    bool emit() {
        if (ast_.limit && table_.rows.size() == static_cast<std::size_t>(*ast_.limit)) {
            table_.truncated = true;
            return false;
        }
        if (table_.rows.size() >= budget_.max_rows) {
            throw QueryError(BudgetKind::Rows, "query produced more than " + std::to_string(budget_.max_rows) + " rows");
        }
        Row row;
        row.reserve(projections_.size());
        for (std::size_t i = 0; i < projections_.size(); ++i) {
            const auto& item = ast_.returns[i];
            const auto& b = projections_[i];
            if (b.is_edge) {
                const Edge& e = graph_.edge(bound_edges_[b.slot]);
                row.push_back(item.key ? project(e.properties, *item.key)
                                       : Value{static_cast<std::int64_t>(e.id.value)});
            } else {
                const Node& n = graph_.node(bound_nodes_[b.slot]);
                row.push_back(item.key ? project(n.properties, *item.key)
                                       : Value{static_cast<std::int64_t>(n.id.value)});
            }
        }
        table_.rows.push_back(std::move(row));
        return true;
    }

    const PropertyGraph& graph_;
    const QueryAst& ast_;
    Budget budget_;
    std::chrono::steady_clock::time_point deadline_;
    std::vector<std::optional<NodeLabel>> labels_;
    std::vector<std::optional<EdgeType>> types_;
    std::vector<std::vector<const Condition*>> node_conditions_;
    std::vector<std::vector<const Condition*>> edge_conditions_;
    std::vector<Binding> projections_;
    std::vector<NodeId> bound_nodes_;
    std::vector<EdgeId> bound_edges_;
    ResultTable table_;
};

}  // namespace

void check_schema(const QueryAst& ast) {
    for (const auto& n : ast.nodes) {
        if (n.label && !parse_label(*n.label)) {
            throw QueryError(QueryErrc::UnknownLabel, "unknown label '" + *n.label + "'");
        }
    }
    for (const auto& e : ast.edges) {
        if (e.type && !parse_edge_type(*e.type)) {
            throw QueryError(QueryErrc::UnknownEdgeType, "unknown edge type '" + *e.type + "'");
        }
    }
    for (const auto& c : ast.where) {
        const bool text_literal = std::holds_alternative<std::string>(c.literal);
        if (c.op == CompareOp::Contains && !text_literal) mismatch(c, "CONTAINS needs a string literal");
        if (is_ordering(c.op) && text_literal) mismatch(c, "ordering applies only to numbers");

        auto kind = known_property_kind(c.key);
        if (!kind) continue;
        switch (*kind) {
            case PropertyKind::Text:
                if (is_ordering(c.op) || !text_literal) mismatch(c, "'" + c.key + "' is text");
                break;
            case PropertyKind::TextList:
                if (c.op != CompareOp::Contains) mismatch(c, "'" + c.key + "' is a list; use CONTAINS");
                break;
            case PropertyKind::Integer:
            case PropertyKind::Decimal:
                if (c.op == CompareOp::Contains || text_literal) mismatch(c, "'" + c.key + "' is numeric");
                break;
        }
    }
}

ResultTable evaluate(const PropertyGraph& graph, const QueryAst& ast, const Budget& budget) {
    if (ast.nodes.empty() || ast.nodes.size() != ast.edges.size() + 1 || ast.nodes.size() > kMaxPatternNodes) {
        throw QueryError(QueryErrc::ParseError, "malformed pattern");
    }
    check_schema(ast);
    return Matcher(graph, ast, budget).run();
}

}  // namespace kgate::qlang
