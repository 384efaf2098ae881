// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kgate/graph.hpp"

// Bounded graph-pattern language used by model apps to read the graph:
//
//   query    := "MATCH" pattern ["WHERE" cond {"AND" cond}]
//               "RETURN" item {"," item} ["LIMIT" int]
//   pattern  := nodeElem {edgeElem nodeElem}            (1-3 nodeElems)
//   nodeElem := "(" var [":" Label] ")"
//   edgeElem := "-[" [var] [":" EdgeType] "]->" | "<-[" [var] [":" EdgeType] "]-"
//   cond     := var "." key op literal    op in {=, <>, <, <=, >, >=, CONTAINS}
//   item     := var | var "." key
//   literal  := quoted string | number
namespace kgate::qlang {

enum class TokenKind { Keyword, Identifier, Symbol, String, Number };

struct Token {
    TokenKind kind;
    std::string lexeme;  // keywords uppercased, strings unescaped
    std::size_t position = 0;
    friend bool operator==(const Token&, const Token&) = default;
};

struct NodePattern {
    std::string var;
    std::optional<std::string> label;
    friend bool operator==(const NodePattern&, const NodePattern&) = default;
};

enum class EdgeDirection { Forward, Reverse };

struct EdgePattern {
    std::optional<std::string> var;
    std::optional<std::string> type;
    EdgeDirection direction = EdgeDirection::Forward;
    friend bool operator==(const EdgePattern&, const EdgePattern&) = default;
};

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge, Contains };

std::string_view to_string(CompareOp op);

using Literal = std::variant<std::string, std::int64_t, double>;

struct Condition {
    std::string var;
    std::string key;
    CompareOp op = CompareOp::Eq;
    Literal literal;
    friend bool operator==(const Condition&, const Condition&) = default;
};

struct ReturnItem {
    std::string var;
    std::optional<std::string> key;
    std::string column() const { return key ? var + "." + *key : var; }
    friend bool operator==(const ReturnItem&, const ReturnItem&) = default;
};

/// nodes.size() == edges.size() + 1; edges[i] joins nodes[i] and nodes[i + 1].
struct QueryAst {
    std::vector<NodePattern> nodes;
    std::vector<EdgePattern> edges;
    std::vector<Condition> where;
    std::vector<ReturnItem> returns;
    std::optional<std::int64_t> limit;
    friend bool operator==(const QueryAst&, const QueryAst&) = default;
};

inline constexpr std::size_t kMaxPatternNodes = 3;

enum class QueryErrc {
    LexError,
    ParseError,
    UnboundVariable,
    DuplicateVariable,
    PatternTooLong,
    UnknownLabel,
    UnknownEdgeType,
    TypeMismatch,
    BudgetExceeded,
};

enum class BudgetKind { Steps, Rows, WallClock };

std::string_view to_string(QueryErrc code);
std::string_view to_string(BudgetKind kind);

class QueryError : public std::runtime_error {
public:
    QueryError(QueryErrc code, std::string message, std::optional<std::size_t> position = std::nullopt,
               std::string expected = {});
    QueryError(BudgetKind exhausted, std::string message);

    QueryErrc code() const noexcept { return code_; }
    /// Byte offset into the query text, for lexer and parser errors.
    std::optional<std::size_t> position() const noexcept { return position_; }
    const std::string& expected() const noexcept { return expected_; }
    std::optional<BudgetKind> budget() const noexcept { return budget_; }

private:
    QueryErrc code_;
    std::optional<std::size_t> position_;
    std::string expected_;
    std::optional<BudgetKind> budget_;
};

struct Budget {
    std::uint64_t max_steps = 10'000'000;
    std::uint64_t max_rows = 100'000;
    std::uint64_t wall_clock_ms = 60'000;

    static Budget production() { return {}; }
    friend bool operator==(const Budget&, const Budget&) = default;
};

/// Null for absent properties; node and edge ids are integers.
using Value = std::variant<std::monostate, std::int64_t, double, std::string, TextList>;
using Row = std::vector<Value>;

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<Row> rows;
    bool truncated = false;
    std::uint64_t steps_used = 0;
};

std::vector<Token> tokenize(std::string_view text);
QueryAst parse(std::string_view text);
std::string pretty_print(const QueryAst& ast);

/// Checks labels, edge types, and statically known property types against the
/// clinical schema. Called by evaluate before any traversal.
void check_schema(const QueryAst& ast);

/// Every candidate node binding and every candidate edge expansion costs one
/// step. LIMIT truncates and sets `truncated`; producing more than
/// budget.max_rows rows is a budget failure, as is running out of steps or
/// wall-clock time.
ResultTable evaluate(const PropertyGraph& graph, const QueryAst& ast, const Budget& budget);

}  // namespace kgate::qlang
