// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#include <charconv>
#include <cmath>
#include <set>

#include "kgate/query.hpp"

namespace kgate::qlang {

namespace {

class Parser {
public:
    Parser(std::string_view text) : tokens_(tokenize(text)), end_(text.size()) {}

    QueryAst parse_query() {
        QueryAst ast;
        expect_keyword("MATCH");
        parse_pattern(ast);
        if (accept_keyword("WHERE")) {
            ast.where.push_back(parse_condition());
            while (accept_keyword("AND")) ast.where.push_back(parse_condition());
        }
        expect_keyword("RETURN");
        ast.returns.push_back(parse_item());
        while (accept_symbol(",")) ast.returns.push_back(parse_item());
        if (accept_keyword("LIMIT")) ast.limit = parse_limit();
        if (!at_end()) fail("end of query");
        check_scope(ast);
        return ast;
    }

private:
    bool at_end() const { return pos_ >= tokens_.size(); }
    const Token* peek(std::size_t ahead = 0) const {
        return pos_ + ahead < tokens_.size() ? &tokens_[pos_ + ahead] : nullptr;
    }
    std::size_t here() const { return at_end() ? end_ : tokens_[pos_].position; }

    [[noreturn]] void fail(const std::string& expected) const {
        std::string found = at_end() ? "end of input" : "'" + tokens_[pos_].lexeme + "'";
        throw QueryError(QueryErrc::ParseError,
                         "expected " + expected + " at offset " + std::to_string(here()) + ", found " + found,
                         here(), expected);
    }

    bool is_symbol(const Token* t, std::string_view s) const {
        return t != nullptr && t->kind == TokenKind::Symbol && t->lexeme == s;
    }

    bool accept_symbol(std::string_view s) {
        if (!is_symbol(peek(), s)) return false;
        ++pos_;
        return true;
    }
    void expect_symbol(std::string_view s) {
        if (!accept_symbol(s)) fail("'" + std::string(s) + "'");
    }
    /// Multi-character symbols such as "]->" arrive as adjacent tokens.
    void expect_adjacent(std::string_view s) {
        const Token& prev = tokens_[pos_ - 1];
        if (!is_symbol(peek(), s) || peek()->position != prev.position + prev.lexeme.size()) {
            fail("'" + std::string(s) + "'");
        }
        ++pos_;
    }

    bool accept_keyword(std::string_view kw) {
        const Token* t = peek();
        if (t == nullptr || t->kind != TokenKind::Keyword || t->lexeme != kw) return false;
        ++pos_;
        return true;
    }
    void expect_keyword(std::string_view kw) {
        if (!accept_keyword(kw)) fail(std::string(kw));
    }

    std::string expect_identifier(const std::string& what) {
        const Token* t = peek();
        if (t == nullptr || t->kind != TokenKind::Identifier) fail(what);
        ++pos_;
        return t->lexeme;
    }

    void parse_pattern(QueryAst& ast) {
        ast.nodes.push_back(parse_node());
        for (;;) {
            const Token* t = peek();
            if (!is_symbol(t, "-") && !is_symbol(t, "<")) break;
            std::size_t start = here();
            ast.edges.push_back(parse_edge());
            ast.nodes.push_back(parse_node());
            if (ast.nodes.size() > kMaxPatternNodes) {
                throw QueryError(QueryErrc::PatternTooLong,
                                 "pattern has more than " + std::to_string(kMaxPatternNodes) + " node elements",
                                 start);
            }
        }
    }

    NodePattern parse_node() {
        NodePattern node;
        expect_symbol("(");
        node.var = expect_identifier("variable");
        if (accept_symbol(":")) node.label = expect_identifier("label");
        expect_symbol(")");
        return node;
    }

    EdgePattern parse_edge() {
        EdgePattern edge;
        if (accept_symbol("<")) {
            edge.direction = EdgeDirection::Reverse;
            expect_adjacent("-");
            expect_adjacent("[");
        } else {
            expect_symbol("-");
            expect_adjacent("[");
        }
        if (peek() != nullptr && peek()->kind == TokenKind::Identifier) edge.var = expect_identifier("variable");
        if (accept_symbol(":")) edge.type = expect_identifier("edge type");
        expect_symbol("]");
        expect_adjacent("-");
        if (edge.direction == EdgeDirection::Forward) expect_adjacent(">");
        return edge;
    }

    Condition parse_condition() {
        Condition cond;
        cond.var = expect_identifier("variable");
        expect_adjacent(".");
        cond.key = expect_identifier("property key");
        cond.op = parse_operator();
        cond.literal = parse_literal();
        return cond;
    }

    CompareOp parse_operator() {
        if (accept_keyword("CONTAINS")) return CompareOp::Contains;
        static const std::pair<std::string_view, CompareOp> ops[] = {
            {"=", CompareOp::Eq}, {"<>", CompareOp::Ne}, {"<=", CompareOp::Le},
            {">=", CompareOp::Ge}, {"<", CompareOp::Lt}, {">", CompareOp::Gt}};
        for (const auto& [sym, op] : ops) {
            if (accept_symbol(sym)) return op;
        }
        fail("comparison operator");
    }

    Literal parse_literal() {
        const Token* t = peek();
        if (t == nullptr || (t->kind != TokenKind::String && t->kind != TokenKind::Number)) fail("literal");
        ++pos_;
        if (t->kind == TokenKind::String) return t->lexeme;
        return parse_number(*t);
    }

    Literal parse_number(const Token& t) {
        const auto& s = t.lexeme;
        const char* first = s.data();
        const char* last = s.data() + s.size();
        if (s.find_first_of(".eE") == std::string::npos) {
            std::int64_t v = 0;
            auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc{} || ptr != last) {
                throw QueryError(QueryErrc::ParseError, "integer literal out of range", t.position, "integer");
            }
            return v;
        }
        double d = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, d);
        if (ec != std::errc{} || ptr != last || !std::isfinite(d)) {
            throw QueryError(QueryErrc::ParseError, "decimal literal out of range", t.position, "decimal");
        }
        return d;
    }

    ReturnItem parse_item() {
        ReturnItem item;
        item.var = expect_identifier("variable");
        if (is_symbol(peek(), ".")) {
            expect_adjacent(".");
            item.key = expect_identifier("property key");
        }
        return item;
    }

    std::int64_t parse_limit() {
        const Token* t = peek();
        if (t == nullptr || t->kind != TokenKind::Number || t->lexeme.find_first_not_of("0123456789") != std::string::npos) {
            fail("positive integer");
        }
        auto value = parse_number(*t);
        auto v = std::get<std::int64_t>(value);
        if (v <= 0) fail("positive integer");
        ++pos_;
        return v;
    }

    void check_scope(const QueryAst& ast) const {
        std::set<std::string, std::less<>> bound;
        auto bind = [&](const std::string& var) {
            if (!bound.insert(var).second) {
                throw QueryError(QueryErrc::DuplicateVariable, "variable '" + var + "' is bound twice");
            }
        };
        for (const auto& n : ast.nodes) bind(n.var);
        for (const auto& e : ast.edges) {
            if (e.var) bind(*e.var);
        }
        auto require = [&](const std::string& var) {
            if (!bound.contains(var)) {
                throw QueryError(QueryErrc::UnboundVariable, "variable '" + var + "' is not bound in MATCH");
            }
        };
        for (const auto& c : ast.where) require(c.var);
        for (const auto& r : ast.returns) require(r.var);
    }

    std::vector<Token> tokens_;
    std::size_t end_;
    std::size_t pos_ = 0;
};

std::string print_literal(const Literal& lit) {
    if (const auto* s = std::get_if<std::string>(&lit)) {
        std::string out = "\"";
        for (char c : *s) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                default: out.push_back(c);
            }
        }
        out.push_back('"');
        return out;
    }
    if (const auto* i = std::get_if<std::int64_t>(&lit)) return std::to_string(*i);
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, std::get<double>(lit));
    std::string out(buf, ptr);
    if (out.find_first_of(".e") == std::string::npos) out += ".0";
    return out;
}

}  // namespace

QueryAst parse(std::string_view text) { return Parser(text).parse_query(); }

std::string pretty_print(const QueryAst& ast) {
    std::string out = "MATCH ";
    for (std::size_t i = 0; i < ast.nodes.size(); ++i) {
        if (i > 0) {
            const auto& e = ast.edges[i - 1];
            std::string inner = e.var.value_or("");
            if (e.type) inner += ":" + *e.type;
            out += e.direction == EdgeDirection::Forward ? "-[" + inner + "]->" : "<-[" + inner + "]-";
        }
        const auto& n = ast.nodes[i];
        out += "(" + n.var + (n.label ? ":" + *n.label : "") + ")";
    }
    for (std::size_t i = 0; i < ast.where.size(); ++i) {
        const auto& c = ast.where[i];
        out += i == 0 ? " WHERE " : " AND ";
        out += c.var + "." + c.key + " " + std::string(to_string(c.op)) + " " + print_literal(c.literal);
    }
    out += " RETURN ";
    for (std::size_t i = 0; i < ast.returns.size(); ++i) {
        if (i > 0) out += ", ";
        out += ast.returns[i].column();
    }
    if (ast.limit) out += " LIMIT " + std::to_string(*ast.limit);
    return out;
}

}  // namespace kgate::qlang
