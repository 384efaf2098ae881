// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#include <algorithm>
#include <array>
#include <cctype>

#include "kgate/query.hpp"

namespace kgate::qlang {

namespace {

constexpr std::array<std::string_view, 6> kKeywords{"MATCH", "WHERE", "AND", "RETURN", "LIMIT", "CONTAINS"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

}  // namespace

std::string_view to_string(CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return "=";
        case CompareOp::Ne: return "<>";
        case CompareOp::Lt: return "<";
        case CompareOp::Le: return "<=";
        case CompareOp::Gt: return ">";
        case CompareOp::Ge: return ">=";
        case CompareOp::Contains: return "CONTAINS";
    }
    return "?";
}

std::string_view to_string(QueryErrc code) {
    switch (code) {
        case QueryErrc::LexError: return "LexError";
        case QueryErrc::ParseError: return "ParseError";
        case QueryErrc::UnboundVariable: return "UnboundVariable";
        case QueryErrc::DuplicateVariable: return "DuplicateVariable";
        case QueryErrc::PatternTooLong: return "PatternTooLong";
        case QueryErrc::UnknownLabel: return "UnknownLabel";
        case QueryErrc::UnknownEdgeType: return "UnknownEdgeType";
        case QueryErrc::TypeMismatch: return "TypeMismatch";
        case QueryErrc::BudgetExceeded: return "BudgetExceeded";
    }
    return "Unknown";
}

std::string_view to_string(BudgetKind kind) {
    switch (kind) {
        case BudgetKind::Steps: return "steps";
        case BudgetKind::Rows: return "rows";
        case BudgetKind::WallClock: return "wall_clock";
    }
    return "?";
}

QueryError::QueryError(QueryErrc code, std::string message, std::optional<std::size_t> position,
                       std::string expected)
    : std::runtime_error(std::move(message)), code_(code), position_(position), expected_(std::move(expected)) {}

QueryError::QueryError(BudgetKind exhausted, std::string message)
    : std::runtime_error(std::move(message)), code_(QueryErrc::BudgetExceeded), budget_(exhausted) {}

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    const std::size_t n = text.size();

    auto lex_error = [](std::size_t pos, const std::string& what) {
        return QueryError(QueryErrc::LexError, what + " at offset " + std::to_string(pos), pos);
    };

    while (i < n) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;

        if (ident_start(c)) {
            while (i < n && ident_char(text[i])) ++i;
            auto word = text.substr(start, i - start);
            auto up = upper(word);
            if (std::find(kKeywords.begin(), kKeywords.end(), up) != kKeywords.end()) {
                tokens.push_back({TokenKind::Keyword, up, start});
            } else {
                tokens.push_back({TokenKind::Identifier, std::string(word), start});
            }
            continue;
        }

        if (digit(c) || (c == '-' && i + 1 < n && digit(text[i + 1]))) {
            ++i;
            while (i < n && digit(text[i])) ++i;
            if (i + 1 < n && text[i] == '.' && digit(text[i + 1])) {
                ++i;
                while (i < n && digit(text[i])) ++i;
            }
            if (i < n && (text[i] == 'e' || text[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < n && (text[j] == '+' || text[j] == '-')) ++j;
                if (j >= n || !digit(text[j])) throw lex_error(i, "malformed exponent");
                i = j;
                while (i < n && digit(text[i])) ++i;
            }
            if (i < n && ident_char(text[i])) throw lex_error(i, "malformed number");
            tokens.push_back({TokenKind::Number, std::string(text.substr(start, i - start)), start});
            continue;
        }

        if (c == '"') {
            std::string value;
            ++i;
            for (;;) {
                if (i >= n) throw lex_error(start, "unterminated string");
                char ch = text[i++];
                if (ch == '"') break;
                if (ch == '\\') {
                    if (i >= n) throw lex_error(start, "unterminated string");
                    char esc = text[i++];
                    switch (esc) {
                        case '"': value.push_back('"'); break;
                        case '\\': value.push_back('\\'); break;
                        case 'n': value.push_back('\n'); break;
                        case 't': value.push_back('\t'); break;
                        default: throw lex_error(i - 2, "unknown escape");
                    }
                    continue;
                }
                value.push_back(ch);
            }
            tokens.push_back({TokenKind::String, std::move(value), start});
            continue;
        }

        if (c == '<' && i + 1 < n && (text[i + 1] == '>' || text[i + 1] == '=')) {
            tokens.push_back({TokenKind::Symbol, std::string(text.substr(i, 2)), start});
            i += 2;
            continue;
        }
        if (c == '>' && i + 1 < n && text[i + 1] == '=') {
            tokens.push_back({TokenKind::Symbol, ">=", start});
            i += 2;
            continue;
        }
        if (std::string_view("():,.-[]<>=").find(c) != std::string_view::npos) {
            tokens.push_back({TokenKind::Symbol, std::string(1, c), start});
            ++i;
            continue;
        }
        throw lex_error(start, "illegal character");
    }
    return tokens;
}

}  // namespace kgate::qlang
