// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kgate::csv {

class CsvError : public std::runtime_error {
public:
    CsvError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct Record {
    std::size_t line = 0;  // 1-based line on which the record starts
    std::vector<std::string> fields;
};

/// RFC-4180 reader. Accepts LF or CRLF endings and skips blank lines.
std::vector<Record> parse(std::string_view text);

std::string quote(std::string_view field);
std::string format_row(std::span<const std::string> fields);

}  // namespace kgate::csv
