// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#include "kgate/csv.hpp"

namespace kgate::csv {

std::vector<Record> parse(std::string_view text) {
    std::vector<Record> records;
    std::size_t line = 1;
    std::size_t i = 0;
    const std::size_t n = text.size();

    while (i < n) {
        Record rec;
        rec.line = line;
        std::string field;
        bool blank = true;

        for (;;) {
            if (i < n && text[i] == '"') {
                blank = false;
                ++i;
                for (;;) {
                    if (i >= n) throw CsvError(rec.line, "unterminated quoted field");
                    char c = text[i++];
                    if (c == '"') {
                        if (i < n && text[i] == '"') {
                            field.push_back('"');
                            ++i;
                            continue;
                        }
                        break;
                    }
                    if (c == '\n') ++line;
                    field.push_back(c);
                }
                if (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
                    throw CsvError(line, "unexpected character after closing quote");
                }
            } else {
                while (i < n && text[i] != ',' && text[i] != '\n' && text[i] != '\r') {
                    if (text[i] == '"') throw CsvError(line, "quote inside unquoted field");
                    field.push_back(text[i++]);
                    blank = false;
                }
            }
            rec.fields.push_back(std::move(field));
            field.clear();
            if (i < n && text[i] == ',') {
                blank = false;
                ++i;
                continue;
            }
            break;
        }

        if (i < n && text[i] == '\r') ++i;
        if (i < n && text[i] == '\n') {
            ++i;
            ++line;
        }
        if (!blank) records.push_back(std::move(rec));
    }
    return records;
}

std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_row(std::span<const std::string> fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out.push_back(',');
        out += quote(fields[i]);
    }
    out.push_back('\n');
    return out;
}

}  // namespace kgate::csv
