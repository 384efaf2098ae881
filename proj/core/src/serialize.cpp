// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The kgate Authors

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "kgate/csv.hpp"
#include "kgate/synth.hpp"

namespace kgate::synth {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json props_to_json(const Properties& props) {
    ordered_json out = ordered_json::object();
    for (const auto& [key, value] : props) {
        std::visit([&, &k = key](const auto& v) { out[k] = v; }, value);
    }
    return out;
}

Properties props_from_json(const nlohmann::json& j, std::size_t line) {
    if (!j.is_object()) throw SynthError(SynthErrc::CorruptRecord, "props must be an object", {}, line);
    Properties props;
    for (const auto& [key, value] : j.items()) {
        if (value.is_string()) {
            props.emplace(key, value.get<std::string>());
        } else if (value.is_number_integer()) {
            props.emplace(key, value.get<std::int64_t>());
        } else if (value.is_number_float()) {
            props.emplace(key, value.get<double>());
        } else if (value.is_array()) {
            TextList list;
            for (const auto& entry : value) {
                if (!entry.is_string()) {
                    throw SynthError(SynthErrc::CorruptRecord, "list property '" + key + "' holds a non-string",
                                     {}, line);
                }
                list.push_back(entry.get<std::string>());
            }
            props.emplace(key, std::move(list));
        } else {
            throw SynthError(SynthErrc::CorruptRecord, "unsupported value for property '" + key + "'", {}, line);
        }
    }
    return props;
}

std::string format_decimal(double d) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d);
    return std::string(buf, ptr);
}

std::string cell_of(const PropertyValue& value) {
    struct Visitor {
        std::string operator()(const std::string& s) const { return s; }
        std::string operator()(std::int64_t i) const { return std::to_string(i); }
        std::string operator()(double d) const { return format_decimal(d); }
        std::string operator()(const TextList& list) const {
            std::string out;
            for (std::size_t i = 0; i < list.size(); ++i) {
                if (list[i].find('|') != std::string::npos) {
                    throw SynthError(SynthErrc::UnrepresentableValue, "list entry contains '|': " + list[i]);
                }
                if (i > 0) out.push_back('|');
                out += list[i];
            }
            return out;
        }
    };
    return std::visit(Visitor{}, value);
}

PropertyValue value_from_cell(const std::string& key, const std::string& cell, const std::string& file,
                              std::size_t line) {
    auto kind = known_property_kind(key).value_or(PropertyKind::Text);
    switch (kind) {
        case PropertyKind::Text: return cell;
        case PropertyKind::TextList: {
            TextList list;
            std::size_t start = 0;
            for (;;) {
                auto bar = cell.find('|', start);
                list.push_back(cell.substr(start, bar == std::string::npos ? std::string::npos : bar - start));
                if (bar == std::string::npos) break;
                start = bar + 1;
            }
            return list;
        }
        case PropertyKind::Integer:
        case PropertyKind::Decimal: {
            double d = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), d);
            if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
                throw SynthError(SynthErrc::CorruptRecord, "'" + key + "' is not a number", file, line);
            }
            return d;
        }
    }
    return cell;
}

std::vector<std::string> base_columns(NodeLabel label) {
    switch (label) {
        case NodeLabel::Subject: return {"subject_id"};
        case NodeLabel::BiologicalSample: return {};
        case NodeLabel::Disease: return {"name", "synonyms"};
        default: return {"name"};
    }
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw SynthError(SynthErrc::IoFailure, "cannot open for writing", path.string());
    out << text;
    out.flush();
    if (!out) throw SynthError(SynthErrc::IoFailure, "write failed", path.string());
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SynthError(SynthErrc::IoFailure, "cannot open for reading", path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw SynthError(SynthErrc::IoFailure, "read failed", path.string());
    return buf.str();
}

void write_jsonl(const PropertyGraph& graph, std::ostream& out) {
    for (const auto& n : graph.nodes()) {
        ordered_json j;
        j["kind"] = "node";
        j["id"] = n.id.value;
        j["label"] = to_string(n.label);
        j["props"] = props_to_json(n.properties);
        out << j.dump() << '\n';
    }
    for (const auto& e : graph.edges()) {
        ordered_json j;
        j["kind"] = "edge";
        j["id"] = e.id.value;
        j["src"] = e.src.value;
        j["dst"] = e.dst.value;
        j["type"] = to_string(e.type);
        j["props"] = props_to_json(e.properties);
        out << j.dump() << '\n';
    }
}

std::string to_jsonl(const PropertyGraph& graph) {
    std::ostringstream out;
    write_jsonl(graph, out);
    return out.str();
}

PropertyGraph read_jsonl(std::istream& in) {
    PropertyGraph g;
    std::string text;
    std::size_t line_no = 0;
    bool in_edges = false;

    auto corrupt = [&](const std::string& what) { return SynthError(SynthErrc::CorruptRecord, what, {}, line_no); };

    while (std::getline(in, text)) {
        ++line_no;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw corrupt(std::string("malformed JSON: ") + e.what());
        }
        try {
            if (!j.is_object()) throw corrupt("record is not an object");
            const auto kind = j.at("kind").get<std::string>();
            const auto id = j.at("id").get<std::uint64_t>();
            if (kind == "node") {
                if (in_edges) throw corrupt("node record after edge records");
                if (id != g.node_count()) throw corrupt("node ids must be dense and ascending");
                auto label = parse_label(j.at("label").get<std::string>());
                if (!label) throw corrupt("unknown label");
                g.add_node(*label, props_from_json(j.at("props"), line_no));
            } else if (kind == "edge") {
                in_edges = true;
                if (id != g.edge_count()) throw corrupt("edge ids must be dense and ascending");
                auto type = parse_edge_type(j.at("type").get<std::string>());
                if (!type) throw corrupt("unknown edge type");
                g.add_edge(NodeId{j.at("src").get<std::uint64_t>()}, *type, NodeId{j.at("dst").get<std::uint64_t>()},
                           props_from_json(j.at("props"), line_no));
            } else {
                throw corrupt("unknown record kind '" + kind + "'");
            }
        } catch (const nlohmann::json::exception& e) {
            throw corrupt(std::string("bad field: ") + e.what());
        } catch (const GraphError& e) {
            throw corrupt(e.what());
        }
    }
    if (in.bad()) throw SynthError(SynthErrc::IoFailure, "read failed");
    return g;
}

PropertyGraph from_jsonl(std::string_view text) {
    std::istringstream in{std::string(text)};
    return read_jsonl(in);
}

void export_jsonl(const PropertyGraph& graph, const std::filesystem::path& destination) {
    write_text(destination, to_jsonl(graph));
}

PropertyGraph load_jsonl(const std::filesystem::path& source) {
    std::ifstream in(source, std::ios::binary);
    if (!in) throw SynthError(SynthErrc::IoFailure, "cannot open for reading", source.string());
    try {
        return read_jsonl(in);
    } catch (const SynthError& e) {
        if (e.code() != SynthErrc::CorruptRecord) throw;
        throw SynthError(e.code(), e.what(), source.string(), e.line());
    }
}

std::string csv_stem(NodeLabel label) { return lower(to_string(label)); }

std::string csv_stem(EdgeType type) {
    for (const auto& rule : kSchemaRules) {
        if (rule.type == type) return csv_stem(rule.src) + "_" + lower(to_string(type));
    }
    return lower(to_string(type));
}

std::vector<std::filesystem::path> export_csv(const PropertyGraph& graph, const std::filesystem::path& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw SynthError(SynthErrc::IoFailure, ec.message(), directory.string());

    std::vector<std::filesystem::path> written;
    for (auto label : kAllLabels) {
        auto columns = base_columns(label);
        std::set<std::string> extra;
        for (auto id : graph.nodes_by_label(label)) {
            for (const auto& [key, _] : graph.node(id).properties) {
                if (std::find(columns.begin(), columns.end(), key) == columns.end()) extra.insert(key);
            }
        }
        columns.insert(columns.end(), extra.begin(), extra.end());

        std::vector<std::string> header{"id"};
        header.insert(header.end(), columns.begin(), columns.end());
        std::string text = csv::format_row(header);
        for (auto id : graph.nodes_by_label(label)) {
            const auto& props = graph.node(id).properties;
            std::vector<std::string> row{std::to_string(id.value)};
            for (const auto& key : columns) {
                auto it = props.find(key);
                row.push_back(it == props.end() ? "" : cell_of(it->second));
            }
            text += csv::format_row(row);
        }
        auto path = directory / (csv_stem(label) + ".csv");
        write_text(path, text);
        written.push_back(path);
    }

    for (auto type : kAllEdgeTypes) {
        const bool scored = requires_score(type);
        std::vector<std::string> header{"src", "dst"};
        if (scored) header.push_back("score");
        std::string text = csv::format_row(header);
        for (const auto& e : graph.edges()) {
            if (e.type != type) continue;
            std::vector<std::string> row{std::to_string(e.src.value), std::to_string(e.dst.value)};
            if (scored) row.push_back(cell_of(e.properties.at("score")));
            text += csv::format_row(row);
        }
        auto path = directory / (csv_stem(type) + ".csv");
        write_text(path, text);
        written.push_back(path);
    }
    return written;
}

PropertyGraph import_csv(const std::filesystem::path& directory) {
    auto parse_id = [](const std::string& cell, const std::string& file, std::size_t line) {
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) {
            throw SynthError(SynthErrc::CorruptRecord, "bad id '" + cell + "'", file, line);
        }
        return v;
    };
    auto load = [&](const std::filesystem::path& path) {
        try {
            return csv::parse(read_file(path));
        } catch (const csv::CsvError& e) {
            throw SynthError(SynthErrc::CorruptRecord, e.what(), path.string(), e.line());
        }
    };

    struct PendingNode {
        NodeLabel label;
        Properties props;
        std::string file;
        std::size_t line;
    };
    std::map<std::uint64_t, PendingNode> pending;
    for (auto label : kAllLabels) {
        const auto path = directory / (csv_stem(label) + ".csv");
        const auto records = load(path);
        if (records.empty() || records.front().fields.empty() || records.front().fields.front() != "id") {
            throw SynthError(SynthErrc::CorruptRecord, "missing header", path.string(), 1);
        }
        const auto& header = records.front().fields;
        for (std::size_t r = 1; r < records.size(); ++r) {
            const auto& rec = records[r];
            if (rec.fields.size() != header.size()) {
                throw SynthError(SynthErrc::CorruptRecord, "wrong field count", path.string(), rec.line);
            }
            Properties props;
            for (std::size_t c = 1; c < header.size(); ++c) {
                if (rec.fields[c].empty()) continue;
                props.emplace(header[c], value_from_cell(header[c], rec.fields[c], path.string(), rec.line));
            }
            auto id = parse_id(rec.fields[0], path.string(), rec.line);
            if (!pending.emplace(id, PendingNode{label, std::move(props), path.string(), rec.line}).second) {
                throw SynthError(SynthErrc::CorruptRecord, "duplicate node id", path.string(), rec.line);
            }
        }
    }

    PropertyGraph g;
    for (auto& [id, node] : pending) {
        if (id != g.node_count()) {
            throw SynthError(SynthErrc::CorruptRecord, "node ids are not dense", node.file, node.line);
        }
        try {
            g.add_node(node.label, std::move(node.props));
        } catch (const GraphError& e) {
            throw SynthError(SynthErrc::CorruptRecord, e.what(), node.file, node.line);
        }
    }

    for (auto type : kAllEdgeTypes) {
        const auto path = directory / (csv_stem(type) + ".csv");
        const auto records = load(path);
        const std::size_t width = requires_score(type) ? 3 : 2;
        if (records.empty() || records.front().fields.size() != width) {
            throw SynthError(SynthErrc::CorruptRecord, "missing or wrong header", path.string(), 1);
        }
        for (std::size_t r = 1; r < records.size(); ++r) {
            const auto& rec = records[r];
            if (rec.fields.size() != width) {
                throw SynthError(SynthErrc::CorruptRecord, "wrong field count", path.string(), rec.line);
            }
            Properties props;
            if (width == 3) props.emplace("score", value_from_cell("score", rec.fields[2], path.string(), rec.line));
            try {
                g.add_edge(NodeId{parse_id(rec.fields[0], path.string(), rec.line)}, type,
                           NodeId{parse_id(rec.fields[1], path.string(), rec.line)}, std::move(props));
            } catch (const GraphError& e) {
                throw SynthError(SynthErrc::CorruptRecord, e.what(), path.string(), rec.line);
            }
        }
    }
    return g;
}

}  // namespace kgate::synth
